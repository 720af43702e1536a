#include "lrmm/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "lrmm/io.hpp"
#include "lrmm/metrics.hpp"
#include "lrmm/rng.hpp"

namespace lrmm {

void ExperimentConfig::validate() const {
  static const std::vector<std::string> kSettings = {"s1_1", "s1_2", "s2_1", "s2_2", "custom"};
  if (std::find(kSettings.begin(), kSettings.end(), setting) == kSettings.end()) {
    throw std::invalid_argument("config: unknown setting " + setting);
  }
  if (d1 < 1 || d2 < 1 || n < 1 || K < 2) {
    throw std::invalid_argument("config: invalid dimensions");
  }
  if (trials < 1) throw std::invalid_argument("config: trials must be >= 1");
  if (methods.empty()) throw std::invalid_argument("config: method roster is empty");
  if (T < 1 || restarts < 1) throw std::invalid_argument("config: T and restarts must be >= 1");
  if (setting == "s1_2") {
    if (pbar <= 0.0) throw std::invalid_argument("config: s1_2 requires pbar");
    if (d1 != d2) throw std::invalid_argument("config: s1_2 layers are square");
  } else if (setting != "custom" && lambda <= 0.0) {
    throw std::invalid_argument("config: setting requires lambda > 0");
  }
  if (setting == "custom" && singular_values.empty()) {
    throw std::invalid_argument("config: custom setting requires singular_values");
  }
  if (delta_param != 0.0 && setting != "s2_1") {
    throw std::invalid_argument("config: delta_param applies to s2_1 only");
  }
  if (pbar != 0.0 && setting != "s1_2") {
    throw std::invalid_argument("config: pbar applies to s1_2 only");
  }
}

ExperimentConfig config_from_json(const nlohmann::json& j) {
  ExperimentConfig cfg;
  cfg.setting = j.value("setting", cfg.setting);
  cfg.d1 = j.value("d1", cfg.d1);
  cfg.d2 = j.value("d2", cfg.d2);
  cfg.n = j.value("n", cfg.n);
  cfg.K = j.value("K", cfg.K);
  cfg.ranks = j.value("ranks", cfg.ranks);
  cfg.lambda = j.value("lambda", cfg.lambda);
  cfg.delta_param = j.value("delta_param", cfg.delta_param);
  cfg.pbar = j.value("pbar", cfg.pbar);
  cfg.noise_sd = j.value("noise_sd", cfg.noise_sd);
  cfg.singular_values = j.value("singular_values", cfg.singular_values);
  cfg.trials = j.value("trials", cfg.trials);
  cfg.master_seed = j.value("master_seed", cfg.master_seed);
  cfg.methods = j.value("methods", cfg.methods);
  cfg.T = j.value("T", cfg.T);
  cfg.restarts = j.value("restarts", cfg.restarts);
  cfg.r_u = j.value("r_u", cfg.r_u);
  cfg.r_v = j.value("r_v", cfg.r_v);
  cfg.out_csv = j.value("out_csv", cfg.out_csv);
  cfg.out_json = j.value("out_json", cfg.out_json);
  // Setting-specific defaults for K and ranks.
  if (cfg.setting == "s1_1" && !j.contains("K")) cfg.K = 2;
  if (cfg.setting == "s1_2" && !j.contains("K")) cfg.K = 3;
  if ((cfg.setting == "s2_1" || cfg.setting == "s2_2") && !j.contains("K")) cfg.K = 2;
  if (cfg.ranks.empty()) {
    if (cfg.setting == "s1_1") cfg.ranks = {2, 2};
    else if (cfg.setting == "s2_1" || cfg.setting == "s2_2") cfg.ranks = {3, 3};
    else if (cfg.setting == "s1_2") cfg.ranks = std::vector<int>(cfg.K, cfg.K);
    else {
      for (const auto& sv : cfg.singular_values) {
        cfg.ranks.push_back(static_cast<int>(sv.size()));
      }
    }
  }
  return cfg;
}

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
  nlohmann::json j;
  j["setting"] = cfg.setting;
  j["d1"] = cfg.d1;
  j["d2"] = cfg.d2;
  j["n"] = cfg.n;
  j["K"] = cfg.K;
  j["ranks"] = cfg.ranks;
  j["lambda"] = cfg.lambda;
  j["delta_param"] = cfg.delta_param;
  j["pbar"] = cfg.pbar;
  j["noise_sd"] = cfg.noise_sd;
  if (!cfg.singular_values.empty()) j["singular_values"] = cfg.singular_values;
  j["trials"] = cfg.trials;
  j["master_seed"] = cfg.master_seed;
  j["methods"] = cfg.methods;
  j["T"] = cfg.T;
  j["restarts"] = cfg.restarts;
  j["r_u"] = cfg.r_u;
  j["r_v"] = cfg.r_v;
  return j;
}

std::pair<int, int> init_ranks(const ExperimentConfig& cfg) {
  if (cfg.r_u > 0 && cfg.r_v > 0) return {cfg.r_u, cfg.r_v};
  int ru;
  if (cfg.setting == "s2_1" || cfg.setting == "s2_2") {
    ru = 3;
  } else if (cfg.setting == "s1_2") {
    ru = std::min<int>(cfg.K * cfg.K, static_cast<int>(std::min(cfg.d1, cfg.d2)));
  } else {
    int total = 0;
    for (int r : cfg.ranks) total += r;
    ru = std::min<int>(total, static_cast<int>(std::min(cfg.d1, cfg.d2)));
  }
  return {cfg.r_u > 0 ? cfg.r_u : ru, cfg.r_v > 0 ? cfg.r_v : ru};
}

LrMMSpec make_lrmm_spec(const ExperimentConfig& cfg) {
  LrMMSpec spec;
  spec.d1 = cfg.d1;
  spec.d2 = cfg.d2;
  spec.n = cfg.n;
  spec.K = cfg.K;
  spec.ranks = cfg.ranks;
  spec.noise = cfg.noise_sd > 0.0 ? NoiseKind::Gaussian : NoiseKind::None;
  spec.noise_sd = cfg.noise_sd;
  if (cfg.setting == "s1_1") {
    spec.recipe = CenterRecipe::random_factors(
        std::vector<std::vector<double>>(cfg.K, {1.2 * cfg.lambda, cfg.lambda}));
    spec.ranks = std::vector<int>(cfg.K, 2);
  } else if (cfg.setting == "s2_1") {
    spec.recipe = CenterRecipe::s2_1(cfg.lambda, cfg.delta_param);
  } else if (cfg.setting == "s2_2") {
    spec.recipe = CenterRecipe::s2_2(cfg.lambda);
  } else if (cfg.setting == "custom") {
    spec.recipe = CenterRecipe::random_factors(cfg.singular_values);
  } else {
    throw std::invalid_argument("make_lrmm_spec: setting " + cfg.setting + " is not an LrMM cell");
  }
  return spec;
}

MMSBMSpec make_mmsbm_spec(const ExperimentConfig& cfg) {
  if (cfg.setting != "s1_2") {
    throw std::invalid_argument("make_mmsbm_spec: only s1_2 is an MMSBM cell");
  }
  MMSBMSpec spec;
  spec.K = cfg.K;
  spec.d = static_cast<int>(cfg.d1);
  spec.pbar = cfg.pbar;
  spec.n = cfg.n;
  return spec;
}

std::pair<Tensor3, GroundTruth> generate_dataset(const ExperimentConfig& cfg,
                                                 std::uint64_t seed) {
  if (cfg.setting == "s1_2") return gen_mmsbm(make_mmsbm_spec(cfg), seed);
  return gen_lrmm(make_lrmm_spec(cfg), seed);
}

LloydResult run_pipeline(const std::string& method, const Tensor3& x,
                         const MethodParams& params, std::uint64_t seed,
                         const GroundTruth* gt, const Labeling* warm_init) {
  std::string algo = method;
  std::string init;
  if (const auto plus = method.find('+'); plus != std::string::npos) {
    algo = method.substr(0, plus);
    init = method.substr(plus + 1);
  }

  Labeling labels0;
  if (warm_init != nullptr) {
    labels0 = *warm_init;
  } else if (init == "ts_init") {
    labels0 = ts_init(x, params.r_u, params.r_v, params.K, seed, params.restarts);
  } else if (init == "rts_init") {
    labels0 = rts_init(x, params.r1, seed, params.restarts);
  } else if (init == "kmeans_m3") {
    labels0 = kmeans_m3_init(x, params.K, seed, params.restarts);
  } else if (init == "spectral_m3") {
    labels0 = spectral_m3_init(x, params.K, seed, params.restarts);
  } else if (init.empty()) {
    throw std::invalid_argument("method " + method + " needs an init part or a warm start");
  } else {
    throw std::invalid_argument("unknown init: " + init);
  }

  if (algo == "lr_lloyd") {
    return lr_lloyd(x, labels0, params.ranks, params.T, gt);
  }
  if (algo == "vec_lloyd") {
    return vec_lloyd(x, labels0, params.K, params.T, gt);
  }
  if (algo == "rlr_lloyd") {
    return rlr_lloyd(x, labels0, params.r1, params.r2, params.T, gt);
  }
  throw std::invalid_argument("unknown algorithm: " + algo);
}

void parallel_for(int count, int max_threads, const std::function<void(int)>& fn) {
  int hw = static_cast<int>(std::thread::hardware_concurrency());
  if (hw < 1) hw = 1;
  const int threads = std::max(1, std::min(count, max_threads > 0 ? max_threads : hw));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&]() {
      for (int i = next.fetch_add(1); i < count; i = next.fetch_add(1)) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

namespace {

MethodParams params_from_config(const ExperimentConfig& cfg) {
  MethodParams p;
  p.ranks = cfg.ranks;
  p.K = cfg.K;
  std::tie(p.r_u, p.r_v) = init_ranks(cfg);
  p.r1 = cfg.ranks.empty() ? 1 : cfg.ranks[0];
  p.r2 = cfg.ranks.size() > 1 ? cfg.ranks[1] : p.r1;
  p.T = cfg.T;
  p.restarts = cfg.restarts;
  return p;
}

}  // namespace

BenchResult run_bench(const ExperimentConfig& cfg, int max_threads) {
  cfg.validate();
  const MethodParams params = params_from_config(cfg);
  const int m = static_cast<int>(cfg.methods.size());

  BenchResult out;
  out.errors_per_method.assign(m, std::vector<double>(cfg.trials, 0.0));
  out.delta_per_trial.assign(cfg.trials, 0.0);

  RngStream master(cfg.master_seed);
  const RngStream trials_root = master.child("trial");
  parallel_for(cfg.trials, max_threads, [&](int t) {
    RngStream trial = trials_root.child(static_cast<std::uint64_t>(t));
    auto [x, gt] = generate_dataset(cfg, trial.child("data").key());
    out.delta_per_trial[t] = separation_strength(gt.center_set);
    for (int j = 0; j < m; ++j) {
      const std::uint64_t seed = trial.child(cfg.methods[j]).key();
      const LloydResult res = run_pipeline(cfg.methods[j], x, params, seed);
      out.errors_per_method[j][t] = hamming_error(res.labels, gt.labels, cfg.K).rate;
    }
  });

  for (int j = 0; j < m; ++j) {
    const auto& errs = out.errors_per_method[j];
    double mean = 0.0;
    for (double e : errs) mean += e;
    mean /= static_cast<double>(cfg.trials);
    double var = 0.0;
    if (cfg.trials > 1) {
      for (double e : errs) var += (e - mean) * (e - mean);
      var /= static_cast<double>(cfg.trials - 1);
    }
    out.rows.push_back({cfg.methods[j], mean, std::sqrt(var)});
  }
  return out;
}

std::string bench_csv(const ExperimentConfig& cfg, const BenchResult& result) {
  std::ostringstream os;
  os << "setting,d1,d2,n,K,trials,lambda,delta_param,pbar,noise_sd,master_seed,"
        "method,mean_error,std_error,mean_delta\n";
  double mean_delta = 0.0;
  for (double d : result.delta_per_trial) mean_delta += d;
  mean_delta /= static_cast<double>(result.delta_per_trial.size());
  for (const BenchRow& row : result.rows) {
    os << cfg.setting << ',' << cfg.d1 << ',' << cfg.d2 << ',' << cfg.n << ','
       << cfg.K << ',' << cfg.trials << ',' << format_double(cfg.lambda) << ','
       << format_double(cfg.delta_param) << ',' << format_double(cfg.pbar) << ','
       << format_double(cfg.noise_sd) << ',' << cfg.master_seed << ','
       << row.method << ',' << format_double(row.mean_error) << ','
       << format_double(row.std_error) << ',' << format_double(mean_delta) << '\n';
  }
  return os.str();
}

nlohmann::json bench_sidecar(const ExperimentConfig& cfg, const BenchResult& result) {
  nlohmann::json j;
  j["config"] = config_to_json(cfg);
  j["delta_per_trial"] = result.delta_per_trial;
  nlohmann::json errors;
  for (std::size_t i = 0; i < result.rows.size(); ++i) {
    errors[result.rows[i].method] = result.errors_per_method[i];
  }
  j["errors"] = errors;
  return j;
}

}  // namespace lrmm
