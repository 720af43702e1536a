#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "lrmm/bench.hpp"
#include "lrmm/cluster.hpp"
#include "lrmm/hyptest.hpp"
#include "lrmm/io.hpp"
#include "lrmm/metrics.hpp"
#include "lrmm/model.hpp"
#include "lrmm/synth.hpp"

namespace {

using nlohmann::json;

int env_threads() {
  const char* v = std::getenv("LRMM_THREADS");
  if (v == nullptr) return 0;
  try {
    return std::max(0, std::stoi(v));
  } catch (...) {
    return 0;
  }
}

lrmm::ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config: " + path);
  return lrmm::config_from_json(json::parse(is));
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  os << text;
  if (!os) throw std::runtime_error("write failed: " + path);
}

struct CommonFlags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
};

lrmm::ExperimentConfig resolve_config(const CommonFlags& flags) {
  lrmm::ExperimentConfig cfg;
  if (!flags.config_path.empty()) cfg = load_config(flags.config_path);
  if (flags.seed) cfg.master_seed = *flags.seed;
  if (flags.trials) cfg.trials = *flags.trials;
  return cfg;
}

int cmd_generate(const CommonFlags& flags, const std::string& format,
                 const std::string& out_tensor, const std::string& out_labels,
                 const std::string& out_meta) {
  lrmm::ExperimentConfig cfg = resolve_config(flags);
  if (cfg.methods.empty()) cfg.methods = {"lr_lloyd+ts_init"};  // roster unused here
  cfg.validate();
  // `trials` does not apply: generate emits a single dataset per invocation.
  auto [x, gt] = lrmm::generate_dataset(cfg, lrmm::RngStream(cfg.master_seed)
                                                 .child("trial")
                                                 .child(std::uint64_t{0})
                                                 .child("data")
                                                 .key());
  if (format == "csv") {
    lrmm::write_slices_csv(out_tensor, x);
  } else {
    lrmm::write_t3d1(out_tensor, x);
  }
  lrmm::write_labels_csv(out_labels, gt.labels);

  json meta;
  meta["setting"] = cfg.setting;
  meta["d1"] = x.d1();
  meta["d2"] = x.d2();
  meta["n"] = x.n();
  meta["K"] = cfg.K;
  meta["master_seed"] = cfg.master_seed;
  meta["separation_strength"] = lrmm::separation_strength(gt.center_set);
  meta["signal_strength"] = lrmm::signal_strength(gt.center_set);
  const std::string meta_path = out_meta.empty() ? out_tensor + ".meta.json" : out_meta;
  write_text(meta_path, meta.dump(2) + "\n");
  return 0;
}

int cmd_cluster(const std::string& in_tensor, const std::string& method,
                const CommonFlags& flags, const lrmm::MethodParams& cli_params,
                const std::string& init_path, const std::string& truth_path,
                const std::string& out_labels) {
  const lrmm::Tensor3 x = lrmm::read_tensor_auto(in_tensor);
  lrmm::MethodParams params = cli_params;
  if (!flags.config_path.empty()) {
    lrmm::ExperimentConfig cfg = load_config(flags.config_path);
    if (params.ranks.empty()) params.ranks = cfg.ranks;
    if (params.K == 0) params.K = cfg.K;
    if (params.r_u == 0 || params.r_v == 0) {
      auto [ru, rv] = lrmm::init_ranks(cfg);
      if (params.r_u == 0) params.r_u = ru;
      if (params.r_v == 0) params.r_v = rv;
    }
  }
  if (params.K == 0) params.K = 2;
  if (params.ranks.empty()) params.ranks = std::vector<int>(params.K, 1);
  if (params.r1 == 0) params.r1 = params.ranks[0];
  if (params.r2 == 0) params.r2 = params.ranks.size() > 1 ? params.ranks[1] : params.r1;
  if (params.r_u == 0) params.r_u = params.ranks[0];
  if (params.r_v == 0) params.r_v = params.ranks[0];

  std::optional<lrmm::Labeling> warm;
  if (!init_path.empty()) warm = lrmm::read_labels_csv(init_path);

  std::optional<lrmm::GroundTruth> gt;
  std::optional<lrmm::Labeling> truth;
  if (!truth_path.empty()) truth = lrmm::read_labels_csv(truth_path);

  const std::uint64_t seed = flags.seed.value_or(0);
  const lrmm::LloydResult res =
      lrmm::run_pipeline(method, x, params, seed, nullptr, warm ? &*warm : nullptr);
  lrmm::write_labels_csv(out_labels, res.labels);

  json summary;
  summary["method"] = method;
  summary["n"] = x.n();
  summary["d1"] = x.d1();
  summary["d2"] = x.d2();
  summary["K"] = params.K;
  summary["iterations"] = res.trace.labels_per_iter.size() - 1;
  if (res.trace.converged_at) {
    summary["converged_at"] = *res.trace.converged_at;
  } else {
    summary["converged_at"] = nullptr;
  }
  if (truth) {
    std::vector<double> per_iter;
    for (const auto& labels : res.trace.labels_per_iter) {
      per_iter.push_back(lrmm::hamming_error(labels, *truth, params.K).rate);
    }
    summary["error_per_iter"] = per_iter;
    summary["final_error"] = per_iter.back();
  }
  std::cout << summary.dump(2) << "\n";
  return 0;
}

int cmd_evaluate(const std::string& labels_a, const std::string& labels_b, int K) {
  const lrmm::Labeling a = lrmm::read_labels_csv(labels_a);
  const lrmm::Labeling b = lrmm::read_labels_csv(labels_b);
  if (K == 0) {
    int top = 0;
    for (int v : a) top = std::max(top, v + 1);
    for (int v : b) top = std::max(top, v + 1);
    K = top;
  }
  const lrmm::AlignmentResult res = lrmm::hamming_error(a, b, K);
  const Eigen::MatrixXi conf = lrmm::confusion(a, b, K);
  json report;
  report["n"] = a.size();
  report["K"] = K;
  report["hamming"] = res.hamming;
  report["rate"] = res.rate;
  std::vector<int> perm_1based;
  for (int p : res.permutation) perm_1based.push_back(p + 1);
  report["permutation"] = perm_1based;
  std::vector<std::vector<int>> conf_rows;
  for (int i = 0; i < K; ++i) {
    std::vector<int> row;
    for (int j = 0; j < K; ++j) row.push_back(conf(i, j));
    conf_rows.push_back(row);
  }
  report["confusion"] = conf_rows;
  std::cout << report.dump(2) << "\n";
  return 0;
}

int cmd_bench(const CommonFlags& flags, const std::string& out_csv,
              const std::string& out_json) {
  lrmm::ExperimentConfig cfg = resolve_config(flags);
  if (!out_csv.empty()) cfg.out_csv = out_csv;
  if (!out_json.empty()) cfg.out_json = out_json;
  cfg.validate();
  const lrmm::BenchResult result = lrmm::run_bench(cfg, env_threads());
  const std::string csv = lrmm::bench_csv(cfg, result);
  if (cfg.out_csv.empty()) {
    std::cout << csv;
  } else {
    write_text(cfg.out_csv, csv);
  }
  if (!cfg.out_json.empty()) {
    write_text(cfg.out_json, lrmm::bench_sidecar(cfg, result).dump(2) + "\n");
  }
  return 0;
}

int cmd_ranks(const std::string& in_tensor, int r_max, int k_max,
              std::uint64_t seed, const std::string& scree_out) {
  const lrmm::Tensor3 x = lrmm::read_tensor_auto(in_tensor);
  lrmm::ScreeData scree;
  const lrmm::RankEstimate est = lrmm::estimate_ranks(x, r_max, k_max, seed, &scree);
  json report;
  report["r_u"] = est.r_u;
  report["r_v"] = est.r_v;
  report["K"] = est.K;
  report["cluster_ranks"] = est.cluster_ranks;
  std::cout << report.dump(2) << "\n";
  if (!scree_out.empty()) {
    json dump;
    dump["mode1"] = std::vector<double>(scree.mode1.begin(), scree.mode1.end());
    dump["mode2"] = std::vector<double>(scree.mode2.begin(), scree.mode2.end());
    dump["core_mode3"] =
        std::vector<double>(scree.core_mode3.begin(), scree.core_mode3.end());
    std::vector<std::vector<double>> cluster_spectra;
    for (const auto& sv : scree.cluster_means) {
      cluster_spectra.emplace_back(sv.begin(), sv.end());
    }
    dump["cluster_means"] = cluster_spectra;
    write_text(scree_out, dump.dump(2) + "\n");
  }
  return 0;
}

int cmd_lrtest(const std::string& in_tensor, double epsilon, double alpha,
               std::uint64_t seed) {
  const lrmm::Tensor3 x = lrmm::read_tensor_auto(in_tensor);
  const lrmm::ReductionDecision d = lrmm::reduction_test(x, epsilon, seed, alpha);
  json report;
  report["decision"] = d.reject ? "reject" : "accept";
  report["T_n"] = d.t_n;
  report["threshold"] = d.threshold;
  report["epsilon"] = d.epsilon;
  report["alpha"] = d.alpha;
  std::cout << report.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Clustering of matrix-valued observations under the low-rank mixture model"};
  app.require_subcommand(1);

  CommonFlags flags;

  auto add_common = [&](CLI::App* sub, bool with_trials) {
    sub->add_option("--config", flags.config_path, "JSON config file");
    sub->add_option_function<std::uint64_t>(
        "--seed", [&](const std::uint64_t& v) { flags.seed = v; }, "master seed");
    if (with_trials) {
      sub->add_option_function<int>(
          "--trials", [&](const int& v) { flags.trials = v; }, "number of trials");
    }
  };

  // generate
  auto* gen = app.add_subcommand("generate", "generate a synthetic dataset");
  std::string gen_format = "t3d1", gen_out = "data.t3d1", gen_labels = "labels.csv",
              gen_meta;
  add_common(gen, true);
  gen->add_option("--format", gen_format, "t3d1 or csv")
      ->check(CLI::IsMember({"t3d1", "csv"}));
  gen->add_option("--out", gen_out, "output tensor path (manifest path for csv)");
  gen->add_option("--labels-out", gen_labels, "output labels path");
  gen->add_option("--meta-out", gen_meta, "metadata JSON path (default <out>.meta.json)");

  // cluster
  auto* clu = app.add_subcommand("cluster", "run a clustering pipeline");
  std::string clu_in, clu_method = "lr_lloyd+ts_init", clu_init, clu_truth,
              clu_out = "labels_out.csv";
  lrmm::MethodParams clu_params;
  clu_params.K = 0;
  std::vector<int> clu_ranks;
  add_common(clu, false);
  clu->add_option("--in", clu_in, "input tensor (t3d1 or csv manifest)")->required();
  clu->add_option("--method", clu_method,
                  "algorithm+init, e.g. lr_lloyd+ts_init, rlr_lloyd+rts_init, "
                  "vec_lloyd+kmeans_m3, vec_lloyd+spectral_m3; bare algorithm with --init");
  clu->add_option("--K", clu_params.K, "number of clusters");
  clu->add_option("--ranks", clu_ranks, "per-cluster ranks");
  clu->add_option("--ru", clu_params.r_u, "mode-1 factor rank for ts_init");
  clu->add_option("--rv", clu_params.r_v, "mode-2 factor rank for ts_init");
  clu->add_option("--r1", clu_params.r1, "rank of the strong cluster (rlr variants)");
  clu->add_option("--r2", clu_params.r2, "rank of the weak cluster (rlr variants)");
  clu->add_option("--T", clu_params.T, "Lloyd iterations");
  clu->add_option("--restarts", clu_params.restarts, "k-means restarts");
  clu->add_option("--init", clu_init, "warm-start labels CSV");
  clu->add_option("--truth", clu_truth, "ground-truth labels CSV for per-iteration errors");
  clu->add_option("--out", clu_out, "output labels CSV");

  // evaluate
  auto* eva = app.add_subcommand("evaluate", "compare two labelings");
  std::string eva_a, eva_b;
  int eva_k = 0;
  eva->add_option("a", eva_a, "labels CSV")->required();
  eva->add_option("b", eva_b, "labels CSV")->required();
  eva->add_option("--K", eva_k, "number of clusters (default: largest id)");

  // bench
  auto* ben = app.add_subcommand("bench", "run a benchmark cell");
  std::string ben_csv, ben_json;
  add_common(ben, true);
  ben->add_option("--out", ben_csv, "output CSV path (default stdout)");
  ben->add_option("--json-out", ben_json, "per-trial sidecar JSON path");

  // ranks
  auto* rnk = app.add_subcommand("ranks", "estimate Tucker ranks and K");
  std::string rnk_in, rnk_scree;
  int rnk_rmax = 10, rnk_kmax = 8;
  std::uint64_t rnk_seed = 0;
  rnk->add_option("--in", rnk_in, "input tensor")->required();
  rnk->add_option("--rmax", rnk_rmax, "largest factor rank considered");
  rnk->add_option("--kmax", rnk_kmax, "largest cluster count considered");
  rnk->add_option("--seed", rnk_seed, "seed for the embedded k-means");
  rnk->add_option("--scree-out", rnk_scree, "JSON dump of the singular-value sequences");

  // lrtest
  auto* lrt = app.add_subcommand("lrtest", "sample-splitting detection test");
  std::string lrt_in;
  double lrt_eps = 0.5, lrt_alpha = 0.05;
  std::uint64_t lrt_seed = 0;
  lrt->add_option("--in", lrt_in, "input tensor")->required();
  lrt->add_option("--epsilon", lrt_eps, "split parameter in (0, 1)");
  lrt->add_option("--alpha", lrt_alpha, "test level");
  lrt->add_option("--seed", lrt_seed, "seed for split noise and calibration");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_generate(flags, gen_format, gen_out, gen_labels, gen_meta);
    if (clu->parsed()) {
      if (!clu_ranks.empty()) clu_params.ranks = clu_ranks;
      return cmd_cluster(clu_in, clu_method, flags, clu_params, clu_init, clu_truth, clu_out);
    }
    if (eva->parsed()) return cmd_evaluate(eva_a, eva_b, eva_k);
    if (ben->parsed()) return cmd_bench(flags, ben_csv, ben_json);
    if (rnk->parsed()) return cmd_ranks(rnk_in, rnk_rmax, rnk_kmax, rnk_seed, rnk_scree);
    if (lrt->parsed()) return cmd_lrtest(lrt_in, lrt_eps, lrt_alpha, lrt_seed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
