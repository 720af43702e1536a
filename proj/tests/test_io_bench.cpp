#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <string>

#include "lrmm/bench.hpp"
#include "lrmm/io.hpp"
#include "lrmm/rng.hpp"
#include "lrmm/synth.hpp"

using lrmm::Tensor3;

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("lrmm_test_" + std::to_string(std::rand()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

Tensor3 random_tensor(std::uint64_t seed) {
  lrmm::RngStream s(seed);
  Tensor3 t(4, 3, 5);
  for (auto& v : t.data()) v = s.next_gaussian() * 1e3;
  return t;
}

lrmm::ExperimentConfig tiny_cell() {
  lrmm::ExperimentConfig cfg;
  cfg.setting = "s2_1";
  cfg.d1 = cfg.d2 = 16;
  cfg.n = 30;
  cfg.K = 2;
  cfg.ranks = {3, 3};
  cfg.lambda = 6.0;
  cfg.delta_param = 8.0;
  cfg.trials = 6;
  cfg.master_seed = 99;
  cfg.methods = {"lr_lloyd+ts_init", "vec_lloyd+kmeans_m3"};
  cfg.T = 5;
  cfg.restarts = 5;
  return cfg;
}

}  // namespace

TEST_CASE("t3d1 round trip is bit exact") {
  TempDir dir;
  const Tensor3 t = random_tensor(81);
  const std::string path = dir.file("x.t3d1");
  lrmm::write_t3d1(path, t);
  const Tensor3 back = lrmm::read_t3d1(path);
  CHECK(back.d1() == t.d1());
  CHECK(back.d2() == t.d2());
  CHECK(back.n() == t.n());
  CHECK(back.data() == t.data());
  CHECK_THROWS(lrmm::read_t3d1(dir.file("missing.t3d1")));
}

TEST_CASE("csv slice round trip is exact") {
  TempDir dir;
  const Tensor3 t = random_tensor(82);
  const std::string manifest = dir.file("x.json");
  lrmm::write_slices_csv(manifest, t);
  const Tensor3 back = lrmm::read_slices_csv(manifest);
  CHECK(back.data() == t.data());
  // Auto-detection keys on the magic bytes.
  const Tensor3 auto_back = lrmm::read_tensor_auto(manifest);
  CHECK(auto_back.data() == t.data());
}

TEST_CASE("labels round trip with 1-based serialization") {
  TempDir dir;
  const lrmm::Labeling labels = {0, 2, 1, 1, 0};
  const std::string path = dir.file("labels.csv");
  lrmm::write_labels_csv(path, labels);
  CHECK(lrmm::read_labels_csv(path) == labels);

  std::FILE* f = std::fopen(dir.file("bad.csv").c_str(), "w");
  std::fputs("1\n2\n", f);
  std::fclose(f);
  CHECK_THROWS(lrmm::read_labels_csv(dir.file("bad.csv")));
}

TEST_CASE("format_double survives a parse round trip") {
  for (double v : {1.0, -0.1, 3.141592653589793, 1e-300, 12345.6789012345678}) {
    CHECK(std::stod(lrmm::format_double(v)) == v);
  }
}

TEST_CASE("config JSON round trip and defaults") {
  nlohmann::json j;
  j["setting"] = "s2_1";
  j["lambda"] = 10.0;
  j["delta_param"] = 5.0;
  j["trials"] = 3;
  j["methods"] = {"lr_lloyd+ts_init"};
  const auto cfg = lrmm::config_from_json(j);
  CHECK(cfg.K == 2);
  CHECK(cfg.ranks == std::vector<int>{3, 3});
  CHECK(lrmm::init_ranks(cfg).first == 3);
  cfg.validate();

  nlohmann::json bad = j;
  bad["setting"] = "s2_2";
  CHECK_THROWS(lrmm::config_from_json(bad).validate());  // delta_param elsewhere
}

TEST_CASE("bench output is independent of the thread count") {
  const auto cfg = tiny_cell();
  const auto a = lrmm::run_bench(cfg, 1);
  const auto b = lrmm::run_bench(cfg, 4);
  CHECK(lrmm::bench_csv(cfg, a) == lrmm::bench_csv(cfg, b));
  CHECK(lrmm::bench_sidecar(cfg, a).dump() == lrmm::bench_sidecar(cfg, b).dump());
}

TEST_CASE("noiseless cells report zero error for spectral pipelines") {
  lrmm::ExperimentConfig cfg = tiny_cell();
  cfg.noise_sd = 0.0;
  cfg.trials = 2;
  cfg.methods = {"lr_lloyd+ts_init"};
  const auto result = lrmm::run_bench(cfg, 1);
  CHECK(result.rows[0].mean_error == 0.0);
}

TEST_CASE("run_pipeline rejects unknown methods") {
  auto [x, gt] = lrmm::generate_dataset(tiny_cell(), 1);
  lrmm::MethodParams params;
  params.ranks = {3, 3};
  params.K = 2;
  params.r_u = params.r_v = 3;
  params.r1 = params.r2 = 3;
  CHECK_THROWS(lrmm::run_pipeline("foo_lloyd+ts_init", x, params, 1));
  CHECK_THROWS(lrmm::run_pipeline("lr_lloyd+bad_init", x, params, 1));
  CHECK_THROWS(lrmm::run_pipeline("lr_lloyd", x, params, 1));  // needs warm start
}
