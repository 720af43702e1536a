#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "lrmm/cluster.hpp"
#include "lrmm/synth.hpp"

namespace lrmm {

/// One benchmark cell: a synthetic setting plus the algorithm roster run on
/// it. Loaded from JSON; command-line flags override individual fields.
struct ExperimentConfig {
  std::string setting = "custom";  // s1_1 | s1_2 | s2_1 | s2_2 | custom
  Eigen::Index d1 = 50, d2 = 50;
  int n = 200;
  int K = 2;
  std::vector<int> ranks;
  double lambda = 0.0;
  double delta_param = 0.0;
  double pbar = 0.0;
  double noise_sd = 1.0;
  std::vector<std::vector<double>> singular_values;  // custom recipe
  int trials = 1;
  std::uint64_t master_seed = 0;
  std::vector<std::string> methods;
  int T = 20;
  int restarts = 20;
  int r_u = 0;  // 0 = setting-specific default
  int r_v = 0;
  std::string out_csv;
  std::string out_json;

  void validate() const;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

/// Factor ranks fed to ts_init when the config leaves them automatic.
std::pair<int, int> init_ranks(const ExperimentConfig& cfg);

/// Builds the generator inputs for one cell (LrMM settings only).
LrMMSpec make_lrmm_spec(const ExperimentConfig& cfg);
MMSBMSpec make_mmsbm_spec(const ExperimentConfig& cfg);

/// Generates one dataset for the cell from the given seed.
std::pair<Tensor3, GroundTruth> generate_dataset(const ExperimentConfig& cfg,
                                                 std::uint64_t seed);

struct MethodParams {
  std::vector<int> ranks;
  int K = 2;
  int r_u = 0, r_v = 0;
  int r1 = 0, r2 = 0;
  int T = 20;
  int restarts = 20;
};

/// Runs "algorithm+init" (or a bare algorithm when warm_init is given).
/// Algorithms: lr_lloyd, vec_lloyd, rlr_lloyd.
/// Inits: ts_init, rts_init, kmeans_m3, spectral_m3.
LloydResult run_pipeline(const std::string& method, const Tensor3& x,
                         const MethodParams& params, std::uint64_t seed,
                         const GroundTruth* gt = nullptr,
                         const Labeling* warm_init = nullptr);

struct BenchRow {
  std::string method;
  double mean_error = 0.0;
  double std_error = 0.0;
};

struct BenchResult {
  std::vector<BenchRow> rows;
  std::vector<std::vector<double>> errors_per_method;  // [method][trial]
  std::vector<double> delta_per_trial;
};

/// Runs the roster over `trials` independently generated datasets. Trials
/// run in parallel (max_threads, 0 = hardware) on derived streams and are
/// aggregated in trial order, so output does not depend on the thread count.
BenchResult run_bench(const ExperimentConfig& cfg, int max_threads);

/// Deterministic CSV: fixed column order, 17-significant-digit floats.
std::string bench_csv(const ExperimentConfig& cfg, const BenchResult& result);

/// Per-trial raw errors for plotting.
nlohmann::json bench_sidecar(const ExperimentConfig& cfg, const BenchResult& result);

/// Static-partition parallel loop used by the harness (max_threads 0 = auto).
void parallel_for(int count, int max_threads, const std::function<void(int)>& fn);

}  // namespace lrmm
