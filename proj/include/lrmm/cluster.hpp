#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lrmm/model.hpp"
#include "lrmm/tensor.hpp"

namespace lrmm {

struct KMeansResult {
  Labeling labels;
  Matrix centroids;  // K x p, row k is the mean of its assigned rows
  double objective = 0.0;
};

/// Lloyd iterations with k-means++ seeding, best objective over `restarts`
/// independent runs. Deterministic for fixed (seed, restarts); labels are
/// assigned to the smallest index among tied centroids, empty clusters are
/// repaired by moving the point farthest from its current centroid (from a
/// cluster of size >= 2, ties to the smallest point index). Each run stops
/// when labels stabilize or after 100 iterations.
KMeansResult kmeans_rows(const Matrix& x, int K, std::uint64_t seed, int restarts);

/// Per-iteration record of a Lloyd run. Entry 0 holds the initial labels;
/// error_per_iter carries aligned Hamming rates when ground truth is given.
/// converged_at is the first iteration whose relabeling was a fixed point
/// (1-based), or empty if iterations were exhausted or a cycle was cut.
struct LloydTrace {
  std::vector<Labeling> labels_per_iter;
  std::vector<double> error_per_iter;
  std::optional<int> converged_at;
};

struct LloydResult {
  Labeling labels;
  CenterSet centers;
  LloydTrace trace;
};

/// Low-rank Lloyd: per iteration the center of cluster k is the best
/// rank-r_k approximation of the within-cluster average, then every slice is
/// reassigned to the nearest center in squared Frobenius distance (ties to
/// the smallest cluster index). Stops early when the label vector repeats.
LloydResult lr_lloyd(const Tensor3& x, const Labeling& init,
                     const std::vector<int>& ranks, int T,
                     const GroundTruth* gt = nullptr);

/// Vanilla Lloyd baseline: centers are plain within-cluster averages.
LloydResult vec_lloyd(const Tensor3& x, const Labeling& init, int K, int T,
                      const GroundTruth* gt = nullptr);

/// Two-cluster relaxed Lloyd: both rank-truncated averages are computed and
/// the one with the smaller top singular value is replaced by zero, swapping
/// names so cluster 1 always holds the stronger center. An exact tie keeps
/// the current naming.
LloydResult rlr_lloyd(const Tensor3& x, const Labeling& init, int r1, int r2,
                      int T, const GroundTruth* gt = nullptr);

/// Tensor-based spectral initialization: HOSVD factors of modes 1 and 2,
/// projection of every slice onto their span, then k-means on the projected
/// rows of the mode-3 matricization.
Labeling ts_init(const Tensor3& x, int r_u, int r_v, int K, std::uint64_t seed,
                 int restarts = 20);

/// Relaxed variant: rank r1 on both sides, K fixed at 2. Identical to
/// ts_init(x, r1, r1, 2, seed, restarts).
Labeling rts_init(const Tensor3& x, int r1, std::uint64_t seed, int restarts = 20);

/// k-means directly on the (vectorized) mode-3 rows, low-rank structure
/// ignored. The baseline initializer from the benchmark tables.
Labeling kmeans_m3_init(const Tensor3& x, int K, std::uint64_t seed, int restarts = 20);

/// Spectral clustering on the mode-3 rows: k-means over the projection onto
/// the top-K singular directions of the n x (d1 d2) data matrix.
Labeling spectral_m3_init(const Tensor3& x, int K, std::uint64_t seed, int restarts = 20);

struct RankEstimate {
  int r_u = 0;
  int r_v = 0;
  int K = 0;
  std::vector<int> cluster_ranks;
};

/// Scree sequences backing a rank estimate, for plotting.
struct ScreeData {
  Vector mode1;
  Vector mode2;
  Vector core_mode3;
  std::vector<Vector> cluster_means;
};

/// Scree-based estimation of (r_U, r_V, K, r_k): elbows of the mode-1/2
/// spectra of the data tensor, the mode-3 spectrum of the projected core,
/// and per-cluster spectra of the sample averages under a ts_init clustering
/// with the estimated parameters.
RankEstimate estimate_ranks(const Tensor3& x, int r_max, int k_max,
                            std::uint64_t seed, ScreeData* scree = nullptr);

}  // namespace lrmm
