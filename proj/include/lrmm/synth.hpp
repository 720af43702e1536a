#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lrmm/model.hpp"
#include "lrmm/rng.hpp"
#include "lrmm/tensor.hpp"

namespace lrmm {

/// How the population centers of a synthetic LrMM instance are built.
/// Use the factory functions; fields not covered by the chosen kind stay
/// unset, so inconsistent parameter combinations cannot be expressed.
struct CenterRecipe {
  enum class Kind { RandomFactors, S21, S22, Explicit };
  Kind kind = Kind::RandomFactors;
  std::vector<std::vector<double>> singular_values;  // RandomFactors
  double lambda = 0.0;                               // S21 / S22
  double delta_param = 0.0;                          // S21
  std::vector<Matrix> matrices;                      // Explicit

  /// Independent random factors per cluster with the given singular values
  /// (each list positive and nonincreasing).
  static CenterRecipe random_factors(std::vector<std::vector<double>> values);

  /// Shared-subspace pair: M1 = U S V^T with S = diag(1.2, 1.1, 1) * lambda,
  /// M2 = U (S + (delta/3) I) V^T. Separation is delta / sqrt(3).
  static CenterRecipe s2_1(double lambda, double delta_param);

  /// Weak second cluster: S1 = diag(1.2, 1.1, 1) * lambda with independent
  /// random factors, S2 fixed at diag(0.36, 0.33, 0.30).
  static CenterRecipe s2_2(double lambda);

  static CenterRecipe explicit_centers(std::vector<Matrix> matrices);
};

enum class NoiseKind { None, Gaussian };

/// Full description of one synthetic LrMM instance.
struct LrMMSpec {
  Eigen::Index d1 = 0, d2 = 0;
  int n = 0;
  int K = 0;
  std::vector<int> ranks;            // one per cluster
  std::optional<Labeling> labels;    // explicit labels, else i.i.d. uniform
  NoiseKind noise = NoiseKind::Gaussian;
  double noise_sd = 1.0;
  CenterRecipe recipe;
};

/// Mixture multi-layer SBM instance (layers are symmetric Bernoulli
/// adjacency matrices with zeroed diagonals). Connection matrices are
/// B_k = pbar_k I + (pbar_k / 2)(J - I) with pbar_k = pbar * k / K; the
/// invariant 1.5 * pbar <= 1 keeps every probability in [0, 1].
struct MMSBMSpec {
  int K = 0;
  int d = 0;      // nodes per layer
  double pbar = 0.0;
  int n = 0;      // layers
  std::optional<Labeling> labels;                      // layer labels
  std::optional<std::vector<Labeling>> node_labels;    // per-cluster node blocks
};

/// d x r matrix with orthonormal columns, deterministic per seed (QR of an
/// i.i.d. standard normal matrix with nonnegative R diagonal).
Matrix random_orthonormal(Eigen::Index d, int r, std::uint64_t seed);

/// Generates data and ground truth from the spec; bit-identical outputs for
/// identical (spec, seed). Noise slices draw from per-slice substreams.
std::pair<Tensor3, GroundTruth> gen_lrmm(const LrMMSpec& spec, std::uint64_t seed);

/// MMSBM generator. Node memberships default to independent uniform draws
/// per cluster (explicit memberships may be supplied); the ground truth
/// carries the Bernoulli-mean matrices Z_k B_k Z_k^T.
std::pair<Tensor3, GroundTruth> gen_mmsbm(const MMSBMSpec& spec, std::uint64_t seed);

/// One symmetric adjacency draw: upper triangle Bernoulli(mean), mirrored,
/// zero diagonal. Exposed for direct testing of the sampler.
Matrix sample_symmetric_adjacency(const Matrix& mean, RngStream& stream);

}  // namespace lrmm
