#pragma once

#include <vector>

#include "lrmm/tensor.hpp"

namespace lrmm {

/// Cluster assignment, 0-based internally (serialized 1-based).
using Labeling = std::vector<int>;

/// The K population center matrices with their nominal ranks.
///
/// For ground-truth sets the numerical rank of each center equals its
/// nominal rank (check with ranks_consistent()); estimated sets may carry
/// centers of lower numerical rank (the relaxed algorithms zero one out).
struct CenterSet {
  std::vector<Matrix> centers;
  std::vector<int> ranks;

  CenterSet() = default;
  CenterSet(std::vector<Matrix> centers_in, std::vector<int> ranks_in);

  int K() const { return static_cast<int>(centers.size()); }
  Eigen::Index d1() const { return centers.front().rows(); }
  Eigen::Index d2() const { return centers.front().cols(); }

  /// True when every center's numerical rank (cutoff 1e-8 * sigma_1)
  /// matches its nominal rank.
  bool ranks_consistent() const;
};

/// Fixed latent labels plus the centers that generated the data.
struct GroundTruth {
  Labeling labels;
  CenterSet center_set;

  GroundTruth() = default;
  GroundTruth(Labeling labels_in, CenterSet centers_in);

  int n() const { return static_cast<int>(labels.size()); }
  std::vector<int> cluster_sizes() const;
  /// Balance factor: min_k n_k / (n / K).
  double alpha() const;
};

/// Minimum pairwise Frobenius distance between centers. Requires K >= 2.
double separation_strength(const CenterSet& cs);

/// Smallest r_k-th singular value over all centers (individual signal
/// strength lambda).
double signal_strength(const CenterSet& cs);

/// Stacks the center of each label into the d1 x d2 x n signal tensor.
Tensor3 signal_tensor(const GroundTruth& gt);

/// Tensor signal strength: the smaller of the least nonzero singular values
/// of the mode-1 and mode-2 matricizations of the signal tensor. "Nonzero"
/// means above 1e-8 times the top singular value of that matricization,
/// since the matricizations are rank-deficient by construction.
double tensor_signal_strength(const GroundTruth& gt);

struct ConditionNumbers {
  double kappa0;  // max_k ||M_k|| / min_k sigma_{r_k}(M_k)
  double kappa1;  // spectral condition number of mode-1 matricization
  double kappa2;  // mode-2 counterpart
};

ConditionNumbers condition_numbers(const GroundTruth& gt);

}  // namespace lrmm
