#pragma once

#include <cstdint>
#include <vector>

#include "lrmm/tensor.hpp"

namespace lrmm {

/// Two tensors built from one dataset by noise injection such that their
/// noise components are independent:
///   x1 = (x + eps^{-1} E~) / sqrt(1 + eps^{-2}),
///   x2 = (x - eps E~)      / sqrt(1 + eps^2),
/// with E~ fresh i.i.d. standard normal.
struct SplitPair {
  Tensor3 x1;
  Tensor3 x2;
  double epsilon;
};

/// Requires 0 < epsilon < 1; E~ is drawn from per-slice substreams of seed.
SplitPair split_samples(const Tensor3& x, double epsilon, std::uint64_t seed);

/// Operator norm of the sign-weighted slice average (1/n) sum_i s_i X_i.
/// Signs must be +-1 with one entry per slice.
double test_statistic(const Tensor3& x1, const std::vector<int>& signs);

/// (1 - alpha) empirical quantile of the null statistic || mean of n i.i.d.
/// standard normal slices ||, from `reps` Monte Carlo draws (sorted values,
/// index floor((1 - alpha) * reps)). Deterministic per seed.
double null_threshold(Eigen::Index d1, Eigen::Index d2, int n, double alpha,
                      std::uint64_t seed, int reps = 1000);

struct ReductionDecision {
  bool reject = false;
  double t_n = 0.0;
  double threshold = 0.0;
  double epsilon = 0.0;
  double alpha = 0.0;
};

/// Detection test for the two-component symmetric model: split the sample,
/// cluster x2 with rts_init followed by rlr_lloyd (rank 1), map the labels
/// to +-1, and reject when the test statistic on x1 exceeds the Monte Carlo
/// calibrated null quantile for these dimensions.
ReductionDecision reduction_test(const Tensor3& x, double epsilon,
                                 std::uint64_t seed, double alpha_level = 0.05);

}  // namespace lrmm
