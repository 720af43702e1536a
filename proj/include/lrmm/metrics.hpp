#pragma once

#include <Eigen/Dense>
#include <vector>

#include "lrmm/model.hpp"

namespace lrmm {

/// Result of permutation-optimal label alignment.
struct AlignmentResult {
  /// permutation[b] is the predicted label matched to true label b.
  std::vector<int> permutation;
  long long hamming = 0;
  double rate = 0.0;
};

/// Exact minimum over all K! permutations of the mislabel count, computed by
/// maximum-agreement assignment on the confusion matrix. Among optimal
/// permutations the lexicographically smallest is returned (exhaustively
/// refined for K <= 16; beyond that one optimal permutation is returned).
AlignmentResult hamming_error(const Labeling& s_hat, const Labeling& s_star, int K);

/// Permutation-minimized sum of squared Frobenius center distances induced
/// by the two labelings over the given centers.
double frob_loss(const Labeling& s_hat, const Labeling& s_star, const CenterSet& cs);

/// K x K counts; entry (a, b) counts indices with s_hat = a and s_star = b.
Eigen::MatrixXi confusion(const Labeling& s_hat, const Labeling& s_star, int K);

namespace detail {

/// Minimum-cost perfect assignment on a square cost matrix (Hungarian
/// algorithm with potentials, O(K^3)). Returns the total cost and the
/// column assigned to each row.
std::pair<double, std::vector<int>> min_assignment(const Matrix& cost);

/// As min_assignment but returns the lexicographically smallest optimal
/// row->column map; `tol` bounds the cost slack treated as a tie.
std::vector<int> lex_min_assignment(const Matrix& cost, double tol);

}  // namespace detail

}  // namespace lrmm
