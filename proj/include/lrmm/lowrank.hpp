#pragma once

#include <Eigen/Dense>

#include "lrmm/tensor.hpp"

namespace lrmm {

/// Top-r singular triplets of a matrix.
///
/// Columns of u and v are orthonormal; sigma is nonincreasing and
/// nonnegative. Sign convention: in each column of u the entry of largest
/// absolute value is nonnegative (ties resolved to the lowest row index),
/// with the matching column of v flipped alongside.
struct TruncatedSVD {
  Matrix u;      // d1 x r
  Vector sigma;  // r
  Matrix v;      // d2 x r
};

/// Exact dense truncated SVD. Requires 1 <= r <= min(rows, cols) and finite
/// entries.
TruncatedSVD truncated_svd(const Matrix& a, int r);

/// Frobenius-optimal rank-<=r approximation (Eckart-Young). Components with
/// sigma_i <= 1e-10 * sigma_1 are dropped from the reconstruction.
Matrix best_rank_r(const Matrix& a, int r);

/// All singular values of a (possibly very wide/tall) matrix, nonincreasing.
/// Wide inputs are reduced by a QR factorization of the transpose first, so
/// the cost is O(max_dim * min_dim^2) at full accuracy.
Vector singular_values(const Matrix& a);

/// Top-r left singular vectors plus all singular values; same reduction as
/// singular_values. No sign convention is applied (callers use the span).
std::pair<Matrix, Vector> left_singular_vectors(const Matrix& a, int r);

/// Scree elbow: argmax over i in [1, min(r_max, len-1)] of
/// sigma_i / (sigma_{i+1} + 1e-8 * sigma_1), 1-based, ties to the smaller i.
/// A single value (or an all-zero leading value) degenerates to rank 1.
int elbow_rank(const Vector& sigma, int r_max);

}  // namespace lrmm
