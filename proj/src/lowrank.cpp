#include "lrmm/lowrank.hpp"

#include <Eigen/QR>
#include <Eigen/SVD>
#include <cmath>
#include <stdexcept>

namespace lrmm {

namespace {

void check_input(const Matrix& a, int r) {
  if (r < 1 || r > std::min(a.rows(), a.cols())) {
    throw std::invalid_argument("rank r out of range");
  }
  if (!a.allFinite()) {
    throw std::invalid_argument("matrix has non-finite entries");
  }
}

// Reduces a wide matrix to a square factor with the same singular values and
// left singular vectors: a = R^T Q^T with a^T = Q R, so svd(R^T) carries both.
Eigen::BDCSVD<Matrix> reduced_svd(const Matrix& a, unsigned options) {
  if (a.cols() > 2 * a.rows()) {
    Eigen::HouseholderQR<Matrix> qr(a.transpose());
    Matrix r_factor = qr.matrixQR()
                          .topRows(a.rows())
                          .template triangularView<Eigen::Upper>();
    return Eigen::BDCSVD<Matrix>(r_factor.transpose(), options);
  }
  return Eigen::BDCSVD<Matrix>(a, options);
}

}  // namespace

TruncatedSVD truncated_svd(const Matrix& a, int r) {
  check_input(a, r);
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  TruncatedSVD out;
  out.u = svd.matrixU().leftCols(r);
  out.v = svd.matrixV().leftCols(r);
  out.sigma = svd.singularValues().head(r);
  // Fix signs: largest-magnitude entry of each u column made nonnegative.
  for (int j = 0; j < r; ++j) {
    Eigen::Index pivot = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < out.u.rows(); ++i) {
      const double mag = std::abs(out.u(i, j));
      if (mag > best) {
        best = mag;
        pivot = i;
      }
    }
    if (out.u(pivot, j) < 0.0) {
      out.u.col(j) = -out.u.col(j);
      out.v.col(j) = -out.v.col(j);
    }
  }
  return out;
}

Matrix best_rank_r(const Matrix& a, int r) {
  TruncatedSVD f = truncated_svd(a, r);
  const double cutoff = 1e-10 * f.sigma(0);
  int keep = 0;
  while (keep < r && f.sigma(keep) > cutoff) ++keep;
  if (keep == 0) return Matrix::Zero(a.rows(), a.cols());
  return f.u.leftCols(keep) * f.sigma.head(keep).asDiagonal() *
         f.v.leftCols(keep).transpose();
}

Vector singular_values(const Matrix& a) {
  if (!a.allFinite()) {
    throw std::invalid_argument("matrix has non-finite entries");
  }
  if (a.rows() > a.cols()) {
    return reduced_svd(a.transpose(), 0).singularValues();
  }
  return reduced_svd(a, 0).singularValues();
}

std::pair<Matrix, Vector> left_singular_vectors(const Matrix& a, int r) {
  check_input(a, r);
  auto svd = reduced_svd(a, Eigen::ComputeThinU);
  return {svd.matrixU().leftCols(r), svd.singularValues()};
}

int elbow_rank(const Vector& sigma, int r_max) {
  if (sigma.size() == 0) {
    throw std::invalid_argument("elbow_rank: empty spectrum");
  }
  if (r_max < 1) {
    throw std::invalid_argument("elbow_rank: r_max must be >= 1");
  }
  const int len = static_cast<int>(sigma.size());
  if (len == 1 || sigma(0) <= 0.0) return 1;
  const double eps_floor = 1e-8 * sigma(0);
  int best_i = 1;
  double best_ratio = -1.0;
  const int hi = std::min(r_max, len - 1);
  for (int i = 1; i <= hi; ++i) {
    const double ratio = sigma(i - 1) / (sigma(i) + eps_floor);
    if (ratio > best_ratio) {
      best_ratio = ratio;
      best_i = i;
    }
  }
  return best_i;
}

}  // namespace lrmm
