#include "lrmm/hyptest.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lrmm/cluster.hpp"
#include "lrmm/rng.hpp"

namespace lrmm {

namespace {

// Top singular value through the smaller Gram matrix; calibration and the
// statistic see the same arithmetic.
double operator_norm(const Matrix& a) {
  const Matrix g = (a.rows() <= a.cols()) ? Matrix(a * a.transpose())
                                          : Matrix(a.transpose() * a);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(g, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, eig.eigenvalues().maxCoeff()));
}

}  // namespace

SplitPair split_samples(const Tensor3& x, double epsilon, std::uint64_t seed) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw std::invalid_argument("split_samples: epsilon must be in (0, 1)");
  }
  const double inv_eps = 1.0 / epsilon;
  const double scale1 = 1.0 / std::sqrt(1.0 + inv_eps * inv_eps);
  const double scale2 = 1.0 / std::sqrt(1.0 + epsilon * epsilon);
  Tensor3 x1(x.d1(), x.d2(), x.n());
  Tensor3 x2(x.d1(), x.d2(), x.n());
  RngStream root = RngStream(seed).child("split");
  for (Eigen::Index i = 0; i < x.n(); ++i) {
    RngStream s = root.child(static_cast<std::uint64_t>(i));
    for (Eigen::Index a = 0; a < x.d1(); ++a) {
      for (Eigen::Index b = 0; b < x.d2(); ++b) {
        const double e = s.next_gaussian();
        const double v = x(a, b, i);
        x1(a, b, i) = (v + inv_eps * e) * scale1;
        x2(a, b, i) = (v - epsilon * e) * scale2;
      }
    }
  }
  return {std::move(x1), std::move(x2), epsilon};
}

double test_statistic(const Tensor3& x1, const std::vector<int>& signs) {
  if (static_cast<Eigen::Index>(signs.size()) != x1.n()) {
    throw std::invalid_argument("test_statistic: one sign per slice required");
  }
  Matrix avg = Matrix::Zero(x1.d1(), x1.d2());
  for (Eigen::Index i = 0; i < x1.n(); ++i) {
    const int s = signs[i];
    if (s != 1 && s != -1) {
      throw std::invalid_argument("test_statistic: signs must be +-1");
    }
    avg += static_cast<double>(s) * x1.slice_view(i);
  }
  avg /= static_cast<double>(x1.n());
  if (avg.isZero(0.0)) return 0.0;
  return operator_norm(avg);
}

double null_threshold(Eigen::Index d1, Eigen::Index d2, int n, double alpha,
                      std::uint64_t seed, int reps) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("null_threshold: alpha must be in (0, 1)");
  }
  if (reps < 1) throw std::invalid_argument("null_threshold: reps must be >= 1");
  // Under the null the statistic is the top singular value of a matrix of
  // i.i.d. N(0, 1/n) entries, so one standard normal draw per rep suffices.
  RngStream root = RngStream(seed).child("calibration");
  std::vector<double> stats(reps);
  const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
  for (int rep = 0; rep < reps; ++rep) {
    RngStream s = root.child(static_cast<std::uint64_t>(rep));
    Matrix g(d1, d2);
    for (Eigen::Index a = 0; a < d1; ++a)
      for (Eigen::Index b = 0; b < d2; ++b) g(a, b) = s.next_gaussian();
    stats[rep] = operator_norm(g) * inv_sqrt_n;
  }
  std::sort(stats.begin(), stats.end());
  const int idx = std::min<int>(reps - 1, static_cast<int>(std::floor((1.0 - alpha) * reps)));
  return stats[idx];
}

ReductionDecision reduction_test(const Tensor3& x, double epsilon,
                                 std::uint64_t seed, double alpha_level) {
  RngStream root(seed);
  const SplitPair pair = split_samples(x, epsilon, root.child("noise").key());

  const Labeling init = rts_init(pair.x2, 1, root.child("init").key());
  const LloydResult res = rlr_lloyd(pair.x2, init, 1, 1, 20);
  std::vector<int> signs(res.labels.size());
  for (std::size_t i = 0; i < res.labels.size(); ++i) {
    signs[i] = res.labels[i] == 0 ? 1 : -1;
  }

  ReductionDecision out;
  out.epsilon = epsilon;
  out.alpha = alpha_level;
  out.t_n = test_statistic(pair.x1, signs);
  out.threshold = null_threshold(x.d1(), x.d2(), static_cast<int>(x.n()), alpha_level,
                                 root.child("threshold").key());
  out.reject = out.t_n > out.threshold;
  return out;
}

}  // namespace lrmm
