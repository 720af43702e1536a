#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "lrmm/hyptest.hpp"
#include "lrmm/lowrank.hpp"
#include "lrmm/rng.hpp"
#include "lrmm/synth.hpp"
#include "lrmm/tensor.hpp"

using lrmm::Matrix;
using lrmm::Tensor3;

namespace {

Tensor3 noise_tensor(Eigen::Index d1, Eigen::Index d2, Eigen::Index n, std::uint64_t seed) {
  lrmm::RngStream s(seed);
  Tensor3 t(d1, d2, n);
  for (auto& v : t.data()) v = s.next_gaussian();
  return t;
}

}  // namespace

TEST_CASE("split of a zero-signal tensor has unit variance components") {
  // Zero signal means pure unit noise; only then do both components carry
  // unit variance (a literally zero tensor makes both proportional to the
  // injected noise).
  const Tensor3 null_data = noise_tensor(50, 50, 200, 69);
  const auto pair = lrmm::split_samples(null_data, 0.5, 70);
  for (const Tensor3* t : {&pair.x1, &pair.x2}) {
    double sum = 0.0, sum2 = 0.0;
    for (double v : t->data()) {
      sum += v;
      sum2 += v * v;
    }
    const double count = static_cast<double>(t->size());
    const double var = sum2 / count - (sum / count) * (sum / count);
    CHECK(var >= 0.95);
    CHECK(var <= 1.05);
  }
}

TEST_CASE("split components reconstruct the injected noise") {
  const Tensor3 x = noise_tensor(6, 5, 8, 71);
  const double eps = 0.37;
  const auto pair = lrmm::split_samples(x, eps, 72);
  const double a = std::sqrt(1.0 + 1.0 / (eps * eps));
  const double b = std::sqrt(1.0 + eps * eps);
  for (std::size_t i = 0; i < x.data().size(); ++i) {
    const double e_from_x1 = (pair.x1.data()[i] * a - x.data()[i]) * eps;
    const double e_from_x2 = (x.data()[i] - pair.x2.data()[i] * b) / eps;
    CHECK(e_from_x1 == doctest::Approx(e_from_x2).epsilon(1e-9));
  }
}

TEST_CASE("split components are empirically uncorrelated under the null") {
  const Tensor3 null_data = noise_tensor(50, 50, 200, 73);
  const auto pair = lrmm::split_samples(null_data, 0.5, 73);
  double sx = 0.0, sy = 0.0, sxx = 0.0, syy = 0.0, sxy = 0.0;
  const double count = static_cast<double>(null_data.size());
  for (std::size_t i = 0; i < null_data.data().size(); ++i) {
    const double xv = pair.x1.data()[i];
    const double yv = pair.x2.data()[i];
    sx += xv;
    sy += yv;
    sxx += xv * xv;
    syy += yv * yv;
    sxy += xv * yv;
  }
  const double cov = sxy / count - (sx / count) * (sy / count);
  const double vx = sxx / count - (sx / count) * (sx / count);
  const double vy = syy / count - (sy / count) * (sy / count);
  CHECK(std::abs(cov / std::sqrt(vx * vy)) < 0.05);
}

TEST_CASE("split rejects epsilon outside (0, 1)") {
  const Tensor3 zero(2, 2, 2);
  CHECK_THROWS_AS(lrmm::split_samples(zero, 0.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(lrmm::split_samples(zero, 1.0, 1), std::invalid_argument);
}

TEST_CASE("test statistic of constant slices is the operator norm") {
  lrmm::RngStream s(74);
  Matrix a(5, 4);
  for (int i = 0; i < 20; ++i) a(i / 4, i % 4) = s.next_gaussian();
  std::vector<Matrix> slices(6, a);
  const Tensor3 x = lrmm::stack(slices);
  const std::vector<int> plus(6, 1);
  CHECK(lrmm::test_statistic(x, plus) ==
        doctest::Approx(lrmm::singular_values(a)(0)).epsilon(1e-12));

  // Alternating signs over identical slices cancel exactly.
  std::vector<int> alternating = {1, -1, 1, -1, 1, -1};
  CHECK(lrmm::test_statistic(x, alternating) == 0.0);

  CHECK_THROWS_AS(lrmm::test_statistic(x, std::vector<int>(6, 2)), std::invalid_argument);
  CHECK_THROWS_AS(lrmm::test_statistic(x, std::vector<int>(5, 1)), std::invalid_argument);
}

TEST_CASE("test statistic is sign-flip invariant and scales linearly") {
  const Tensor3 x = noise_tensor(8, 8, 10, 75);
  lrmm::RngStream s(76);
  std::vector<int> signs(10);
  for (auto& v : signs) v = s.next_bernoulli(0.5) ? 1 : -1;
  std::vector<int> flipped = signs;
  for (auto& v : flipped) v = -v;
  const double t = lrmm::test_statistic(x, signs);
  CHECK(lrmm::test_statistic(x, flipped) == doctest::Approx(t).epsilon(1e-12));

  Tensor3 scaled = x;
  for (auto& v : scaled.data()) v *= 3.0;
  CHECK(lrmm::test_statistic(scaled, signs) == doctest::Approx(3.0 * t).epsilon(1e-12));
}

TEST_CASE("null statistic concentrates near 2 sqrt(d/n)") {
  const double threshold = lrmm::null_threshold(40, 40, 100, 0.05, 77, 500);
  const double scale = 2.0 * std::sqrt(40.0 / 100.0);
  CHECK(threshold > 0.9 * scale);
  CHECK(threshold < 1.2 * scale);
}

TEST_CASE("null distribution does not depend on the label vector") {
  const int seeds = 400;
  const Eigen::Index d = 30, n = 50;
  std::vector<int> labels_a(n, 1);
  std::vector<int> labels_b(n);
  for (Eigen::Index i = 0; i < n; ++i) labels_b[i] = (i % 2 == 0) ? 1 : -1;
  std::vector<double> ta, tb;
  for (int seed = 0; seed < seeds; ++seed) {
    const Tensor3 x = noise_tensor(d, d, n, 7700 + seed);
    ta.push_back(lrmm::test_statistic(x, labels_a));
    tb.push_back(lrmm::test_statistic(x, labels_b));
  }
  std::sort(ta.begin(), ta.end());
  std::sort(tb.begin(), tb.end());
  // Two-sample Kolmogorov-Smirnov distance between the empirical laws.
  double ks = 0.0;
  std::size_t ia = 0, ib = 0;
  while (ia < ta.size() && ib < tb.size()) {
    if (ta[ia] <= tb[ib]) ++ia;
    else ++ib;
    ks = std::max(ks, std::abs(static_cast<double>(ia) / ta.size() -
                               static_cast<double>(ib) / tb.size()));
  }
  CHECK(ks < 0.1);
}

TEST_CASE("reduction test accepts under the null and zero slices score zero") {
  // The statistic is exactly zero on an all-zero first component.
  const Tensor3 zero(20, 20, 40);
  const std::vector<int> plus(40, 1);
  CHECK(lrmm::test_statistic(zero, plus) == 0.0);
  // A pure-noise dataset is accepted (the calibrated level keeps false
  // rejections rare; this fixed seed accepts).
  const Tensor3 null_data = noise_tensor(20, 20, 40, 78);
  const auto decision = lrmm::reduction_test(null_data, 0.5, 78);
  CHECK(!decision.reject);
}

TEST_CASE("reduction test rejects a strong rank-one signal") {
  // Symmetric two-component instance with Lambda = 6 sqrt(d): well above the
  // computational threshold, a single seed must reject.
  const Eigen::Index d = 30;
  const int n = 100;
  const double lam = 6.0 * std::sqrt(static_cast<double>(d)) / std::sqrt(double(n));
  lrmm::RngStream s(79);
  Matrix u(d, 1), v(d, 1);
  for (Eigen::Index i = 0; i < d; ++i) {
    u(i, 0) = s.next_bernoulli(0.5) ? 1.0 : -1.0;
    v(i, 0) = s.next_bernoulli(0.5) ? 1.0 : -1.0;
  }
  u /= std::sqrt(static_cast<double>(d));
  v /= std::sqrt(static_cast<double>(d));
  const Matrix m = lam * u * v.transpose();
  Tensor3 x(d, d, n);
  for (int i = 0; i < n; ++i) {
    const double sign = s.next_bernoulli(0.5) ? 1.0 : -1.0;
    for (Eigen::Index a = 0; a < d; ++a)
      for (Eigen::Index b = 0; b < d; ++b)
        x(a, b, i) = sign * m(a, b) + s.next_gaussian();
  }
  const auto decision = lrmm::reduction_test(x, 0.5, 80);
  CHECK(decision.reject);
}
