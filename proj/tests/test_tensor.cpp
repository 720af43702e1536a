#include <doctest.h>

#include <array>
#include <cmath>
#include <limits>

#include "lrmm/rng.hpp"
#include "lrmm/tensor.hpp"

using lrmm::Matrix;
using lrmm::Tensor3;

namespace {

Tensor3 random_tensor(Eigen::Index d1, Eigen::Index d2, Eigen::Index n, std::uint64_t seed) {
  lrmm::RngStream s(seed);
  Tensor3 t(d1, d2, n);
  for (Eigen::Index k = 0; k < n; ++k)
    for (Eigen::Index i = 0; i < d1; ++i)
      for (Eigen::Index j = 0; j < d2; ++j) t(i, j, k) = s.next_gaussian();
  return t;
}

Matrix random_matrix(Eigen::Index r, Eigen::Index c, std::uint64_t seed) {
  lrmm::RngStream s(seed);
  Matrix m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = s.next_gaussian();
  return m;
}

}  // namespace

TEST_CASE("matricize of a 1x1x1 tensor is the scalar in any mode") {
  Tensor3 t(1, 1, 1);
  t(0, 0, 0) = 4.25;
  for (int mode = 1; mode <= 3; ++mode) {
    const Matrix m = lrmm::matricize(t, mode);
    CHECK(m.rows() == 1);
    CHECK(m.cols() == 1);
    CHECK(m(0, 0) == 4.25);
  }
}

TEST_CASE("matricize shapes") {
  const Tensor3 t = random_tensor(5, 4, 3, 1);
  CHECK(lrmm::matricize(t, 1).rows() == 5);
  CHECK(lrmm::matricize(t, 1).cols() == 12);
  CHECK(lrmm::matricize(t, 2).rows() == 4);
  CHECK(lrmm::matricize(t, 2).cols() == 15);
  CHECK(lrmm::matricize(t, 3).rows() == 3);
  CHECK(lrmm::matricize(t, 3).cols() == 20);
  CHECK_THROWS_AS(lrmm::matricize(t, 0), std::invalid_argument);
  CHECK_THROWS_AS(lrmm::matricize(t, 4), std::invalid_argument);
}

TEST_CASE("mode-1 matricization of a 2x2x2 tensor matches the index formula") {
  Tensor3 t(2, 2, 2);
  double v = 1.0;
  for (Eigen::Index i3 = 0; i3 < 2; ++i3)
    for (Eigen::Index i1 = 0; i1 < 2; ++i1)
      for (Eigen::Index i2 = 0; i2 < 2; ++i2) t(i1, i2, i3) = v++;
  const Matrix m = lrmm::matricize(t, 1);
  // Independent enumeration of (i1, (i2-1)*n + i3), 1-based.
  const Eigen::Index n = 2;
  for (Eigen::Index i1 = 1; i1 <= 2; ++i1) {
    for (Eigen::Index i2 = 1; i2 <= 2; ++i2) {
      for (Eigen::Index i3 = 1; i3 <= 2; ++i3) {
        CHECK(m(i1 - 1, (i2 - 1) * n + i3 - 1) == t(i1 - 1, i2 - 1, i3 - 1));
      }
    }
  }
}

TEST_CASE("fold inverts matricize in every mode") {
  const Tensor3 t = random_tensor(4, 3, 5, 2);
  for (int mode = 1; mode <= 3; ++mode) {
    const Tensor3 back = lrmm::fold(lrmm::matricize(t, mode), mode, 4, 3, 5);
    REQUIRE(back.size() == t.size());
    for (std::size_t i = 0; i < t.data().size(); ++i) {
      CHECK(back.data()[i] == t.data()[i]);
    }
  }
}

TEST_CASE("matricization preserves the Frobenius norm") {
  const Tensor3 t = random_tensor(3, 6, 4, 3);
  for (int mode = 1; mode <= 3; ++mode) {
    CHECK(lrmm::matricize(t, mode).norm() == doctest::Approx(t.frobenius_norm()).epsilon(1e-12));
  }
}

TEST_CASE("mode_multiply by the identity leaves the tensor unchanged") {
  const Tensor3 t = random_tensor(3, 4, 2, 4);
  const std::array<Eigen::Index, 3> sizes = {3, 4, 2};
  for (int mode = 1; mode <= 3; ++mode) {
    const Tensor3 out = lrmm::mode_multiply(t, Matrix::Identity(sizes[mode - 1], sizes[mode - 1]), mode);
    for (std::size_t i = 0; i < t.data().size(); ++i) CHECK(out.data()[i] == t.data()[i]);
  }
}

TEST_CASE("rank-1 Tucker product of a unit core") {
  lrmm::RngStream s(5);
  Eigen::VectorXd u = Eigen::VectorXd::NullaryExpr(4, [&](Eigen::Index) { return s.next_gaussian(); });
  Eigen::VectorXd v = Eigen::VectorXd::NullaryExpr(3, [&](Eigen::Index) { return s.next_gaussian(); });
  Eigen::VectorXd w = Eigen::VectorXd::NullaryExpr(5, [&](Eigen::Index) { return s.next_gaussian(); });
  u.normalize();
  v.normalize();
  w.normalize();
  Tensor3 core(1, 1, 1);
  core(0, 0, 0) = 1.0;
  Tensor3 t = lrmm::mode_multiply(core, u, 1);
  t = lrmm::mode_multiply(t, v, 2);
  t = lrmm::mode_multiply(t, w, 3);
  for (Eigen::Index i1 = 0; i1 < 4; ++i1)
    for (Eigen::Index i2 = 0; i2 < 3; ++i2)
      for (Eigen::Index i3 = 0; i3 < 5; ++i3)
        CHECK(t(i1, i2, i3) == doctest::Approx(u(i1) * v(i2) * w(i3)).epsilon(1e-12));
}

TEST_CASE("mode_multiply equals unfold-multiply-fold") {
  const Tensor3 t = random_tensor(3, 3, 3, 6);
  const Matrix a = random_matrix(2, 3, 7);
  for (int mode = 1; mode <= 3; ++mode) {
    const Tensor3 direct = lrmm::mode_multiply(t, a, mode);
    const Tensor3 via_unfold = lrmm::fold(a * lrmm::matricize(t, mode), mode, 3, 3, 3);
    REQUIRE(direct.size() == via_unfold.size());
    for (std::size_t i = 0; i < direct.data().size(); ++i) {
      CHECK(direct.data()[i] == doctest::Approx(via_unfold.data()[i]).epsilon(1e-12));
    }
  }
}

TEST_CASE("mode_multiply commutes across distinct modes") {
  const Tensor3 t = random_tensor(4, 5, 3, 8);
  const Matrix a = random_matrix(2, 4, 9);
  const Matrix b = random_matrix(6, 5, 10);
  const Tensor3 ab = lrmm::mode_multiply(lrmm::mode_multiply(t, a, 1), b, 2);
  const Tensor3 ba = lrmm::mode_multiply(lrmm::mode_multiply(t, b, 2), a, 1);
  double diff = 0.0, norm = 0.0;
  for (std::size_t i = 0; i < ab.data().size(); ++i) {
    diff += (ab.data()[i] - ba.data()[i]) * (ab.data()[i] - ba.data()[i]);
    norm += ab.data()[i] * ab.data()[i];
  }
  CHECK(std::sqrt(diff) <= 1e-12 * std::sqrt(norm));
}

TEST_CASE("mode_multiply rejects dimension mismatches") {
  const Tensor3 t = random_tensor(3, 4, 2, 11);
  CHECK_THROWS_AS(lrmm::mode_multiply(t, random_matrix(2, 4, 1), 1), std::invalid_argument);
  CHECK_THROWS_AS(lrmm::mode_multiply(t, random_matrix(2, 3, 1), 2), std::invalid_argument);
}

TEST_CASE("stack and slice round trip") {
  const Matrix a = random_matrix(2, 2, 12);
  const Tensor3 single = lrmm::stack({a});
  CHECK((lrmm::slice(single, 0) - a).norm() == 0.0);

  std::vector<Matrix> ms = {random_matrix(2, 2, 13), random_matrix(2, 2, 14),
                            random_matrix(2, 2, 15)};
  const Tensor3 t = lrmm::stack(ms);
  for (int i = 0; i < 3; ++i) CHECK((lrmm::slice(t, i) - ms[i]).norm() == 0.0);

  // Mode-3 rows are the row-major vectorizations of the slices.
  const Matrix m3 = lrmm::matricize(t, 3);
  for (int i = 0; i < 3; ++i)
    for (Eigen::Index i1 = 0; i1 < 2; ++i1)
      for (Eigen::Index i2 = 0; i2 < 2; ++i2)
        CHECK(m3(i, i1 * 2 + i2) == ms[i](i1, i2));

  CHECK_THROWS_AS(lrmm::slice(t, 3), std::out_of_range);
  CHECK_THROWS_AS(lrmm::slice(t, -1), std::out_of_range);
  CHECK_THROWS_AS(lrmm::stack({random_matrix(2, 2, 1), random_matrix(3, 2, 1)}),
                  std::invalid_argument);
}

TEST_CASE("constructors reject non-finite entries") {
  std::vector<double> data = {1.0, std::numeric_limits<double>::infinity()};
  CHECK_THROWS_AS(Tensor3(1, 2, 1, std::move(data)), std::invalid_argument);
  std::vector<double> nan_data = {std::nan(""), 0.0};
  CHECK_THROWS_AS(Tensor3(2, 1, 1, std::move(nan_data)), std::invalid_argument);
}
