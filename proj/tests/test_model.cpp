#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "lrmm/lowrank.hpp"
#include "lrmm/model.hpp"
#include "lrmm/rng.hpp"
#include "lrmm/synth.hpp"

using lrmm::CenterSet;
using lrmm::GroundTruth;
using lrmm::Labeling;
using lrmm::Matrix;
using lrmm::Vector;

namespace {

// Random ground truth with independent low-rank centers.
GroundTruth random_instance(int d1, int d2, int n, int K, int r, std::uint64_t seed) {
  lrmm::RngStream s(seed);
  std::vector<Matrix> centers;
  for (int k = 0; k < K; ++k) {
    const Matrix u = lrmm::random_orthonormal(d1, r, s.next_u64());
    const Matrix v = lrmm::random_orthonormal(d2, r, s.next_u64());
    Vector sv(r);
    for (int i = 0; i < r; ++i) sv(i) = 1.0 + s.next_double() * 3.0;
    std::sort(sv.data(), sv.data() + r, std::greater<double>());
    centers.push_back(u * sv.asDiagonal() * v.transpose());
  }
  Labeling labels(n);
  for (int i = 0; i < n; ++i) labels[i] = i % K;  // every cluster nonempty
  return GroundTruth(labels, CenterSet(centers, std::vector<int>(K, r)));
}

}  // namespace

TEST_CASE("separation_strength basics") {
  Matrix a = Matrix::Zero(2, 3);
  Matrix b = a;
  b(1, 2) = 3.0;
  CHECK(lrmm::separation_strength(CenterSet({a, b}, {1, 1})) == doctest::Approx(3.0));
  CHECK(lrmm::separation_strength(CenterSet({b, b}, {1, 1})) == doctest::Approx(0.0));
}

TEST_CASE("separation of the shared-subspace pair is delta over sqrt(3)") {
  lrmm::LrMMSpec spec;
  spec.d1 = spec.d2 = 20;
  spec.n = 10;
  spec.K = 2;
  spec.ranks = {3, 3};
  spec.noise = lrmm::NoiseKind::None;
  spec.recipe = lrmm::CenterRecipe::s2_1(10.0, 10.0);
  auto [x, gt] = lrmm::gen_lrmm(spec, 40);
  CHECK(lrmm::separation_strength(gt.center_set) ==
        doctest::Approx(10.0 / std::sqrt(3.0)).epsilon(1e-10));
}

TEST_CASE("signal_strength") {
  Matrix a = Matrix::Zero(3, 3);
  a.diagonal() << 2.0, 1.0, 0.0;
  Matrix b = Matrix::Zero(3, 3);
  b.diagonal() << 5.0, 4.0, 0.0;
  CHECK(lrmm::signal_strength(CenterSet({a, b}, {2, 2})) == doctest::Approx(1.0));

  // Rank-1 center c * u v^T has signal strength c.
  const Matrix u = lrmm::random_orthonormal(6, 1, 41);
  const Matrix v = lrmm::random_orthonormal(5, 1, 42);
  const Matrix m = 2.5 * u * v.transpose();
  CHECK(lrmm::signal_strength(CenterSet({m, 2.0 * m}, {1, 1})) ==
        doctest::Approx(2.5).epsilon(1e-10));
}

TEST_CASE("signal_strength of the S1-1 recipe equals lambda") {
  lrmm::LrMMSpec spec;
  spec.d1 = spec.d2 = 30;
  spec.n = 8;
  spec.K = 2;
  spec.ranks = {2, 2};
  spec.noise = lrmm::NoiseKind::None;
  spec.recipe = lrmm::CenterRecipe::random_factors({{1.2 * 2.5, 2.5}, {1.2 * 2.5, 2.5}});
  auto [x, gt] = lrmm::gen_lrmm(spec, 43);
  CHECK(lrmm::signal_strength(gt.center_set) == doctest::Approx(2.5).epsilon(1e-8));
}

TEST_CASE("tensor signal strength of a repeated rank-1 center") {
  const Matrix u = lrmm::random_orthonormal(7, 1, 44);
  const Matrix v = lrmm::random_orthonormal(4, 1, 45);
  const Matrix m = 1.75 * u * v.transpose();
  const int n = 9;
  Labeling labels(n);
  for (int i = 0; i < n; ++i) labels[i] = i % 2;
  const GroundTruth gt(labels, CenterSet({m, m}, {1, 1}));
  CHECK(lrmm::tensor_signal_strength(gt) ==
        doctest::Approx(1.75 * std::sqrt(static_cast<double>(n))).epsilon(1e-10));
}

TEST_CASE("tensor signal strength matches a direct assembly oracle") {
  const GroundTruth gt = random_instance(8, 6, 12, 2, 2, 46);
  const lrmm::Tensor3 m = lrmm::signal_tensor(gt);
  double expected = std::numeric_limits<double>::infinity();
  for (int mode = 1; mode <= 2; ++mode) {
    const Vector sv = lrmm::singular_values(lrmm::matricize(m, mode));
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
      if (sv(i) > 1e-8 * sv(0)) expected = std::min(expected, sv(i));
    }
  }
  CHECK(lrmm::tensor_signal_strength(gt) == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("per-mode tensor signal lower bound holds on random instances") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const GroundTruth gt = random_instance(10, 8, 24, 3, 2, 400 + seed);
    const double lambda = lrmm::signal_strength(gt.center_set);
    const auto kappa = lrmm::condition_numbers(gt);
    const double n = gt.n();
    const int K = gt.center_set.K();
    const int r = 2;
    const lrmm::Tensor3 m = lrmm::signal_tensor(gt);
    for (int mode = 1; mode <= 2; ++mode) {
      const Vector sv = lrmm::singular_values(lrmm::matricize(m, mode));
      double sig_min = sv(0);
      for (Eigen::Index i = 0; i < sv.size(); ++i) {
        if (sv(i) > 1e-8 * sv(0)) sig_min = sv(i);
      }
      const double kappa_j = (mode == 1) ? kappa.kappa1 : kappa.kappa2;
      const double bound = std::sqrt(n) * lambda / (kappa_j * std::sqrt(double(K * r)));
      CHECK(sig_min >= bound - 1e-9);
    }
  }
}

TEST_CASE("condition numbers") {
  // Equal centers with equal singular values are perfectly conditioned.
  const Matrix u = lrmm::random_orthonormal(6, 2, 47);
  const Matrix v = lrmm::random_orthonormal(5, 2, 48);
  const Matrix m = 2.0 * u * v.transpose();
  Labeling labels = {0, 1, 0, 1};
  const GroundTruth iso(labels, CenterSet({m, m}, {2, 2}));
  CHECK(lrmm::condition_numbers(iso).kappa0 == doctest::Approx(1.0).epsilon(1e-10));

  Matrix a = Matrix::Zero(3, 3);
  a.diagonal() << 2.0, 1.0, 0.0;
  Matrix b = Matrix::Zero(3, 3);
  b.diagonal() << 4.0, 2.0, 0.0;
  const GroundTruth diag(labels, CenterSet({a, b}, {2, 2}));
  CHECK(lrmm::condition_numbers(diag).kappa0 == doctest::Approx(4.0).epsilon(1e-10));
}

TEST_CASE("Lemma 2 bound on the mode-wise condition numbers") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const GroundTruth gt = random_instance(9, 7, 18, 2, 2, 500 + seed);
    const auto kappa = lrmm::condition_numbers(gt);
    const auto sizes = gt.cluster_sizes();
    const double size_ratio =
        std::sqrt(static_cast<double>(*std::max_element(sizes.begin(), sizes.end())) /
                  *std::min_element(sizes.begin(), sizes.end()));
    // kappa(U): condition number of the concatenated factor matrix.
    Matrix u_cat(9, 4);
    for (int k = 0; k < 2; ++k) {
      const auto f = lrmm::truncated_svd(gt.center_set.centers[k], 2);
      u_cat.middleCols(2 * k, 2) = f.u;
    }
    const Vector svu = lrmm::singular_values(u_cat);
    const double kappa_u = svu(0) / svu(svu.size() - 1);
    CHECK(kappa.kappa1 <= kappa.kappa0 * kappa_u * size_ratio + 1e-9);
  }
}

TEST_CASE("signal_tensor stacks centers by label") {
  const Matrix u = lrmm::random_orthonormal(4, 1, 49);
  const Matrix v = lrmm::random_orthonormal(3, 1, 50);
  const Matrix m1 = u * v.transpose();
  const Matrix m2 = -2.0 * m1;
  const GroundTruth gt({0, 1, 0}, CenterSet({m1, m2}, {1, 1}));
  const lrmm::Tensor3 t = lrmm::signal_tensor(gt);
  CHECK((lrmm::slice(t, 0) - m1).norm() == 0.0);
  CHECK((lrmm::slice(t, 1) - m2).norm() == 0.0);
  CHECK((lrmm::slice(t, 2) - m1).norm() == 0.0);
}

TEST_CASE("Lemma 2 Gram identity for both modes") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const GroundTruth gt = random_instance(8, 7, 15, 3, 2, 600 + seed);
    const lrmm::Tensor3 m = lrmm::signal_tensor(gt);
    const auto sizes = gt.cluster_sizes();
    for (int mode = 1; mode <= 2; ++mode) {
      const Matrix unfolded = lrmm::matricize(m, mode);
      const Matrix gram = unfolded * unfolded.transpose();
      const Eigen::Index d = gram.rows();
      Matrix expected = Matrix::Zero(d, d);
      for (int k = 0; k < 3; ++k) {
        const auto f = lrmm::truncated_svd(gt.center_set.centers[k], 2);
        const Matrix factor = (mode == 1) ? f.u : f.v;
        expected += static_cast<double>(sizes[k]) * factor *
                    f.sigma.array().square().matrix().asDiagonal() * factor.transpose();
      }
      CHECK((gram - expected).norm() <= 1e-8 * expected.norm());
    }
  }
}

TEST_CASE("diagnostics are rotation invariant and scale correctly") {
  const GroundTruth gt = random_instance(8, 6, 12, 2, 2, 700);
  const Matrix q1 = lrmm::random_orthonormal(8, 8, 701);
  const Matrix q2 = lrmm::random_orthonormal(6, 6, 702);

  std::vector<Matrix> rotated, scaled;
  for (const Matrix& m : gt.center_set.centers) {
    rotated.push_back(q1 * m * q2.transpose());
    scaled.push_back(2.5 * m);
  }
  const GroundTruth gt_rot(gt.labels, CenterSet(rotated, gt.center_set.ranks));
  const GroundTruth gt_scaled(gt.labels, CenterSet(scaled, gt.center_set.ranks));

  CHECK(lrmm::separation_strength(gt_rot.center_set) ==
        doctest::Approx(lrmm::separation_strength(gt.center_set)).epsilon(1e-10));
  CHECK(lrmm::signal_strength(gt_rot.center_set) ==
        doctest::Approx(lrmm::signal_strength(gt.center_set)).epsilon(1e-10));
  CHECK(lrmm::tensor_signal_strength(gt_rot) ==
        doctest::Approx(lrmm::tensor_signal_strength(gt)).epsilon(1e-10));
  const auto k0 = lrmm::condition_numbers(gt);
  const auto kr = lrmm::condition_numbers(gt_rot);
  CHECK(kr.kappa0 == doctest::Approx(k0.kappa0).epsilon(1e-10));
  CHECK(kr.kappa1 == doctest::Approx(k0.kappa1).epsilon(1e-10));
  CHECK(kr.kappa2 == doctest::Approx(k0.kappa2).epsilon(1e-10));

  CHECK(lrmm::separation_strength(gt_scaled.center_set) ==
        doctest::Approx(2.5 * lrmm::separation_strength(gt.center_set)).epsilon(1e-10));
  CHECK(lrmm::signal_strength(gt_scaled.center_set) ==
        doctest::Approx(2.5 * lrmm::signal_strength(gt.center_set)).epsilon(1e-10));
  CHECK(lrmm::tensor_signal_strength(gt_scaled) ==
        doctest::Approx(2.5 * lrmm::tensor_signal_strength(gt)).epsilon(1e-10));
  const auto ks = lrmm::condition_numbers(gt_scaled);
  CHECK(ks.kappa0 == doctest::Approx(k0.kappa0).epsilon(1e-10));
  CHECK(ks.kappa1 == doctest::Approx(k0.kappa1).epsilon(1e-10));
  CHECK(ks.kappa2 == doctest::Approx(k0.kappa2).epsilon(1e-10));
}

TEST_CASE("CenterSet and GroundTruth validation") {
  Matrix a = Matrix::Zero(2, 2);
  a(0, 0) = 1.0;
  CHECK_THROWS_AS(CenterSet({a}, {1}), std::invalid_argument);
  CHECK_THROWS_AS(CenterSet({a, Matrix::Zero(3, 2)}, {1, 1}), std::invalid_argument);
  CHECK_THROWS_AS(GroundTruth({0, 0}, CenterSet({a, 2.0 * a}, {1, 1})),
                  std::invalid_argument);  // cluster 1 empty
  const CenterSet ok({a, 2.0 * a}, {1, 1});
  CHECK(ok.ranks_consistent());
  const CenterSet wrong_rank({a, 2.0 * a}, {1, 2});
  CHECK(!wrong_rank.ranks_consistent());
}
