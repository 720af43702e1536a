#include "lrmm/synth.hpp"

#include <Eigen/QR>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lrmm {

CenterRecipe CenterRecipe::random_factors(std::vector<std::vector<double>> values) {
  for (const auto& list : values) {
    if (list.empty()) throw std::invalid_argument("recipe: empty singular value list");
    for (std::size_t i = 0; i < list.size(); ++i) {
      if (list[i] <= 0.0) throw std::invalid_argument("recipe: singular values must be positive");
      if (i > 0 && list[i] > list[i - 1]) {
        throw std::invalid_argument("recipe: singular values must be nonincreasing");
      }
    }
  }
  CenterRecipe r;
  r.kind = Kind::RandomFactors;
  r.singular_values = std::move(values);
  return r;
}

CenterRecipe CenterRecipe::s2_1(double lambda, double delta_param) {
  if (lambda <= 0.0 || delta_param < 0.0) {
    throw std::invalid_argument("recipe s2_1: lambda must be positive, delta nonnegative");
  }
  CenterRecipe r;
  r.kind = Kind::S21;
  r.lambda = lambda;
  r.delta_param = delta_param;
  return r;
}

CenterRecipe CenterRecipe::s2_2(double lambda) {
  if (lambda <= 0.0) throw std::invalid_argument("recipe s2_2: lambda must be positive");
  CenterRecipe r;
  r.kind = Kind::S22;
  r.lambda = lambda;
  return r;
}

CenterRecipe CenterRecipe::explicit_centers(std::vector<Matrix> matrices) {
  if (matrices.size() < 2) throw std::invalid_argument("recipe: need K >= 2 centers");
  CenterRecipe r;
  r.kind = Kind::Explicit;
  r.matrices = std::move(matrices);
  return r;
}

namespace {

Matrix gaussian_matrix(Eigen::Index rows, Eigen::Index cols, RngStream& stream) {
  Matrix m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = stream.next_gaussian();
  return m;
}

Matrix orthonormal_from(Eigen::Index d, int r, RngStream stream) {
  const Matrix g = gaussian_matrix(d, r, stream);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(d, r);
  for (int j = 0; j < r; ++j) {
    if (qr.matrixQR()(j, j) < 0.0) q.col(j) = -q.col(j);
  }
  return q;
}

Labeling sample_uniform_labels(int n, int K, RngStream stream) {
  for (int attempt = 0; attempt < 100; ++attempt) {
    Labeling labels(n);
    std::vector<int> counts(K, 0);
    for (int i = 0; i < n; ++i) {
      labels[i] = static_cast<int>(stream.next_below(static_cast<std::uint64_t>(K)));
      ++counts[labels[i]];
    }
    if (std::all_of(counts.begin(), counts.end(), [](int c) { return c > 0; })) {
      return labels;
    }
  }
  throw std::runtime_error("label sampling kept producing an empty cluster");
}

std::vector<Matrix> build_centers(const LrMMSpec& spec, RngStream centers_stream) {
  const auto& rec = spec.recipe;
  std::vector<Matrix> centers;
  switch (rec.kind) {
    case CenterRecipe::Kind::RandomFactors: {
      if (static_cast<int>(rec.singular_values.size()) != spec.K) {
        throw std::invalid_argument("recipe: one singular value list per cluster required");
      }
      for (int k = 0; k < spec.K; ++k) {
        const auto& sv = rec.singular_values[k];
        const int r = static_cast<int>(sv.size());
        if (r != spec.ranks[k]) {
          throw std::invalid_argument("recipe: singular value list length must match rank");
        }
        const Matrix u = orthonormal_from(spec.d1, r, centers_stream.child(2 * k));
        const Matrix v = orthonormal_from(spec.d2, r, centers_stream.child(2 * k + 1));
        Vector s(r);
        for (int i = 0; i < r; ++i) s(i) = sv[i];
        centers.push_back(u * s.asDiagonal() * v.transpose());
      }
      break;
    }
    case CenterRecipe::Kind::S21: {
      if (spec.K != 2 || spec.ranks != std::vector<int>{3, 3}) {
        throw std::invalid_argument("recipe s2_1: requires K = 2 and ranks {3, 3}");
      }
      const Matrix u = orthonormal_from(spec.d1, 3, centers_stream.child(0));
      const Matrix v = orthonormal_from(spec.d2, 3, centers_stream.child(1));
      Vector s1(3), s2(3);
      s1 << 1.2 * rec.lambda, 1.1 * rec.lambda, rec.lambda;
      s2 = s1.array() + rec.delta_param / 3.0;
      centers.push_back(u * s1.asDiagonal() * v.transpose());
      centers.push_back(u * s2.asDiagonal() * v.transpose());
      break;
    }
    case CenterRecipe::Kind::S22: {
      if (spec.K != 2 || spec.ranks != std::vector<int>{3, 3}) {
        throw std::invalid_argument("recipe s2_2: requires K = 2 and ranks {3, 3}");
      }
      Vector s1(3), s2(3);
      s1 << 1.2 * rec.lambda, 1.1 * rec.lambda, rec.lambda;
      s2 << 0.36, 0.33, 0.30;
      const Matrix u1 = orthonormal_from(spec.d1, 3, centers_stream.child(0));
      const Matrix v1 = orthonormal_from(spec.d2, 3, centers_stream.child(1));
      const Matrix u2 = orthonormal_from(spec.d1, 3, centers_stream.child(2));
      const Matrix v2 = orthonormal_from(spec.d2, 3, centers_stream.child(3));
      centers.push_back(u1 * s1.asDiagonal() * v1.transpose());
      centers.push_back(u2 * s2.asDiagonal() * v2.transpose());
      break;
    }
    case CenterRecipe::Kind::Explicit: {
      if (static_cast<int>(rec.matrices.size()) != spec.K) {
        throw std::invalid_argument("recipe: explicit center count must equal K");
      }
      for (const Matrix& m : rec.matrices) {
        if (m.rows() != spec.d1 || m.cols() != spec.d2) {
          throw std::invalid_argument("recipe: explicit center shape mismatch");
        }
      }
      centers = rec.matrices;
      break;
    }
  }
  return centers;
}

}  // namespace

Matrix random_orthonormal(Eigen::Index d, int r, std::uint64_t seed) {
  if (r < 1 || r > d) throw std::invalid_argument("random_orthonormal: r out of range");
  return orthonormal_from(d, r, RngStream(seed));
}

std::pair<Tensor3, GroundTruth> gen_lrmm(const LrMMSpec& spec, std::uint64_t seed) {
  if (spec.d1 < 1 || spec.d2 < 1 || spec.n < 1 || spec.K < 2) {
    throw std::invalid_argument("gen_lrmm: invalid dimensions");
  }
  if (static_cast<int>(spec.ranks.size()) != spec.K) {
    throw std::invalid_argument("gen_lrmm: one rank per cluster required");
  }
  RngStream root(seed);
  std::vector<Matrix> centers = build_centers(spec, root.child("centers"));

  Labeling labels;
  if (spec.labels.has_value()) {
    labels = *spec.labels;
    if (static_cast<int>(labels.size()) != spec.n) {
      throw std::invalid_argument("gen_lrmm: explicit labels length mismatch");
    }
  } else {
    labels = sample_uniform_labels(spec.n, spec.K, root.child("labels"));
  }

  GroundTruth gt(labels, CenterSet(centers, spec.ranks));
  Tensor3 x(spec.d1, spec.d2, spec.n);
  RngStream noise_root = root.child("noise");
  for (int i = 0; i < spec.n; ++i) {
    const Matrix& m = centers[labels[i]];
    if (spec.noise == NoiseKind::Gaussian) {
      RngStream s = noise_root.child(static_cast<std::uint64_t>(i));
      for (Eigen::Index a = 0; a < spec.d1; ++a)
        for (Eigen::Index b = 0; b < spec.d2; ++b)
          x(a, b, i) = m(a, b) + spec.noise_sd * s.next_gaussian();
    } else {
      for (Eigen::Index a = 0; a < spec.d1; ++a)
        for (Eigen::Index b = 0; b < spec.d2; ++b) x(a, b, i) = m(a, b);
    }
  }
  return {std::move(x), std::move(gt)};
}

Matrix sample_symmetric_adjacency(const Matrix& mean, RngStream& stream) {
  if (mean.rows() != mean.cols()) {
    throw std::invalid_argument("adjacency sampler: mean must be square");
  }
  const Eigen::Index d = mean.rows();
  Matrix a = Matrix::Zero(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = i + 1; j < d; ++j) {
      const double p = mean(i, j);
      if (p < 0.0 || p > 1.0) {
        throw std::invalid_argument("adjacency sampler: probability outside [0, 1]");
      }
      const double v = stream.next_bernoulli(p) ? 1.0 : 0.0;
      a(i, j) = v;
      a(j, i) = v;
    }
  }
  return a;
}

std::pair<Tensor3, GroundTruth> gen_mmsbm(const MMSBMSpec& spec, std::uint64_t seed) {
  if (spec.K < 2 || spec.d < spec.K || spec.n < 1) {
    throw std::invalid_argument("gen_mmsbm: invalid dimensions");
  }
  if (spec.pbar <= 0.0 || 1.5 * spec.pbar > 1.0) {
    throw std::invalid_argument("gen_mmsbm: pbar must satisfy 0 < 1.5 * pbar <= 1");
  }
  RngStream root(seed);

  std::vector<Labeling> node_labels;
  if (spec.node_labels.has_value()) {
    node_labels = *spec.node_labels;
    if (static_cast<int>(node_labels.size()) != spec.K) {
      throw std::invalid_argument("gen_mmsbm: one node labeling per cluster required");
    }
    for (const Labeling& z : node_labels) {
      if (static_cast<int>(z.size()) != spec.d) {
        throw std::invalid_argument("gen_mmsbm: node labeling length mismatch");
      }
      for (int b : z) {
        if (b < 0 || b >= spec.K) throw std::invalid_argument("gen_mmsbm: node block out of range");
      }
    }
  } else {
    RngStream nodes = root.child("nodes");
    for (int k = 0; k < spec.K; ++k) {
      node_labels.push_back(
          sample_uniform_labels(spec.d, spec.K, nodes.child(static_cast<std::uint64_t>(k))));
    }
  }

  // B_k = pbar_k I + (pbar_k / 2)(J - I), pbar_k = pbar * k / K (k 1-based).
  std::vector<Matrix> centers;
  for (int k = 0; k < spec.K; ++k) {
    const double pk = spec.pbar * static_cast<double>(k + 1) / spec.K;
    Matrix b = Matrix::Constant(spec.K, spec.K, pk / 2.0);
    for (int i = 0; i < spec.K; ++i) b(i, i) = pk;
    Matrix m(spec.d, spec.d);
    for (int i = 0; i < spec.d; ++i)
      for (int j = 0; j < spec.d; ++j) m(i, j) = b(node_labels[k][i], node_labels[k][j]);
    centers.push_back(std::move(m));
  }

  Labeling labels;
  if (spec.labels.has_value()) {
    labels = *spec.labels;
    if (static_cast<int>(labels.size()) != spec.n) {
      throw std::invalid_argument("gen_mmsbm: explicit labels length mismatch");
    }
  } else {
    labels = sample_uniform_labels(spec.n, spec.K, root.child("labels"));
  }

  GroundTruth gt(labels, CenterSet(centers, std::vector<int>(spec.K, spec.K)));
  Tensor3 x(spec.d, spec.d, spec.n);
  RngStream noise_root = root.child("noise");
  for (int i = 0; i < spec.n; ++i) {
    RngStream s = noise_root.child(static_cast<std::uint64_t>(i));
    const Matrix a = sample_symmetric_adjacency(centers[labels[i]], s);
    for (int r = 0; r < spec.d; ++r)
      for (int c = 0; c < spec.d; ++c) x(r, c, i) = a(r, c);
  }
  return {std::move(x), std::move(gt)};
}

}  // namespace lrmm
