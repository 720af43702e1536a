#include "lrmm/cluster.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "lrmm/lowrank.hpp"
#include "lrmm/metrics.hpp"
#include "lrmm/rng.hpp"

namespace lrmm {

namespace {

constexpr int kKmeansMaxIter = 100;

// Labels for the rows of x given centroids, ties to the smallest index.
Labeling assign_rows(const Matrix& x, const Matrix& centroids) {
  const Eigen::Index n = x.rows();
  const Eigen::Index k = centroids.rows();
  const Matrix cross = x * centroids.transpose();
  Vector cnorm(k);
  for (Eigen::Index j = 0; j < k; ++j) cnorm(j) = centroids.row(j).squaredNorm();
  Labeling labels(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    int best = 0;
    double best_val = cnorm(0) - 2.0 * cross(i, 0);
    for (Eigen::Index j = 1; j < k; ++j) {
      const double val = cnorm(j) - 2.0 * cross(i, j);
      if (val < best_val) {
        best_val = val;
        best = static_cast<int>(j);
      }
    }
    labels[i] = best;
  }
  return labels;
}

Matrix group_means(const Matrix& x, const Labeling& labels, int K) {
  Matrix sums = Matrix::Zero(K, x.cols());
  std::vector<int> counts(K, 0);
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    sums.row(labels[i]) += x.row(i);
    ++counts[labels[i]];
  }
  for (int j = 0; j < K; ++j) {
    if (counts[j] > 0) sums.row(j) /= static_cast<double>(counts[j]);
  }
  return sums;
}

// Fills empty clusters by moving the point farthest from its own centroid,
// drawn from a cluster of size >= 2 so the repair always terminates.
void repair_empty(const Matrix& x, const Matrix& centroids, Labeling& labels, int K) {
  std::vector<int> counts(K, 0);
  for (int s : labels) ++counts[s];
  for (int k = 0; k < K; ++k) {
    while (counts[k] == 0) {
      Eigen::Index donor = -1;
      double worst = -1.0;
      for (Eigen::Index i = 0; i < x.rows(); ++i) {
        if (counts[labels[i]] < 2) continue;
        const double d = (x.row(i) - centroids.row(labels[i])).squaredNorm();
        if (d > worst) {
          worst = d;
          donor = i;
        }
      }
      if (donor < 0) {
        throw std::runtime_error("cannot repair empty cluster: n < K effective");
      }
      --counts[labels[donor]];
      labels[donor] = k;
      ++counts[k];
    }
  }
}

Matrix kmeanspp_seed(const Matrix& x, int K, RngStream& stream) {
  const Eigen::Index n = x.rows();
  Matrix centroids(K, x.cols());
  std::vector<char> chosen(n, 0);
  const Eigen::Index first = static_cast<Eigen::Index>(stream.next_below(n));
  centroids.row(0) = x.row(first);
  chosen[first] = 1;
  Vector d2(n);
  for (Eigen::Index i = 0; i < n; ++i) d2(i) = (x.row(i) - centroids.row(0)).squaredNorm();
  for (int j = 1; j < K; ++j) {
    const double total = d2.sum();
    Eigen::Index pick = -1;
    if (total > 0.0) {
      const double target = stream.next_double() * total;
      double cum = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        cum += d2(i);
        if (cum > target) {
          pick = i;
          break;
        }
      }
      if (pick < 0) pick = n - 1;
    } else {
      // All mass at zero (duplicated rows): take the first unchosen row.
      for (Eigen::Index i = 0; i < n; ++i) {
        if (!chosen[i]) {
          pick = i;
          break;
        }
      }
      if (pick < 0) pick = 0;
    }
    centroids.row(j) = x.row(pick);
    chosen[pick] = 1;
    for (Eigen::Index i = 0; i < n; ++i) {
      d2(i) = std::min(d2(i), (x.row(i) - centroids.row(j)).squaredNorm());
    }
  }
  return centroids;
}

double sse_objective(const Matrix& x, const Labeling& labels, const Matrix& centroids) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    total += (x.row(i) - centroids.row(labels[i])).squaredNorm();
  }
  return total;
}

}  // namespace

KMeansResult kmeans_rows(const Matrix& x, int K, std::uint64_t seed, int restarts) {
  if (K < 1) throw std::invalid_argument("kmeans_rows: K must be >= 1");
  if (x.rows() < K) throw std::invalid_argument("kmeans_rows: K exceeds the row count");
  if (restarts < 1) throw std::invalid_argument("kmeans_rows: restarts must be >= 1");
  KMeansResult best;
  best.objective = std::numeric_limits<double>::infinity();
  RngStream base = RngStream(seed).child("kmeans");
  for (int rep = 0; rep < restarts; ++rep) {
    RngStream stream = base.child(static_cast<std::uint64_t>(rep));
    Matrix centroids = kmeanspp_seed(x, K, stream);
    Labeling labels, prev;
    for (int it = 0; it < kKmeansMaxIter; ++it) {
      labels = assign_rows(x, centroids);
      repair_empty(x, centroids, labels, K);
      centroids = group_means(x, labels, K);
      if (labels == prev) break;
      prev = labels;
    }
    const double obj = sse_objective(x, labels, centroids);
    if (obj < best.objective) {
      best.labels = std::move(labels);
      best.centroids = centroids;
      best.objective = obj;
    }
  }
  return best;
}

namespace {

void check_lloyd_init(const Labeling& init, int K, Eigen::Index n, int T) {
  if (static_cast<Eigen::Index>(init.size()) != n) {
    throw std::invalid_argument("lloyd: init length does not match sample count");
  }
  if (T < 1) throw std::invalid_argument("lloyd: T must be >= 1");
  std::vector<int> counts(K, 0);
  for (int s : init) {
    if (s < 0 || s >= K) throw std::invalid_argument("lloyd: init label out of range");
    ++counts[s];
  }
  for (int c : counts) {
    if (c == 0) throw std::invalid_argument("lloyd: init has an empty cluster");
  }
}

Matrix reshape_row(const Eigen::RowVectorXd& row, Eigen::Index d1, Eigen::Index d2) {
  return ConstRowMajorMap(row.data(), d1, d2);
}

// Shared Lloyd engine. update(means, counts) -> centers for this iteration.
template <typename CenterUpdate>
LloydResult lloyd_engine(const Tensor3& x, const Labeling& init, int K, int T,
                         const GroundTruth* gt, CenterUpdate&& update) {
  const Eigen::Index n = x.n();
  const Eigen::Index p = x.d1() * x.d2();
  check_lloyd_init(init, K, n, T);
  const ConstRowMajorMap rows = x.mode3_view();

  LloydResult out;
  out.trace.labels_per_iter.push_back(init);
  if (gt != nullptr) {
    out.trace.error_per_iter.push_back(hamming_error(init, gt->labels, K).rate);
  }

  Labeling labels = init;
  std::vector<Matrix> centers;
  Vector xnorm2(n);
  for (Eigen::Index i = 0; i < n; ++i) xnorm2(i) = rows.row(i).squaredNorm();

  for (int t = 1; t <= T; ++t) {
    // Center update from the current labels.
    std::vector<Matrix> means(K);
    std::vector<int> counts(K, 0);
    {
      Matrix sums = Matrix::Zero(K, p);
      for (Eigen::Index i = 0; i < n; ++i) {
        sums.row(labels[i]) += rows.row(i);
        ++counts[labels[i]];
      }
      for (int k = 0; k < K; ++k) {
        sums.row(k) /= static_cast<double>(counts[k]);
        means[k] = reshape_row(sums.row(k), x.d1(), x.d2());
      }
    }
    centers = update(means, counts);

    // Relabel by nearest center, ties to the smallest cluster index.
    Matrix vec_centers(p, K);
    Vector cnorm2(K);
    for (int k = 0; k < K; ++k) {
      vec_centers.col(k) = Eigen::Map<const Vector>(
          RowMajorMatrix(centers[k]).data(), p);
      cnorm2(k) = centers[k].squaredNorm();
    }
    const Matrix cross = rows * vec_centers;
    Labeling next(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      int bk = 0;
      double bv = cnorm2(0) - 2.0 * cross(i, 0);
      for (int k = 1; k < K; ++k) {
        const double v = cnorm2(k) - 2.0 * cross(i, k);
        if (v < bv) {
          bv = v;
          bk = k;
        }
      }
      next[i] = bk;
    }

    // An emptied cluster receives the point farthest from its current center
    // (donors keep at least one point; ties to the smallest index).
    {
      std::vector<int> cnt(K, 0);
      for (int s : next) ++cnt[s];
      for (int k = 0; k < K; ++k) {
        while (cnt[k] == 0) {
          Eigen::Index donor = -1;
          double worst = -1.0;
          for (Eigen::Index i = 0; i < n; ++i) {
            if (cnt[next[i]] < 2) continue;
            const double d = xnorm2(i) - 2.0 * cross(i, next[i]) + cnorm2(next[i]);
            if (d > worst) {
              worst = d;
              donor = i;
            }
          }
          if (donor < 0) throw std::runtime_error("lloyd: cannot repair empty cluster");
          --cnt[next[donor]];
          next[donor] = k;
          ++cnt[k];
        }
      }
    }

    out.trace.labels_per_iter.push_back(next);
    if (gt != nullptr) {
      out.trace.error_per_iter.push_back(hamming_error(next, gt->labels, K).rate);
    }

    if (next == labels) {
      out.trace.converged_at = t;
      labels = std::move(next);
      break;
    }
    // A label vector seen before (but not the previous one) starts a cycle.
    bool cycled = false;
    for (std::size_t h = 0; h + 1 < out.trace.labels_per_iter.size(); ++h) {
      if (out.trace.labels_per_iter[h] == next) {
        cycled = true;
        break;
      }
    }
    labels = std::move(next);
    if (cycled) break;
  }

  std::vector<int> ranks(K);
  for (int k = 0; k < K; ++k) {
    ranks[k] = static_cast<int>(std::min(x.d1(), x.d2()));
  }
  out.labels = std::move(labels);
  out.centers = CenterSet(std::move(centers), std::move(ranks));
  return out;
}

}  // namespace

LloydResult lr_lloyd(const Tensor3& x, const Labeling& init,
                     const std::vector<int>& ranks, int T, const GroundTruth* gt) {
  const int K = static_cast<int>(ranks.size());
  if (K < 2) throw std::invalid_argument("lr_lloyd: need one rank per cluster, K >= 2");
  for (int r : ranks) {
    if (r < 1 || r > std::min(x.d1(), x.d2())) {
      throw std::invalid_argument("lr_lloyd: rank out of range");
    }
  }
  LloydResult res = lloyd_engine(
      x, init, K, T, gt,
      [&](const std::vector<Matrix>& means, const std::vector<int>&) {
        std::vector<Matrix> centers(K);
        for (int k = 0; k < K; ++k) centers[k] = best_rank_r(means[k], ranks[k]);
        return centers;
      });
  res.centers.ranks = ranks;
  return res;
}

LloydResult vec_lloyd(const Tensor3& x, const Labeling& init, int K, int T,
                      const GroundTruth* gt) {
  if (K < 2) throw std::invalid_argument("vec_lloyd: K must be >= 2");
  return lloyd_engine(x, init, K, T, gt,
                      [](const std::vector<Matrix>& means, const std::vector<int>&) {
                        return means;
                      });
}

LloydResult rlr_lloyd(const Tensor3& x, const Labeling& init, int r1, int r2,
                      int T, const GroundTruth* gt) {
  if (r1 < 1 || r1 > std::min(x.d1(), x.d2()) || r2 < 1 ||
      r2 > std::min(x.d1(), x.d2())) {
    throw std::invalid_argument("rlr_lloyd: rank out of range");
  }
  LloydResult res = lloyd_engine(
      x, init, 2, T, gt,
      [&](const std::vector<Matrix>& means, const std::vector<int>&) {
        const TruncatedSVD f1 = truncated_svd(means[0], r1);
        const TruncatedSVD f2 = truncated_svd(means[1], r2);
        const Matrix a1 = best_rank_r(means[0], r1);
        const Matrix a2 = best_rank_r(means[1], r2);
        std::vector<Matrix> centers(2);
        // The weaker center is zeroed; cluster 1 keeps the stronger one.
        // A tie keeps the current naming.
        centers[0] = (f2.sigma(0) > f1.sigma(0)) ? a2 : a1;
        centers[1] = Matrix::Zero(means[0].rows(), means[0].cols());
        return centers;
      });
  res.centers.ranks = {r1, r2};
  return res;
}

namespace {

// Top eigenvectors (descending) of the symmetric PSD matrix g.
Matrix top_eigenvectors(const Matrix& g, int r) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(g);
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("eigendecomposition failed");
  }
  const Eigen::Index d = g.rows();
  Matrix out(d, r);
  for (int j = 0; j < r; ++j) out.col(j) = eig.eigenvectors().col(d - 1 - j);
  return out;
}

// Rows are the slices projected into the HOSVD factor coordinates; distances
// among the rows of mode-3 of the projected tensor are preserved exactly.
Matrix projected_coordinates(const Tensor3& x, const Matrix& u, const Matrix& v) {
  const Eigen::Index n = x.n();
  const Eigen::Index ru = u.cols(), rv = v.cols();
  Matrix z(n, ru * rv);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Matrix zi = u.transpose() * x.slice_view(i) * v;
    for (Eigen::Index a = 0; a < ru; ++a)
      for (Eigen::Index b = 0; b < rv; ++b) z(i, a * rv + b) = zi(a, b);
  }
  return z;
}

// Gram matrices of the mode-1/2 matricizations accumulated slice by slice.
std::pair<Matrix, Matrix> mode12_grams(const Tensor3& x) {
  Matrix g1 = Matrix::Zero(x.d1(), x.d1());
  Matrix g2 = Matrix::Zero(x.d2(), x.d2());
  for (Eigen::Index i = 0; i < x.n(); ++i) {
    const Matrix xi = x.slice_view(i);
    g1.noalias() += xi * xi.transpose();
    g2.noalias() += xi.transpose() * xi;
  }
  return {g1, g2};
}

// Exact isometric embedding of the mode-3 rows via the n x n Gram factor.
Matrix gram_embedding(const Tensor3& x, int keep) {
  const ConstRowMajorMap rows = x.mode3_view();
  Matrix g = Matrix::Zero(x.n(), x.n());
  g.noalias() = rows * rows.transpose();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(g);
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("eigendecomposition failed");
  }
  const Eigen::Index n = x.n();
  Matrix coords(n, keep);
  for (int j = 0; j < keep; ++j) {
    const double ev = std::max(eig.eigenvalues()(n - 1 - j), 0.0);
    coords.col(j) = eig.eigenvectors().col(n - 1 - j) * std::sqrt(ev);
  }
  return coords;
}

}  // namespace

Labeling ts_init(const Tensor3& x, int r_u, int r_v, int K, std::uint64_t seed,
                 int restarts) {
  if (r_u < 1 || r_u > x.d1() || r_v < 1 || r_v > x.d2()) {
    throw std::invalid_argument("ts_init: factor rank out of range");
  }
  if (K < 1 || K > x.n()) {
    throw std::invalid_argument("ts_init: K out of range");
  }
  const auto [g1, g2] = mode12_grams(x);
  const Matrix u = top_eigenvectors(g1, r_u);
  const Matrix v = top_eigenvectors(g2, r_v);
  const Matrix z = projected_coordinates(x, u, v);
  return kmeans_rows(z, K, seed, restarts).labels;
}

Labeling rts_init(const Tensor3& x, int r1, std::uint64_t seed, int restarts) {
  if (r1 < 1 || r1 > std::min(x.d1(), x.d2())) {
    throw std::invalid_argument("rts_init: rank out of range");
  }
  return ts_init(x, r1, r1, 2, seed, restarts);
}

Labeling kmeans_m3_init(const Tensor3& x, int K, std::uint64_t seed, int restarts) {
  if (K < 1 || K > x.n()) throw std::invalid_argument("kmeans_m3_init: K out of range");
  const Matrix coords = gram_embedding(x, static_cast<int>(x.n()));
  return kmeans_rows(coords, K, seed, restarts).labels;
}

Labeling spectral_m3_init(const Tensor3& x, int K, std::uint64_t seed, int restarts) {
  if (K < 1 || K > x.n()) throw std::invalid_argument("spectral_m3_init: K out of range");
  const Matrix coords = gram_embedding(x, K);
  return kmeans_rows(coords, K, seed, restarts).labels;
}

RankEstimate estimate_ranks(const Tensor3& x, int r_max, int k_max,
                            std::uint64_t seed, ScreeData* scree) {
  if (r_max < 1 || r_max > std::min(x.d1(), x.d2())) {
    throw std::invalid_argument("estimate_ranks: r_max out of range");
  }
  if (k_max < 1 || k_max > x.n()) {
    throw std::invalid_argument("estimate_ranks: k_max out of range");
  }
  RankEstimate est;
  const Vector sv1 = singular_values(matricize(x, 1));
  const Vector sv2 = singular_values(matricize(x, 2));
  est.r_u = elbow_rank(sv1, r_max);
  est.r_v = elbow_rank(sv2, r_max);

  const auto [g1, g2] = mode12_grams(x);
  const Matrix u = top_eigenvectors(g1, est.r_u);
  const Matrix v = top_eigenvectors(g2, est.r_v);
  const Matrix core_rows = projected_coordinates(x, u, v);
  const Vector sv_core = singular_values(core_rows);
  est.K = elbow_rank(sv_core, k_max);

  const Labeling labels = ts_init(x, est.r_u, est.r_v, est.K, seed);
  std::vector<Vector> mean_spectra;
  est.cluster_ranks.resize(est.K);
  for (int k = 0; k < est.K; ++k) {
    Matrix sum = Matrix::Zero(x.d1(), x.d2());
    int count = 0;
    for (Eigen::Index i = 0; i < x.n(); ++i) {
      if (labels[i] == k) {
        sum += x.slice_view(i);
        ++count;
      }
    }
    sum /= static_cast<double>(count);
    const Vector sv = singular_values(sum);
    est.cluster_ranks[k] = elbow_rank(sv, r_max);
    mean_spectra.push_back(sv);
  }
  if (scree != nullptr) {
    scree->mode1 = sv1;
    scree->mode2 = sv2;
    scree->core_mode3 = sv_core;
    scree->cluster_means = std::move(mean_spectra);
  }
  return est;
}

}  // namespace lrmm
