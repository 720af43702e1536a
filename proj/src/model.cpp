#include "lrmm/model.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include "lrmm/lowrank.hpp"

namespace lrmm {

CenterSet::CenterSet(std::vector<Matrix> centers_in, std::vector<int> ranks_in)
    : centers(std::move(centers_in)), ranks(std::move(ranks_in)) {
  if (centers.size() < 2) {
    throw std::invalid_argument("CenterSet: need K >= 2 centers");
  }
  if (ranks.size() != centers.size()) {
    throw std::invalid_argument("CenterSet: one rank per center required");
  }
  const Eigen::Index r = centers.front().rows();
  const Eigen::Index c = centers.front().cols();
  for (const Matrix& m : centers) {
    if (m.rows() != r || m.cols() != c) {
      throw std::invalid_argument("CenterSet: centers must share shape");
    }
    if (!m.allFinite()) {
      throw std::invalid_argument("CenterSet: non-finite center entry");
    }
  }
  for (int rk : ranks) {
    if (rk < 1 || rk > std::min(r, c)) {
      throw std::invalid_argument("CenterSet: rank out of range");
    }
  }
}

bool CenterSet::ranks_consistent() const {
  for (std::size_t k = 0; k < centers.size(); ++k) {
    const Vector sv = singular_values(centers[k]);
    const double cutoff = 1e-8 * sv(0);
    int numerical = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
      if (sv(i) > cutoff) ++numerical;
    }
    if (numerical != ranks[k]) return false;
  }
  return true;
}

GroundTruth::GroundTruth(Labeling labels_in, CenterSet centers_in)
    : labels(std::move(labels_in)), center_set(std::move(centers_in)) {
  if (labels.empty()) {
    throw std::invalid_argument("GroundTruth: empty labeling");
  }
  std::vector<int> counts(center_set.K(), 0);
  for (int s : labels) {
    if (s < 0 || s >= center_set.K()) {
      throw std::invalid_argument("GroundTruth: label out of range");
    }
    ++counts[s];
  }
  for (int c : counts) {
    if (c == 0) {
      throw std::invalid_argument("GroundTruth: empty cluster");
    }
  }
}

std::vector<int> GroundTruth::cluster_sizes() const {
  std::vector<int> counts(center_set.K(), 0);
  for (int s : labels) ++counts[s];
  return counts;
}

double GroundTruth::alpha() const {
  const auto counts = cluster_sizes();
  const int min_count = *std::min_element(counts.begin(), counts.end());
  return static_cast<double>(min_count) /
         (static_cast<double>(n()) / center_set.K());
}

double separation_strength(const CenterSet& cs) {
  if (cs.K() < 2) {
    throw std::invalid_argument("separation_strength: need K >= 2");
  }
  double best = std::numeric_limits<double>::infinity();
  for (int a = 0; a < cs.K(); ++a) {
    for (int b = a + 1; b < cs.K(); ++b) {
      best = std::min(best, (cs.centers[a] - cs.centers[b]).norm());
    }
  }
  return best;
}

double signal_strength(const CenterSet& cs) {
  double lambda = std::numeric_limits<double>::infinity();
  for (int k = 0; k < cs.K(); ++k) {
    const Vector sv = singular_values(cs.centers[k]);
    lambda = std::min(lambda, sv(cs.ranks[k] - 1));
  }
  return lambda;
}

Tensor3 signal_tensor(const GroundTruth& gt) {
  const Eigen::Index d1 = gt.center_set.d1();
  const Eigen::Index d2 = gt.center_set.d2();
  Tensor3 t(d1, d2, gt.n());
  for (int i = 0; i < gt.n(); ++i) {
    const Matrix& m = gt.center_set.centers[gt.labels[i]];
    for (Eigen::Index i1 = 0; i1 < d1; ++i1)
      for (Eigen::Index i2 = 0; i2 < d2; ++i2) t(i1, i2, i) = m(i1, i2);
  }
  return t;
}

namespace {

// Largest and smallest-above-threshold singular values of one matricization.
std::pair<double, double> spectrum_range(const Matrix& m) {
  const Vector sv = singular_values(m);
  const double top = sv(0);
  const double cutoff = 1e-8 * top;
  double smallest = top;
  for (Eigen::Index i = 0; i < sv.size(); ++i) {
    if (sv(i) > cutoff) smallest = sv(i);
  }
  return {top, smallest};
}

}  // namespace

double tensor_signal_strength(const GroundTruth& gt) {
  const Tensor3 m = signal_tensor(gt);
  const auto [top1, min1] = spectrum_range(matricize(m, 1));
  const auto [top2, min2] = spectrum_range(matricize(m, 2));
  (void)top1;
  (void)top2;
  return std::min(min1, min2);
}

ConditionNumbers condition_numbers(const GroundTruth& gt) {
  const CenterSet& cs = gt.center_set;
  double max_op = 0.0;
  double min_sig = std::numeric_limits<double>::infinity();
  for (int k = 0; k < cs.K(); ++k) {
    const Vector sv = singular_values(cs.centers[k]);
    max_op = std::max(max_op, sv(0));
    min_sig = std::min(min_sig, sv(cs.ranks[k] - 1));
  }
  const Tensor3 m = signal_tensor(gt);
  const auto [top1, min1] = spectrum_range(matricize(m, 1));
  const auto [top2, min2] = spectrum_range(matricize(m, 2));
  return {max_op / min_sig, top1 / min1, top2 / min2};
}

}  // namespace lrmm
