#include "lrmm/metrics.hpp"

#include <limits>
#include <stdexcept>

namespace lrmm {

namespace {

void check_pair(const Labeling& s_hat, const Labeling& s_star, int K) {
  if (s_hat.size() != s_star.size()) {
    throw std::invalid_argument("labelings differ in length");
  }
  if (s_hat.empty()) {
    throw std::invalid_argument("labelings are empty");
  }
  if (K < 1) {
    throw std::invalid_argument("K must be positive");
  }
  for (std::size_t i = 0; i < s_hat.size(); ++i) {
    if (s_hat[i] < 0 || s_hat[i] >= K || s_star[i] < 0 || s_star[i] >= K) {
      throw std::invalid_argument("label out of range");
    }
  }
}

}  // namespace

namespace detail {

std::pair<double, std::vector<int>> min_assignment(const Matrix& cost) {
  const int n = static_cast<int>(cost.rows());
  const double kInf = std::numeric_limits<double>::infinity();
  // Potentials-based Hungarian algorithm, 1-indexed sentinels.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<int> match(n + 1, 0), way(n + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<char> used(n + 1, 0);
    do {
      used[j0] = 1;
      const int i0 = match[j0];
      double delta = kInf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      const int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }
  std::vector<int> row_to_col(n, -1);
  double total = 0.0;
  for (int j = 1; j <= n; ++j) {
    row_to_col[match[j] - 1] = j - 1;
    total += cost(match[j] - 1, j - 1);
  }
  return {total, row_to_col};
}

std::vector<int> lex_min_assignment(const Matrix& cost, double tol) {
  const int n = static_cast<int>(cost.rows());
  auto [best_total, assignment] = min_assignment(cost);
  if (n > 16) return assignment;  // ties are refined only at small K

  // Fix rows one by one to the smallest column that still admits an optimal
  // completion of the remaining sub-assignment.
  std::vector<int> fixed(n, -1);
  std::vector<char> col_used(n, 0);
  double fixed_cost = 0.0;
  std::vector<int> free_rows(n);
  for (int i = 0; i < n; ++i) free_rows[i] = i;
  for (int row = 0; row < n; ++row) {
    for (int col = 0; col < n; ++col) {
      if (col_used[col]) continue;
      if (row == n - 1) {
        if (fixed_cost + cost(row, col) <= best_total + tol) {
          fixed[row] = col;
          col_used[col] = 1;
        }
        if (fixed[row] >= 0) break;
        continue;
      }
      // Cost of optimally assigning the remaining rows to remaining columns.
      std::vector<int> rows_left, cols_left;
      for (int i = row + 1; i < n; ++i) rows_left.push_back(i);
      for (int j = 0; j < n; ++j) {
        if (!col_used[j] && j != col) cols_left.push_back(j);
      }
      Matrix sub(rows_left.size(), cols_left.size());
      for (std::size_t a = 0; a < rows_left.size(); ++a)
        for (std::size_t b = 0; b < cols_left.size(); ++b)
          sub(a, b) = cost(rows_left[a], cols_left[b]);
      const double rest = sub.size() > 0 ? min_assignment(sub).first : 0.0;
      if (fixed_cost + cost(row, col) + rest <= best_total + tol) {
        fixed[row] = col;
        col_used[col] = 1;
        fixed_cost += cost(row, col);
        break;
      }
    }
    if (fixed[row] < 0) return assignment;  // numerical fallback
  }
  return fixed;
}

}  // namespace detail

Eigen::MatrixXi confusion(const Labeling& s_hat, const Labeling& s_star, int K) {
  check_pair(s_hat, s_star, K);
  Eigen::MatrixXi counts = Eigen::MatrixXi::Zero(K, K);
  for (std::size_t i = 0; i < s_hat.size(); ++i) {
    ++counts(s_hat[i], s_star[i]);
  }
  return counts;
}

AlignmentResult hamming_error(const Labeling& s_hat, const Labeling& s_star, int K) {
  const Eigen::MatrixXi counts = confusion(s_hat, s_star, K);
  const long long n = static_cast<long long>(s_hat.size());
  // Minimizing mismatches equals maximizing agreement, so assign true label
  // b (row) to predicted label a (column) with cost -counts(a, b).
  Matrix cost(K, K);
  for (int b = 0; b < K; ++b)
    for (int a = 0; a < K; ++a) cost(b, a) = -static_cast<double>(counts(a, b));
  const std::vector<int> perm = detail::lex_min_assignment(cost, 0.5);
  long long agree = 0;
  for (int b = 0; b < K; ++b) agree += counts(perm[b], b);
  AlignmentResult out;
  out.permutation = perm;
  out.hamming = n - agree;
  out.rate = static_cast<double>(out.hamming) / static_cast<double>(n);
  return out;
}

double frob_loss(const Labeling& s_hat, const Labeling& s_star, const CenterSet& cs) {
  const int K = cs.K();
  const Eigen::MatrixXi counts = confusion(s_hat, s_star, K);
  Matrix dist2(K, K);
  for (int a = 0; a < K; ++a)
    for (int c = 0; c < K; ++c)
      dist2(a, c) = (cs.centers[a] - cs.centers[c]).squaredNorm();
  // cost(b, c): total loss of mapping true label b to center c.
  Matrix cost = Matrix::Zero(K, K);
  for (int b = 0; b < K; ++b)
    for (int c = 0; c < K; ++c)
      for (int a = 0; a < K; ++a)
        cost(b, c) += counts(a, b) * dist2(a, c);
  return detail::min_assignment(cost).first;
}

}  // namespace lrmm
