#pragma once

#include <Eigen/Dense>
#include <vector>

namespace lrmm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using RowMajorMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ConstRowMajorMap = Eigen::Map<const RowMajorMatrix>;

/// Third-order real tensor of shape d1 x d2 x n.
///
/// Storage is slice-major (index i3 slowest) with each d1 x d2 slice held
/// row-major, so slices and the mode-3 matricization are zero-copy views.
/// Entries must be finite; constructors reject NaN/Inf.
///
/// Matricization follows the index maps
///   mode 1: (i1, i2*n  + i3)   -> d1 x (d2*n)
///   mode 2: (i2, i1*n  + i3)   -> d2 x (d1*n)
///   mode 3: (i3, i1*d2 + i2)   -> n  x (d1*d2)
/// (0-based; the mode-1 map is the paper-standard one, modes 2 and 3 are the
/// analogous layouts). All fold/unfold pairs in this project use these maps,
/// so any internally consistent convention would give identical results.
class Tensor3 {
 public:
  Tensor3(Eigen::Index d1, Eigen::Index d2, Eigen::Index n);
  Tensor3(Eigen::Index d1, Eigen::Index d2, Eigen::Index n, std::vector<double> data);

  Eigen::Index d1() const { return d1_; }
  Eigen::Index d2() const { return d2_; }
  Eigen::Index n() const { return n_; }
  Eigen::Index size() const { return d1_ * d2_ * n_; }

  double operator()(Eigen::Index i1, Eigen::Index i2, Eigen::Index i3) const {
    return data_[(i3 * d1_ + i1) * d2_ + i2];
  }
  double& operator()(Eigen::Index i1, Eigen::Index i2, Eigen::Index i3) {
    return data_[(i3 * d1_ + i1) * d2_ + i2];
  }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  /// Zero-copy view of slice i (d1 x d2, row-major). Throws on bad index.
  ConstRowMajorMap slice_view(Eigen::Index i) const;

  /// Zero-copy view of the mode-3 matricization (n x d1*d2).
  ConstRowMajorMap mode3_view() const {
    return ConstRowMajorMap(data_.data(), n_, d1_ * d2_);
  }

  double frobenius_norm() const;

  /// Asserts all entries finite; throws std::invalid_argument otherwise.
  void check_finite() const;

 private:
  Eigen::Index d1_, d2_, n_;
  std::vector<double> data_;
};

/// Slice i as an owned matrix.
Matrix slice(const Tensor3& t, Eigen::Index i);

/// Stacks equally shaped d1 x d2 matrices into a d1 x d2 x n tensor.
Tensor3 stack(const std::vector<Matrix>& slices);

/// Mode-k matricization under the index maps documented on Tensor3.
Matrix matricize(const Tensor3& t, int mode);

/// Inverse of matricize: folds a matrix back into a tensor whose shape along
/// `mode` is m.rows() and along the other modes is (d1, d2, n).
Tensor3 fold(const Matrix& m, int mode, Eigen::Index d1, Eigen::Index d2, Eigen::Index n);

/// Multilinear (Tucker) product along one mode: contracts the tensor's
/// mode-k index against a's second index, so the output has a.rows() along
/// mode k. Equivalent to fold(a * matricize(t, mode), mode, ...).
Tensor3 mode_multiply(const Tensor3& t, const Matrix& a, int mode);

}  // namespace lrmm
