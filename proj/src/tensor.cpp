#include "lrmm/tensor.hpp"

#include <cmath>
#include <stdexcept>

namespace lrmm {

namespace {

void check_dims(Eigen::Index d1, Eigen::Index d2, Eigen::Index n) {
  if (d1 < 1 || d2 < 1 || n < 1) {
    throw std::invalid_argument("Tensor3: dimensions must be positive");
  }
}

void check_mode(int mode) {
  if (mode < 1 || mode > 3) {
    throw std::invalid_argument("tensor mode must be 1, 2 or 3");
  }
}

}  // namespace

Tensor3::Tensor3(Eigen::Index d1, Eigen::Index d2, Eigen::Index n)
    : d1_(d1), d2_(d2), n_(n) {
  check_dims(d1, d2, n);
  data_.assign(static_cast<std::size_t>(d1 * d2 * n), 0.0);
}

Tensor3::Tensor3(Eigen::Index d1, Eigen::Index d2, Eigen::Index n, std::vector<double> data)
    : d1_(d1), d2_(d2), n_(n), data_(std::move(data)) {
  check_dims(d1, d2, n);
  if (static_cast<Eigen::Index>(data_.size()) != d1 * d2 * n) {
    throw std::invalid_argument("Tensor3: data length does not match dimensions");
  }
  check_finite();
}

ConstRowMajorMap Tensor3::slice_view(Eigen::Index i) const {
  if (i < 0 || i >= n_) {
    throw std::out_of_range("Tensor3::slice_view: index out of range");
  }
  return ConstRowMajorMap(data_.data() + i * d1_ * d2_, d1_, d2_);
}

double Tensor3::frobenius_norm() const {
  double s = 0.0;
  for (double v : data_) s += v * v;
  return std::sqrt(s);
}

void Tensor3::check_finite() const {
  for (double v : data_) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("Tensor3: non-finite entry");
    }
  }
}

Matrix slice(const Tensor3& t, Eigen::Index i) { return t.slice_view(i); }

Tensor3 stack(const std::vector<Matrix>& slices) {
  if (slices.empty()) {
    throw std::invalid_argument("stack: need at least one slice");
  }
  const Eigen::Index d1 = slices.front().rows();
  const Eigen::Index d2 = slices.front().cols();
  Tensor3 t(d1, d2, static_cast<Eigen::Index>(slices.size()));
  for (std::size_t i = 0; i < slices.size(); ++i) {
    const Matrix& m = slices[i];
    if (m.rows() != d1 || m.cols() != d2) {
      throw std::invalid_argument("stack: ragged slice shapes");
    }
    for (Eigen::Index i1 = 0; i1 < d1; ++i1) {
      for (Eigen::Index i2 = 0; i2 < d2; ++i2) {
        t(i1, i2, static_cast<Eigen::Index>(i)) = m(i1, i2);
      }
    }
  }
  t.check_finite();
  return t;
}

Matrix matricize(const Tensor3& t, int mode) {
  check_mode(mode);
  const Eigen::Index d1 = t.d1(), d2 = t.d2(), n = t.n();
  switch (mode) {
    case 1: {
      Matrix m(d1, d2 * n);
      for (Eigen::Index i3 = 0; i3 < n; ++i3)
        for (Eigen::Index i1 = 0; i1 < d1; ++i1)
          for (Eigen::Index i2 = 0; i2 < d2; ++i2)
            m(i1, i2 * n + i3) = t(i1, i2, i3);
      return m;
    }
    case 2: {
      Matrix m(d2, d1 * n);
      for (Eigen::Index i3 = 0; i3 < n; ++i3)
        for (Eigen::Index i1 = 0; i1 < d1; ++i1)
          for (Eigen::Index i2 = 0; i2 < d2; ++i2)
            m(i2, i1 * n + i3) = t(i1, i2, i3);
      return m;
    }
    default: {
      // Mode 3 is the native layout.
      return t.mode3_view();
    }
  }
}

Tensor3 fold(const Matrix& m, int mode, Eigen::Index d1, Eigen::Index d2, Eigen::Index n) {
  check_mode(mode);
  switch (mode) {
    case 1:
      if (m.cols() != d2 * n) throw std::invalid_argument("fold: shape mismatch in mode 1");
      d1 = m.rows();
      break;
    case 2:
      if (m.cols() != d1 * n) throw std::invalid_argument("fold: shape mismatch in mode 2");
      d2 = m.rows();
      break;
    default:
      if (m.cols() != d1 * d2) throw std::invalid_argument("fold: shape mismatch in mode 3");
      n = m.rows();
      break;
  }
  Tensor3 t(d1, d2, n);
  for (Eigen::Index i3 = 0; i3 < n; ++i3) {
    for (Eigen::Index i1 = 0; i1 < d1; ++i1) {
      for (Eigen::Index i2 = 0; i2 < d2; ++i2) {
        double v;
        if (mode == 1) v = m(i1, i2 * n + i3);
        else if (mode == 2) v = m(i2, i1 * n + i3);
        else v = m(i3, i1 * d2 + i2);
        t(i1, i2, i3) = v;
      }
    }
  }
  return t;
}

Tensor3 mode_multiply(const Tensor3& t, const Matrix& a, int mode) {
  check_mode(mode);
  const Eigen::Index modal_size = (mode == 1) ? t.d1() : (mode == 2) ? t.d2() : t.n();
  if (a.cols() != modal_size) {
    throw std::invalid_argument("mode_multiply: a.cols() must equal the tensor size along the mode");
  }
  // Modes 1 and 2 contract within each slice; mode 3 mixes slices.
  switch (mode) {
    case 1: {
      Tensor3 out(a.rows(), t.d2(), t.n());
      for (Eigen::Index i = 0; i < t.n(); ++i) {
        Matrix res = a * t.slice_view(i).eval();
        for (Eigen::Index i1 = 0; i1 < res.rows(); ++i1)
          for (Eigen::Index i2 = 0; i2 < res.cols(); ++i2)
            out(i1, i2, i) = res(i1, i2);
      }
      return out;
    }
    case 2: {
      Tensor3 out(t.d1(), a.rows(), t.n());
      for (Eigen::Index i = 0; i < t.n(); ++i) {
        Matrix res = t.slice_view(i) * a.transpose();
        for (Eigen::Index i1 = 0; i1 < res.rows(); ++i1)
          for (Eigen::Index i2 = 0; i2 < res.cols(); ++i2)
            out(i1, i2, i) = res(i1, i2);
      }
      return out;
    }
    default: {
      RowMajorMatrix res = a * t.mode3_view();
      Tensor3 out(t.d1(), t.d2(), a.rows());
      std::copy(res.data(), res.data() + res.size(), out.data().begin());
      return out;
    }
  }
}

}  // namespace lrmm
