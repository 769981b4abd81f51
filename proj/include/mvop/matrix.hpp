#pragma once

// Dense row-major matrices over any Scalar, with Gaussian elimination that is
// exact for the rational variants. Float-only spectral quantities (singular
// values) go through Eigen.

#include "mvop/errors.hpp"
#include "mvop/scalar.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

namespace mvop {

template <Scalar T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::int64_t rows, std::int64_t cols, const T& fill = T(0))
      : rows_(rows), cols_(cols), data_(static_cast<std::size_t>(rows * cols), fill) {
    if (rows < 0 || cols < 0) throw DimensionMismatch("negative matrix size");
  }

  static Matrix identity(std::int64_t n) {
    Matrix m(n, n);
    for (std::int64_t i = 0; i < n; ++i) m(i, i) = T(1);
    return m;
  }
  static Matrix column(const std::vector<T>& v) {
    Matrix m(static_cast<std::int64_t>(v.size()), 1);
    for (std::size_t i = 0; i < v.size(); ++i) m.data_[i] = v[i];
    return m;
  }

  std::int64_t rows() const { return rows_; }
  std::int64_t cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  T& operator()(std::int64_t i, std::int64_t j) { return data_[static_cast<std::size_t>(i * cols_ + j)]; }
  const T& operator()(std::int64_t i, std::int64_t j) const { return data_[static_cast<std::size_t>(i * cols_ + j)]; }

  Matrix block(std::int64_t r0, std::int64_t c0, std::int64_t nr, std::int64_t nc) const {
    if (r0 < 0 || c0 < 0 || nr < 0 || nc < 0 || r0 + nr > rows_ || c0 + nc > cols_)
      throw DimensionMismatch("sub-matrix out of range");
    Matrix m(nr, nc);
    for (std::int64_t i = 0; i < nr; ++i)
      for (std::int64_t j = 0; j < nc; ++j) m(i, j) = (*this)(r0 + i, c0 + j);
    return m;
  }
  void set_block(std::int64_t r0, std::int64_t c0, const Matrix& b) {
    if (r0 < 0 || c0 < 0 || r0 + b.rows_ > rows_ || c0 + b.cols_ > cols_)
      throw DimensionMismatch("set_block out of range");
    for (std::int64_t i = 0; i < b.rows_; ++i)
      for (std::int64_t j = 0; j < b.cols_; ++j) (*this)(r0 + i, c0 + j) = b(i, j);
  }

  Matrix transpose() const {
    Matrix t(cols_, rows_);
    for (std::int64_t i = 0; i < rows_; ++i)
      for (std::int64_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    return t;
  }

  Matrix& operator+=(const Matrix& o) {
    same_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
    return *this;
  }
  Matrix& operator-=(const Matrix& o) {
    same_shape(o);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
    return *this;
  }
  Matrix& operator*=(const T& s) {
    for (auto& v : data_) v *= s;
    return *this;
  }
  friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
  friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
  friend Matrix operator*(Matrix a, const T& s) { return a *= s; }
  friend Matrix operator-(Matrix a) { return a *= T(-1); }

  friend Matrix operator*(const Matrix& a, const Matrix& b) {
    if (a.cols_ != b.rows_) throw DimensionMismatch("matrix product shape mismatch");
    Matrix c(a.rows_, b.cols_);
    for (std::int64_t i = 0; i < a.rows_; ++i)
      for (std::int64_t k = 0; k < a.cols_; ++k) {
        const T& aik = a(i, k);
        if (is_zero(aik)) continue;
        for (std::int64_t j = 0; j < b.cols_; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }

  friend bool operator==(const Matrix& a, const Matrix& b) {
    return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
  }

  /// Largest entry magnitude (0 for empty matrices).
  double max_abs() const {
    double m = 0;
    for (const auto& v : data_) m = std::max(m, magnitude(v));
    return m;
  }
  bool is_exactly_zero() const {
    return std::all_of(data_.begin(), data_.end(), [](const T& v) { return is_zero(v); });
  }

 private:
  void same_shape(const Matrix& o) const {
    if (o.rows_ != rows_ || o.cols_ != cols_) throw DimensionMismatch("matrix shape mismatch");
  }

  std::int64_t rows_ = 0;
  std::int64_t cols_ = 0;
  std::vector<T> data_;
};

/// Max |a - b| entrywise.
template <Scalar T>
double max_deviation(const Matrix<T>& a, const Matrix<T>& b) {
  return (a - b).max_abs();
}

namespace detail {

// Row-echelon reduction in place. Exact scalars pivot on the first nonzero
// entry; floats use partial pivoting and treat |pivot| <= tol as zero.
// Returns the pivot columns; `sign` tracks row swaps for determinants.
template <Scalar T>
std::vector<std::int64_t> echelon(Matrix<T>& a, double tol, int& sign, Matrix<T>* rhs = nullptr) {
  std::vector<std::int64_t> pivots;
  sign = 1;
  std::int64_t row = 0;
  for (std::int64_t col = 0; col < a.cols() && row < a.rows(); ++col) {
    std::int64_t piv = -1;
    if constexpr (is_exact_v<T>) {
      for (std::int64_t i = row; i < a.rows(); ++i)
        if (!is_zero(a(i, col))) { piv = i; break; }
    } else {
      double best = tol;
      for (std::int64_t i = row; i < a.rows(); ++i)
        if (magnitude(a(i, col)) > best) { best = magnitude(a(i, col)); piv = i; }
    }
    if (piv < 0) continue;
    if (piv != row) {
      for (std::int64_t j = 0; j < a.cols(); ++j) std::swap(a(row, j), a(piv, j));
      if (rhs)
        for (std::int64_t j = 0; j < rhs->cols(); ++j) std::swap((*rhs)(row, j), (*rhs)(piv, j));
      sign = -sign;
    }
    const T p = a(row, col);
    for (std::int64_t i = row + 1; i < a.rows(); ++i) {
      if (is_zero(a(i, col))) continue;
      T f = a(i, col) / p;
      for (std::int64_t j = col; j < a.cols(); ++j) a(i, j) -= f * a(row, j);
      a(i, col) = T(0);
      if (rhs)
        for (std::int64_t j = 0; j < rhs->cols(); ++j) (*rhs)(i, j) -= f * (*rhs)(row, j);
    }
    pivots.push_back(col);
    ++row;
  }
  return pivots;
}

template <Scalar T>
double default_tol(const Matrix<T>& a) {
  if constexpr (is_exact_v<T>) return 0;
  else return 1e-13 * std::max(1.0, a.max_abs()) * static_cast<double>(std::max(a.rows(), a.cols()));
}

}  // namespace detail

template <Scalar T>
T determinant(const Matrix<T>& a) {
  if (a.rows() != a.cols()) throw DimensionMismatch("determinant of a non-square matrix");
  if (a.rows() == 0) return T(1);
  Matrix<T> w = a;
  int sign = 1;
  auto piv = detail::echelon(w, 0.0, sign);
  if (static_cast<std::int64_t>(piv.size()) < a.rows()) return T(0);
  T det = sign > 0 ? T(1) : T(-1);
  for (std::int64_t i = 0; i < a.rows(); ++i) det *= w(i, i);
  return det;
}

/// Numerical rank; exact for rational scalars. `tol < 0` picks a default.
template <Scalar T>
std::int64_t rank(const Matrix<T>& a, double tol = -1) {
  Matrix<T> w = a;
  int sign = 1;
  return static_cast<std::int64_t>(detail::echelon(w, tol < 0 ? detail::default_tol(a) : tol, sign).size());
}

/// Solves A X = B for square A; throws SingularMatrix.
template <Scalar T>
Matrix<T> solve(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.rows() != a.cols()) throw DimensionMismatch("solve needs a square matrix");
  if (b.rows() != a.rows()) throw DimensionMismatch("solve: right-hand side has wrong height");
  const std::int64_t n = a.rows();
  Matrix<T> w = a, x = b;
  int sign = 1;
  auto piv = detail::echelon(w, detail::default_tol(a), sign, &x);
  if (static_cast<std::int64_t>(piv.size()) < n) throw SingularMatrix("solve: matrix is singular");
  for (std::int64_t i = n - 1; i >= 0; --i) {
    for (std::int64_t j = 0; j < x.cols(); ++j) {
      T acc = x(i, j);
      for (std::int64_t k = i + 1; k < n; ++k) acc -= w(i, k) * x(k, j);
      x(i, j) = acc / w(i, i);
    }
  }
  return x;
}

template <Scalar T>
Matrix<T> inverse(const Matrix<T>& a) {
  return solve(a, Matrix<T>::identity(a.rows()));
}

/// Singular values (descending) of a float matrix.
template <Scalar T>
  requires(!is_exact_v<T>)
std::vector<double> singular_values(const Matrix<T>& a) {
  using E = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
  E m(a.rows(), a.cols());
  for (std::int64_t i = 0; i < a.rows(); ++i)
    for (std::int64_t j = 0; j < a.cols(); ++j) m(i, j) = a(i, j);
  Eigen::JacobiSVD<E> svd(m);
  const auto& s = svd.singularValues();
  return std::vector<double>(s.data(), s.data() + s.size());
}

/// Nonsingularity test: exact determinant for rational scalars, smallest
/// singular value against rel_tol * largest for floats.
template <Scalar T>
bool is_nonsingular(const Matrix<T>& a, double rel_tol) {
  if (a.rows() != a.cols()) throw DimensionMismatch("singularity test of a non-square matrix");
  if (a.rows() == 0) return true;
  if constexpr (is_exact_v<T>) {
    return !is_zero(determinant(a));
  } else {
    auto s = singular_values(a);
    return s.front() > 0 && s.back() >= rel_tol * s.front();
  }
}

}  // namespace mvop
