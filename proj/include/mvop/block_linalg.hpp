#pragma once

// Degree-blocked truncations of semi-infinite matrices, block Cholesky
// factorization of the moment matrix, and last quasi-determinants.
//
// A BlockMatrix stores the N_L x N_L truncation of a semi-infinite operator
// together with
//   * band metadata: blocks (k, l) with l - k > upper_band() or
//     k - l > lower_band() are exactly zero (an over-approximation), and
//   * valid_degree(): every stored block row k <= valid_degree() equals the
//     corresponding block row of the semi-infinite operator.
// Products of truncations are only trustworthy on rows whose summation index
// stays inside the truncation; operator* propagates that range:
//   valid(A B) = min(valid(A), valid(B) - upper(A)).

#include "mvop/graded_basis.hpp"
#include "mvop/matrix.hpp"
#include "mvop/measures.hpp"

#include <algorithm>
#include <limits>
#include <memory>
#include <vector>

namespace mvop {

inline constexpr int kUnboundedBand = std::numeric_limits<int>::max() / 4;

namespace detail {
inline int band_add(int a, int b) { return (a >= kUnboundedBand || b >= kUnboundedBand) ? kUnboundedBand : a + b; }
}  // namespace detail

template <Scalar T>
class BlockMatrix {
 public:
  using BasisPtr = std::shared_ptr<const GradedBasis>;

  BlockMatrix(BasisPtr basis, Matrix<T> data, int lower_band = kUnboundedBand, int upper_band = kUnboundedBand)
      : basis_(std::move(basis)), data_(std::move(data)), lower_(lower_band), upper_(upper_band) {
    if (!basis_) throw Error("block matrix needs a basis");
    if (data_.rows() != basis_->size() || data_.cols() != basis_->size())
      throw DimensionMismatch("block matrix data does not match the basis size");
    valid_ = basis_->max_degree();
  }

  static BlockMatrix zeros(BasisPtr basis) {
    auto n = basis->size();
    return BlockMatrix(basis, Matrix<T>(n, n), 0, 0);
  }
  static BlockMatrix identity(BasisPtr basis) {
    auto n = basis->size();
    return BlockMatrix(basis, Matrix<T>::identity(n), 0, 0);
  }

  const BasisPtr& basis() const { return basis_; }
  /// Truncation degree L.
  int degree() const { return basis_->max_degree(); }
  const Matrix<T>& dense() const { return data_; }
  Matrix<T>& dense() { return data_; }

  int lower_band() const { return lower_; }
  int upper_band() const { return upper_; }
  int valid_degree() const { return valid_; }
  void set_bands(int lower, int upper) { lower_ = lower; upper_ = upper; }
  void set_valid_degree(int v) { valid_ = std::min(v, degree()); }

  T& at(std::int64_t i, std::int64_t j) { return data_(i, j); }
  const T& at(std::int64_t i, std::int64_t j) const { return data_(i, j); }

  /// A_{[k],[l]}.
  Matrix<T> block(int k, int l) const {
    return data_.block(basis_->block_offset(k), basis_->block_offset(l), basis_->block_length(k),
                       basis_->block_length(l));
  }
  void set_block(int k, int l, const Matrix<T>& b) {
    if (b.rows() != basis_->block_length(k) || b.cols() != basis_->block_length(l))
      throw DimensionMismatch("block shape mismatch");
    data_.set_block(basis_->block_offset(k), basis_->block_offset(l), b);
  }

  /// Rows of degrees [k0, k1] and columns of degrees [l0, l1].
  Matrix<T> blocks(int k0, int k1, int l0, int l1) const {
    auto r0 = basis_->block_offset(k0), c0 = basis_->block_offset(l0);
    return data_.block(r0, c0, basis_->block_offset(k1 + 1) - r0, basis_->block_offset(l1 + 1) - c0);
  }

  /// A^{[k]}: leading truncation to degrees 0..k-1.
  Matrix<T> leading(int k) const {
    auto n = basis_->block_offset(k);
    return data_.block(0, 0, n, n);
  }

  BlockMatrix transpose() const {
    BlockMatrix t(basis_, data_.transpose(), upper_, lower_);
    // Columns of a product are not tracked; only plain truncations stay valid.
    t.valid_ = valid_ == degree() ? valid_ : -1;
    return t;
  }

  friend BlockMatrix operator*(const BlockMatrix& a, const BlockMatrix& b) {
    a.same_basis(b);
    BlockMatrix c(a.basis_, a.data_ * b.data_, detail::band_add(a.lower_, b.lower_),
                  detail::band_add(a.upper_, b.upper_));
    int reach = a.upper_ >= kUnboundedBand ? a.degree() + 1 : a.upper_;
    c.valid_ = std::min(a.valid_, b.valid_ - reach);
    return c;
  }
  friend BlockMatrix operator+(const BlockMatrix& a, const BlockMatrix& b) {
    a.same_basis(b);
    BlockMatrix c(a.basis_, a.data_ + b.data_, std::max(a.lower_, b.lower_), std::max(a.upper_, b.upper_));
    c.valid_ = std::min(a.valid_, b.valid_);
    return c;
  }
  friend BlockMatrix operator-(const BlockMatrix& a, const BlockMatrix& b) {
    a.same_basis(b);
    BlockMatrix c(a.basis_, a.data_ - b.data_, std::max(a.lower_, b.lower_), std::max(a.upper_, b.upper_));
    c.valid_ = std::min(a.valid_, b.valid_);
    return c;
  }
  friend BlockMatrix operator*(BlockMatrix a, const T& s) {
    a.data_ *= s;
    return a;
  }

  /// Largest |entry| among blocks (k, l) with l - k outside [-lower, upper].
  double band_violation(int lower, int upper, int max_row_degree) const {
    double worst = 0;
    for (int k = 0; k <= std::min(max_row_degree, degree()); ++k)
      for (int l = 0; l <= degree(); ++l)
        if (l - k > upper || k - l > lower) worst = std::max(worst, block(k, l).max_abs());
    return worst;
  }

 private:
  void same_basis(const BlockMatrix& o) const {
    if (o.basis_->size() != basis_->size() || o.basis_->dimension() != basis_->dimension())
      throw DimensionMismatch("block matrices use different bases");
  }

  BasisPtr basis_;
  Matrix<T> data_;
  int lower_;
  int upper_;
  int valid_ = 0;
};

/// G_{alpha,beta} = moment(alpha + beta) on degrees <= L.
template <Scalar T>
BlockMatrix<T> build_moment_matrix(const MomentFunctional<T>& measure, std::shared_ptr<const GradedBasis> basis) {
  if (measure.dimension() != basis->dimension()) throw DimensionMismatch("measure and basis dimensions differ");
  const auto n = basis->size();
  Matrix<T> g(n, n);
  for (std::int64_t i = 0; i < n; ++i)
    for (std::int64_t j = i; j < n; ++j) {
      g(i, j) = measure.moment(basis->multiindex_at(i) + basis->multiindex_at(j));
      g(j, i) = g(i, j);
    }
  return BlockMatrix<T>(std::move(basis), std::move(g));
}

template <Scalar T>
BlockMatrix<T> build_moment_matrix(const MomentFunctional<T>& measure, int max_degree) {
  return build_moment_matrix(measure, GradedBasis::make(measure.dimension(), max_degree));
}

struct CholeskyOptions {
  /// Float path: H_[k] is singular when sigma_min < tol * sigma_max.
  double singular_tol = 1e-10;
};

/// G = S^{-1} H (S^{-1})^T with S block lower unitriangular.
template <Scalar T>
struct CholeskyResult {
  BlockMatrix<T> s;
  BlockMatrix<T> s_inv;
  std::vector<Matrix<T>> h;

  int degree() const { return s.degree(); }
  const std::shared_ptr<const GradedBasis>& basis() const { return s.basis(); }

  BlockMatrix<T> h_matrix() const {
    auto hm = BlockMatrix<T>::zeros(s.basis());
    for (int k = 0; k <= degree(); ++k) hm.set_block(k, k, h[static_cast<std::size_t>(k)]);
    return hm;
  }
};

/// Inverse of a block lower unitriangular matrix by block forward substitution.
template <Scalar T>
BlockMatrix<T> invert_unitriangular(const BlockMatrix<T>& s) {
  const int L = s.degree();
  auto inv = BlockMatrix<T>::identity(s.basis());
  for (int k = 0; k <= L; ++k) {
    if (!(s.block(k, k) == Matrix<T>::identity(s.basis()->block_length(k))))
      throw Error("invert_unitriangular: diagonal block " + std::to_string(k) + " is not the identity");
    for (int l = k + 1; l <= L; ++l)
      if (!s.block(k, l).is_exactly_zero()) throw Error("invert_unitriangular: matrix is not block lower triangular");
  }
  // (S^{-1})_{k,l} = -sum_{l <= j < k} S_{k,j} (S^{-1})_{j,l}
  for (int l = 0; l <= L; ++l)
    for (int k = l + 1; k <= L; ++k) {
      Matrix<T> acc(s.basis()->block_length(k), s.basis()->block_length(l));
      for (int j = l; j < k; ++j) acc += s.block(k, j) * inv.block(j, l);
      inv.set_block(k, l, -acc);
    }
  inv.set_bands(kUnboundedBand, 0);
  return inv;
}

/// D - C A^{-1} B for the partition [[A, B], [C, D]].
template <Scalar T>
Matrix<T> last_quasi_determinant(const Matrix<T>& a, const Matrix<T>& b, const Matrix<T>& c, const Matrix<T>& d) {
  if (a.rows() != a.cols()) throw DimensionMismatch("quasi-determinant: leading block must be square");
  if (b.rows() != a.rows() || c.cols() != a.cols() || d.rows() != c.rows() || d.cols() != b.cols())
    throw DimensionMismatch("quasi-determinant: partition shapes are inconsistent");
  if (a.rows() == 0) return d;
  Matrix<T> ainv_b;
  try {
    ainv_b = solve(a, b);
  } catch (const SingularMatrix&) {
    throw SingularMatrix("quasi-determinant: singular leading block");
  }
  return d - c * ainv_b;
}

/// Theta_*(M) of a square matrix whose trailing block has size `tail`.
template <Scalar T>
Matrix<T> last_quasi_determinant(const Matrix<T>& m, std::int64_t tail) {
  auto lead = m.rows() - tail;
  return last_quasi_determinant(m.block(0, 0, lead, lead), m.block(0, lead, lead, tail), m.block(lead, 0, tail, lead),
                                m.block(lead, lead, tail, tail));
}

/// Block Cholesky by the degree-k Schur complement recursion:
///   H_k = G_kk - sum_{l<k} (S^{-1})_{kl} H_l (S^{-1})_{kl}^T
///   (S^{-1})_{ik} = (G_ik - sum_{l<k} (S^{-1})_{il} H_l (S^{-1})_{kl}^T) H_k^{-1}.
/// Throws SingularBlock(k) when H_k is singular.
template <Scalar T>
CholeskyResult<T> block_cholesky(const BlockMatrix<T>& g, const CholeskyOptions& opts = {}) {
  const int L = g.degree();
  const auto& basis = g.basis();
  auto s_inv = BlockMatrix<T>::identity(basis);
  std::vector<Matrix<T>> h;
  std::vector<Matrix<T>> h_inv;
  for (int k = 0; k <= L; ++k) {
    Matrix<T> hk = g.block(k, k);
    for (int l = 0; l < k; ++l) {
      auto skl = s_inv.block(k, l);
      hk -= skl * h[static_cast<std::size_t>(l)] * skl.transpose();
    }
    if (!is_nonsingular(hk, opts.singular_tol)) throw SingularBlock(k);
    h_inv.push_back(inverse(hk));
    h.push_back(hk);
    for (int i = k + 1; i <= L; ++i) {
      Matrix<T> acc = g.block(i, k);
      for (int l = 0; l < k; ++l)
        acc -= s_inv.block(i, l) * h[static_cast<std::size_t>(l)] * s_inv.block(k, l).transpose();
      s_inv.set_block(i, k, acc * h_inv.back());
    }
  }
  s_inv.set_bands(kUnboundedBand, 0);
  auto s = invert_unitriangular(s_inv);
  return CholeskyResult<T>{std::move(s), std::move(s_inv), std::move(h)};
}

/// S_k^m: block rows k..k+m-1, block columns 0..k+m-1.
template <Scalar T>
Matrix<T> slice_s(const CholeskyResult<T>& chol, int k, int m) {
  if (k < 0 || m < 0 || k + m - 1 > chol.degree())
    throw DegreeOverflow("slice_S(k=" + std::to_string(k) + ", m=" + std::to_string(m) +
                         ") needs truncation degree >= " + std::to_string(k + m - 1));
  if (m == 0) return Matrix<T>(0, chol.basis()->block_offset(k));
  return chol.s.blocks(k, k + m - 1, 0, k + m - 1);
}

}  // namespace mvop
