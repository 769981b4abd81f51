#pragma once

// Monic multivariate orthogonal polynomial families P = S chi, shift matrices
// and Jacobi matrices J_a = S Lambda_a S^{-1}.

#include "mvop/block_linalg.hpp"
#include "mvop/measures.hpp"
#include "mvop/poly.hpp"

#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace mvop {

/// Values of d^j/dn x^beta at x for every beta with |beta| <= max_degree, in
/// basis order (plain monomial vector when n is the order-0 direction).
template <Scalar T>
std::vector<T> monomial_column(const GradedBasis& basis, std::span<const T> x, int max_degree,
                               const Direction<T>& n) {
  if (static_cast<int>(x.size()) != basis.dimension()) throw DimensionMismatch("point has wrong dimension");
  if (max_degree > basis.max_degree()) throw DegreeOverflow("monomial column beyond truncation degree");
  if (n.dimension != basis.dimension()) throw DimensionMismatch("direction dimension mismatch");
  const int D = basis.dimension();
  // powers[i][e] = x_i^e
  std::vector<std::vector<T>> powers(static_cast<std::size_t>(D));
  for (int i = 0; i < D; ++i) {
    auto& pw = powers[static_cast<std::size_t>(i)];
    pw.assign(static_cast<std::size_t>(std::max(max_degree, 0)) + 1, T(1));
    for (int e = 1; e <= max_degree; ++e) pw[static_cast<std::size_t>(e)] = pw[static_cast<std::size_t>(e - 1)] * x[static_cast<std::size_t>(i)];
  }
  auto alphas = block_indices(D, n.order);
  const auto len = basis.block_offset(max_degree + 1);
  std::vector<T> col(static_cast<std::size_t>(len), T(0));
  for (std::int64_t pos = 0; pos < len; ++pos) {
    const auto& beta = basis.multiindex_at(pos);
    T acc(0);
    for (std::size_t s = 0; s < alphas.size(); ++s) {
      const T& coef = n.coefficients[s];
      if (is_zero(coef) || !beta.dominates(alphas[s])) continue;
      T term = coef;
      for (int i = 0; i < D; ++i) {
        for (int t = 0; t < alphas[s][i]; ++t) term *= from_int<T>(beta[i] - t);
        term *= powers[static_cast<std::size_t>(i)][static_cast<std::size_t>(beta[i] - alphas[s][i])];
      }
      acc += term;
    }
    col[static_cast<std::size_t>(pos)] = acc;
  }
  return col;
}

template <Scalar T>
class MVOPRFamily {
 public:
  MVOPRFamily(CholeskyResult<T> chol, MeasurePtr<T> measure = nullptr)
      : chol_(std::move(chol)), measure_(std::move(measure)) {}

  /// Moment matrix and block Cholesky up to degree L.
  static MVOPRFamily from_measure(MeasurePtr<T> measure, int max_degree, const CholeskyOptions& opts = {}) {
    auto g = build_moment_matrix(*measure, max_degree);
    return MVOPRFamily(block_cholesky(g, opts), std::move(measure));
  }

  const std::shared_ptr<const GradedBasis>& basis() const { return chol_.basis(); }
  int dimension() const { return basis()->dimension(); }
  int degree() const { return chol_.degree(); }
  const CholeskyResult<T>& cholesky() const { return chol_; }
  const BlockMatrix<T>& s() const { return chol_.s; }
  const Matrix<T>& h(int k) const { return chol_.h.at(static_cast<std::size_t>(k)); }
  const MeasurePtr<T>& measure() const { return measure_; }

  /// P_[k]: one monic polynomial per multi-index of degree k.
  std::vector<MPoly<T>> polynomial_block(int k) const {
    check_degree(k);
    const auto& b = *basis();
    std::vector<MPoly<T>> out;
    for (std::int64_t i = b.block_offset(k); i < b.block_offset(k + 1); ++i) {
      MPoly<T> p(dimension());
      for (std::int64_t j = 0; j < b.block_offset(k + 1); ++j) p.add_term(b.multiindex_at(j), chol_.s.at(i, j));
      out.push_back(std::move(p));
    }
    return out;
  }

  std::vector<MPoly<T>> polynomials(int max_degree) const {
    std::vector<MPoly<T>> all;
    for (int k = 0; k <= max_degree; ++k)
      for (auto& p : polynomial_block(k)) all.push_back(std::move(p));
    return all;
  }

  /// (d^j P_[k_lo] / dn, ..., d^j P_[k_hi] / dn) at x, stacked.
  std::vector<T> eval_stack(std::span<const T> x, int k_lo, int k_hi, const Direction<T>& n) const {
    if (k_lo < 0 || k_lo > k_hi + 1) throw DegreeOverflow("eval_stack: bad degree range");
    if (k_hi >= 0) check_degree(k_hi);
    const auto& b = *basis();
    auto chi = monomial_column<T>(b, x, std::max(k_hi, 0), n);
    std::vector<T> out;
    for (std::int64_t i = b.block_offset(k_lo); i < b.block_offset(k_hi + 1); ++i) {
      T acc(0);
      for (std::int64_t j = 0; j <= i; ++j) acc += chol_.s.at(i, j) * chi[static_cast<std::size_t>(j)];
      out.push_back(acc);
    }
    return out;
  }
  std::vector<T> eval_stack(std::span<const T> x, int k_lo, int k_hi) const {
    return eval_stack(x, k_lo, k_hi, Direction<T>::identity(dimension()));
  }
  std::vector<T> eval_stack(const std::vector<T>& x, int k_lo, int k_hi) const {
    return eval_stack(std::span<const T>(x), k_lo, k_hi);
  }

 private:
  void check_degree(int k) const {
    if (k < 0 || k > degree())
      throw DegreeOverflow("degree " + std::to_string(k) + " exceeds truncation degree " + std::to_string(degree()));
  }

  CholeskyResult<T> chol_;
  MeasurePtr<T> measure_;
};

/// Lambda_1..Lambda_D on the basis: (Lambda_a)_{alpha, alpha+e_a} = 1.
template <Scalar T>
std::vector<BlockMatrix<T>> build_shift(std::shared_ptr<const GradedBasis> basis) {
  std::vector<BlockMatrix<T>> out;
  const int L = basis->max_degree();
  const auto below_top = basis->block_offset(L);
  for (int a = 0; a < basis->dimension(); ++a) {
    auto lam = BlockMatrix<T>::zeros(basis);
    for (std::int64_t i = 0; i < below_top; ++i) lam.at(i, basis->shifted_position(basis->multiindex_at(i), a)) = T(1);
    lam.set_bands(0, 1);
    out.push_back(std::move(lam));
  }
  return out;
}

/// Q(A_1, ..., A_D) for pairwise commuting block matrices, e.g. Q(Lambda) or Q(J).
template <Scalar T>
BlockMatrix<T> apply_poly(const MPoly<T>& q, const std::vector<BlockMatrix<T>>& a) {
  if (static_cast<int>(a.size()) != q.dimension()) throw DimensionMismatch("operator count does not match polynomial dimension");
  if (q.is_zero()) throw Error("cannot apply the zero polynomial");
  const auto& basis = a.front().basis();
  if (q.degree() > basis->max_degree()) throw DegreeOverflow("polynomial degree exceeds truncation degree");
  std::optional<BlockMatrix<T>> acc;
  // reuse powers A_i^e across terms
  std::vector<std::vector<BlockMatrix<T>>> powers(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) powers[i].push_back(BlockMatrix<T>::identity(basis));
  auto pow = [&](std::size_t i, int e) -> const BlockMatrix<T>& {
    while (static_cast<int>(powers[i].size()) <= e) powers[i].push_back(powers[i].back() * a[i]);
    return powers[i][static_cast<std::size_t>(e)];
  };
  for (const auto& [alpha, c] : q.terms()) {
    auto term = BlockMatrix<T>::identity(basis);
    for (int i = 0; i < q.dimension(); ++i)
      if (alpha[i] > 0) term = term * pow(static_cast<std::size_t>(i), alpha[i]);
    term = term * c;
    acc = acc ? *acc + term : term;
  }
  return *acc;
}

/// Q(Lambda); rows of degree <= L - deg Q are exact.
template <Scalar T>
BlockMatrix<T> apply_poly_to_shift(const MPoly<T>& q, const std::vector<BlockMatrix<T>>& shifts) {
  auto r = apply_poly(q, shifts);
  r.set_valid_degree(r.degree() - std::max(q.degree(), 0));
  r.set_bands(0, std::max(q.degree(), 0));
  return r;
}

/// (Q(Lambda))_{alpha, beta} = coefficient of x^{beta - alpha} in Q, read off
/// directly; used as an independent route to the shift-matrix product.
template <Scalar T>
Matrix<T> shifted_coefficients(const MPoly<T>& q, const GradedBasis& basis, std::int64_t rows, std::int64_t cols) {
  Matrix<T> out(rows, cols);
  for (std::int64_t i = 0; i < rows; ++i) {
    const auto& alpha = basis.multiindex_at(i);
    for (std::int64_t j = 0; j < cols; ++j) {
      const auto& beta = basis.multiindex_at(j);
      if (beta.dominates(alpha)) out(i, j) = q.coefficient(beta.minus(alpha));
    }
  }
  return out;
}

/// J_a = S Lambda_a S^{-1}; rows of degree <= L - 1 are exact.
template <Scalar T>
std::vector<BlockMatrix<T>> build_jacobi(const MVOPRFamily<T>& fam) {
  std::vector<BlockMatrix<T>> out;
  for (const auto& lam : build_shift<T>(fam.basis())) out.push_back(fam.s() * lam * fam.cholesky().s_inv);
  return out;
}

}  // namespace mvop
