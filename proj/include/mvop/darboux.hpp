#pragma once

// Darboux (Christoffel) transformations T dmu = Q dmu of an MVOPR family.
//
// Two independent routes to the transformed family:
//   * the oracle: block Cholesky of the perturbed moment matrix, which also
//     yields the resolvent omega = (TS) Q(Lambda) S^{-1} and M = S (TS)^{-1};
//   * the sample-matrix formula on a poised node set on Z(Q),
//       Q(x) TP_[k](x) = Q(Lambda)_{[k],[k+m]} (P_[k+m](x) - W Pstack(x)),
//       W = Sigma_[k,m] (Sigma_k^m)^{-1},
//     evaluated symbolically and divided exactly by Q.
// Node entries carry a derivative order j and a direction n; columns of the
// sample matrices are d^j P / dn at the node (confluent case for j >= 1).

#include "mvop/block_linalg.hpp"
#include "mvop/mvopr.hpp"
#include "mvop/poly.hpp"
#include "mvop/poly_io.hpp"
#include "mvop/tolerances.hpp"

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mvop {

template <Scalar T>
struct DarbouxSpec {
  int dimension = 1;
  std::vector<Factor<T>> factors;
  MPoly<T> q{1};
  int m = 0;

  /// Q = prod R_a^{d_a}; every R_a must be non-constant.
  static DarbouxSpec make(int dimension, std::vector<Factor<T>> factors) {
    DarbouxSpec s;
    s.dimension = dimension;
    int expected = 0;
    for (const auto& f : factors) {
      if (f.poly.dimension() != dimension) throw DimensionMismatch("factor dimension mismatch");
      if (f.poly.degree() < 1) throw Error("factor " + format_poly(f.poly) + " is constant");
      if (f.power < 1) throw Error("factor multiplicity must be >= 1");
      expected += f.poly.degree() * f.power;
    }
    s.q = expand_factored<T>(factors, dimension);
    s.factors = std::move(factors);
    s.m = s.q.degree();
    if (s.m != expected) throw Error("expanded perturbation degree does not match the factor degrees");
    return s;
  }
  /// Q = 1.
  static DarbouxSpec identity(int dimension) {
    DarbouxSpec s;
    s.dimension = dimension;
    s.q = MPoly<T>::constant(dimension, T(1));
    return s;
  }

  int factor_count() const { return static_cast<int>(factors.size()); }
  int factor_degree(int a) const { return factors.at(static_cast<std::size_t>(a)).poly.degree(); }
  int multiplicity(int a) const { return factors.at(static_cast<std::size_t>(a)).power; }
  bool confluent() const {
    return std::any_of(factors.begin(), factors.end(), [](const Factor<T>& f) { return f.power > 1; });
  }
};

template <Scalar T>
struct NodeEntry {
  std::vector<T> point;
  int factor = 0;
  int order = 0;
  Direction<T> direction;
};

template <Scalar T>
struct NodeSet {
  std::vector<NodeEntry<T>> entries;

  std::size_t size() const { return entries.size(); }
  bool empty() const { return entries.empty(); }
  long count(int factor) const {
    return std::count_if(entries.begin(), entries.end(), [&](const auto& e) { return e.factor == factor; });
  }
  long count(int factor, int order) const {
    return std::count_if(entries.begin(), entries.end(),
                         [&](const auto& e) { return e.factor == factor && e.order == order; });
  }
};

/// |R(p)| test: exact for rational scalars, scaled by the coefficient size otherwise.
template <Scalar T>
bool on_variety(const MPoly<T>& r, const std::vector<T>& p, double tol) {
  T v = r(p);
  if constexpr (is_exact_v<T>) return is_zero(v);
  else return magnitude(v) <= tol * std::max(1.0, r.max_coefficient());
}

/// d^j(R^j)/dn divisible by R: such directions cannot separate nodes on Z(R).
template <Scalar T>
bool forbidden_direction(const MPoly<T>& r, const Direction<T>& n) {
  if (n.order == 0) return false;
  auto d = directional_derivative(power(r, n.order), n);
  if (d.is_zero()) return true;
  auto res = divide(d, r);
  if constexpr (is_exact_v<T>) return res.remainder.is_zero();
  else return res.remainder.max_coefficient() <= 1e-12 * std::max(1.0, d.max_coefficient());
}

/// Shape and tag checks on a node set; throws NodeOffVariety for points off Z(R_a).
template <Scalar T>
void validate_nodes(const DarbouxSpec<T>& spec, const NodeSet<T>& nodes, const Tolerances& tol = {}) {
  std::map<std::pair<int, int>, std::vector<std::vector<T>>> groups;
  for (std::size_t c = 0; c < nodes.size(); ++c) {
    const auto& e = nodes.entries[c];
    std::string where = "node " + std::to_string(c);
    if (static_cast<int>(e.point.size()) != spec.dimension) throw DimensionMismatch(where + ": point has wrong dimension");
    if (e.factor < 0 || e.factor >= spec.factor_count()) throw Error(where + ": factor index out of range");
    if (e.order < 0 || e.order >= spec.multiplicity(e.factor))
      throw Error(where + ": derivative order " + std::to_string(e.order) + " must be below the factor multiplicity " +
                  std::to_string(spec.multiplicity(e.factor)));
    if (e.direction.order != e.order) throw Error(where + ": direction order differs from the node order");
    e.direction.validate();
    if (e.direction.dimension != spec.dimension) throw DimensionMismatch(where + ": direction has wrong dimension");
    if (!on_variety(spec.factors[static_cast<std::size_t>(e.factor)].poly, e.point, tol.variety))
      throw NodeOffVariety(where + " is not on the zero set of factor " + std::to_string(e.factor));
    auto& g = groups[{e.factor, e.order}];
    if (std::find(g.begin(), g.end(), e.direction.coefficients) == g.end()) g.push_back(e.direction.coefficients);
  }
  for (const auto& [key, dirs] : groups) {
    if (dirs.size() < 2) continue;
    Matrix<T> m(static_cast<std::int64_t>(dirs.size()), static_cast<std::int64_t>(dirs.front().size()));
    for (std::size_t i = 0; i < dirs.size(); ++i)
      for (std::size_t j = 0; j < dirs[i].size(); ++j) m(static_cast<std::int64_t>(i), static_cast<std::int64_t>(j)) = dirs[i][j];
    if (rank(m) != m.rows())
      throw Error("directions of order " + std::to_string(key.second) + " on factor " + std::to_string(key.first) +
                  " are linearly dependent");
  }
}

// ---------------------------------------------------------------------------
// Oracle and resolvent

template <Scalar T>
struct Resolvent {
  BlockMatrix<T> omega;
  BlockMatrix<T> m;
  BlockMatrix<T> q_lambda;
  MVOPRFamily<T> transformed;
};

/// omega = TS Q(Lambda) S^{-1}, M = S TS^{-1}, with TS, TH from the block
/// Cholesky of the moment matrix of Q dmu (the ground-truth family).
template <Scalar T>
Resolvent<T> resolvent_via_two_choleskys(const MVOPRFamily<T>& fam, const DarbouxSpec<T>& spec,
                                         const CholeskyOptions& opts = {}) {
  if (!fam.measure()) throw Error("the oracle needs the family's measure");
  if (spec.dimension != fam.dimension()) throw DimensionMismatch("perturbation dimension mismatch");
  if (spec.m > fam.degree())
    throw DegreeOverflow("perturbation degree " + std::to_string(spec.m) + " exceeds truncation degree " +
                         std::to_string(fam.degree()));
  auto tmu = perturb(fam.measure(), spec.q);
  auto tg = build_moment_matrix(*tmu, fam.basis());
  MVOPRFamily<T> tfam(block_cholesky(tg, opts), tmu);
  auto ql = apply_poly_to_shift(spec.q, build_shift<T>(fam.basis()));
  auto omega = tfam.s() * ql * fam.cholesky().s_inv;
  omega.set_bands(0, spec.m);
  auto mm = fam.s() * tfam.cholesky().s_inv;
  mm.set_bands(kUnboundedBand, 0);
  return Resolvent<T>{std::move(omega), std::move(mm), std::move(ql), std::move(tfam)};
}

struct IdentityCheck {
  std::string name;
  double max_violation = 0;
  bool passed = true;
  std::string detail;
};

struct IdentityReport {
  std::vector<IdentityCheck> checks;
  bool all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed; });
  }
  double max_violation() const {
    double v = 0;
    for (const auto& c : checks) v = std::max(v, c.max_violation);
    return v;
  }
};

namespace detail {

template <Scalar T>
IdentityCheck compare_matrices(std::string name, const Matrix<T>& a, const Matrix<T>& b, double tol, std::string detail) {
  IdentityCheck c{std::move(name), max_deviation(a, b), true, std::move(detail)};
  if constexpr (is_exact_v<T>) c.passed = a == b;
  else c.passed = c.max_violation <= tol * std::max(1.0, std::max(a.max_abs(), b.max_abs()));
  return c;
}

/// Rows of degree <= k_max, all columns.
template <Scalar T>
Matrix<T> leading_rows(const BlockMatrix<T>& a, int k_max) {
  return a.dense().block(0, 0, a.basis()->block_offset(k_max + 1), a.basis()->size());
}

}  // namespace detail

/// Banded structure, top band and diagonal of omega, omega from M, LU/UL of
/// Q(J) and Q(TJ), and the truncated determinant identity.
template <Scalar T>
IdentityReport resolvent_band_identities(const Resolvent<T>& res, const MVOPRFamily<T>& fam, const DarbouxSpec<T>& spec,
                                         const Tolerances& tol = {}) {
  IdentityReport rep;
  const int L = fam.degree(), m = spec.m, top = L - m;
  const auto& basis = *fam.basis();
  const auto& tfam = res.transformed;
  const std::string rows = "rows of degree <= " + std::to_string(top);

  {
    double v = res.omega.band_violation(0, m, top);
    IdentityCheck c{"omega_band", v, is_exact_v<T> ? v == 0 : v <= tol.verify * std::max(1.0, res.omega.dense().max_abs()),
                    "blocks outside diagonals 0.." + std::to_string(m) + ", " + rows};
    rep.checks.push_back(c);
  }
  {
    double worst = 0;
    bool ok = true;
    for (int k = 0; k <= top; ++k) {
      auto c = detail::compare_matrices("", res.omega.block(k, k + m), res.q_lambda.block(k, k + m), tol.verify, "");
      worst = std::max(worst, c.max_violation);
      ok = ok && c.passed;
    }
    rep.checks.push_back({"omega_top_band", worst, ok, "omega_[k],[k+m] = Q(Lambda)_[k],[k+m], k <= " + std::to_string(top)});
  }
  {
    double worst = 0;
    bool ok = true;
    for (int k = 0; k <= top; ++k) {
      auto expect = tfam.h(k) * inverse(fam.h(k));
      auto c = detail::compare_matrices("", res.omega.block(k, k), expect, tol.verify, "");
      worst = std::max(worst, c.max_violation);
      ok = ok && c.passed;
    }
    rep.checks.push_back({"omega_diagonal", worst, ok, "omega_[k],[k] = TH_[k] H_[k]^{-1}, k <= " + std::to_string(top)});
  }
  {
    // (TH) M^T H^{-1} = omega
    auto th = tfam.cholesky().h_matrix().dense();
    Matrix<T> hinv(basis.size(), basis.size());
    for (int k = 0; k <= L; ++k) hinv.set_block(basis.block_offset(k), basis.block_offset(k), inverse(fam.h(k)));
    auto lhs = th * res.m.dense().transpose() * hinv;
    auto n = basis.block_offset(top + 1);
    rep.checks.push_back(detail::compare_matrices("omega_from_m", lhs.block(0, 0, n, basis.size()),
                                                  detail::leading_rows(res.omega, top), tol.verify,
                                                  "(TH) M^T H^{-1} = omega, " + rows));
  }
  auto qj = apply_poly(spec.q, build_jacobi(fam));
  auto qtj = apply_poly(spec.q, build_jacobi(tfam));
  rep.checks.push_back(detail::compare_matrices("lu_q_of_j", detail::leading_rows(qj, top),
                                                detail::leading_rows(res.m * res.omega, top), tol.verify,
                                                "Q(J) = M omega, " + rows));
  rep.checks.push_back(detail::compare_matrices("ul_q_of_tj", detail::leading_rows(qtj, top),
                                                detail::leading_rows(res.omega * res.m, top), tol.verify,
                                                "Q(TJ) = omega M, " + rows));
  {
    double worst = 0;
    bool ok = true;
    T ratio(1);
    for (int k = 1; k <= top + 1; ++k) {
      ratio = ratio * determinant(tfam.h(k - 1)) / determinant(fam.h(k - 1));
      T lhs = determinant(qj.leading(k));
      double diff = magnitude(T(lhs - ratio));
      if constexpr (is_exact_v<T>) ok = ok && lhs == ratio;
      else {
        diff /= std::max(1.0, magnitude(ratio));
        ok = ok && diff <= tol.verify;
      }
      worst = std::max(worst, diff);
    }
    rep.checks.push_back({"det_identity", worst, ok,
                          "det Q(J)^[k] = prod_{l<k} det TH_[l] / det H_[l], k <= " + std::to_string(top + 1)});
  }
  {
    auto g = build_moment_matrix(*fam.measure(), fam.basis());
    auto tg = build_moment_matrix(*tfam.measure(), fam.basis());
    auto n = basis.block_offset(top + 1);
    rep.checks.push_back(detail::compare_matrices("perturbed_moments", (res.q_lambda * g).dense().block(0, 0, n, basis.size()),
                                                  tg.dense().block(0, 0, n, basis.size()), tol.verify,
                                                  "TG = Q(Lambda) G, " + rows));
  }
  return rep;
}

struct ResidualReport {
  double max_residual = 0;
  /// Every residual is exactly zero (exact scalars only).
  bool exact_zero = true;
  long evaluations = 0;
};

/// sum_{i=0}^{m} omega_[k],[k+i] d^j P_[k+i]/dn (p) at every node entry, k <= L - m.
template <Scalar T>
ResidualReport kernel_check(const Resolvent<T>& res, const MVOPRFamily<T>& fam, const DarbouxSpec<T>& spec,
                            const NodeSet<T>& nodes, const Tolerances& tol = {}) {
  validate_nodes(spec, nodes, tol);
  ResidualReport rep;
  const int L = fam.degree(), m = spec.m;
  const auto& basis = *fam.basis();
  for (const auto& e : nodes.entries) {
    auto v = fam.eval_stack(std::span<const T>(e.point), 0, L, e.direction);
    for (int k = 0; k <= L - m; ++k) {
      for (std::int64_t row = basis.block_offset(k); row < basis.block_offset(k + 1); ++row) {
        T acc(0);
        for (std::int64_t col = basis.block_offset(k); col < basis.block_offset(k + m + 1); ++col)
          acc += res.omega.at(row, col) * v[static_cast<std::size_t>(col)];
        rep.max_residual = std::max(rep.max_residual, magnitude(acc));
        rep.exact_zero = rep.exact_zero && is_zero(acc);
        ++rep.evaluations;
      }
    }
  }
  if constexpr (!is_exact_v<T>) rep.exact_zero = rep.max_residual == 0;
  return rep;
}

// ---------------------------------------------------------------------------
// Sample matrices and the Christoffel formula

template <Scalar T>
struct SampleMatrices {
  Matrix<T> square;  // Sigma_k^m, r x r
  Matrix<T> top;     // Sigma_[k,m], |[k+m]| x r
};

inline std::int64_t node_count_needed(int dimension, int k, int m) { return m == 0 ? 0 : window_size(dimension, k, m); }

namespace detail {
template <Scalar T>
void check_transform_degree(const MVOPRFamily<T>& fam, const DarbouxSpec<T>& spec, int k) {
  if (k < 0) throw DegreeOverflow("transform degree must be >= 0");
  if (k + spec.m > fam.degree())
    throw DegreeOverflow("degree-" + std::to_string(k) + " transform with deg Q = " + std::to_string(spec.m) +
                         " needs truncation degree L >= " + std::to_string(k + spec.m) + " (have " +
                         std::to_string(fam.degree()) + ")");
}
}  // namespace detail

template <Scalar T>
SampleMatrices<T> build_sample_matrices(const MVOPRFamily<T>& fam, const DarbouxSpec<T>& spec, const NodeSet<T>& nodes,
                                        int k, const Tolerances& tol = {}) {
  detail::check_transform_degree(fam, spec, k);
  const auto r = node_count_needed(spec.dimension, k, spec.m);
  if (static_cast<std::int64_t>(nodes.size()) != r)
    throw DimensionMismatch("degree-" + std::to_string(k) + " transform needs " + std::to_string(r) + " node entries, got " +
                            std::to_string(nodes.size()));
  validate_nodes(spec, nodes, tol);
  const auto& basis = *fam.basis();
  const auto tail = basis.block_length(k + spec.m);
  SampleMatrices<T> out{Matrix<T>(r, r), Matrix<T>(tail, r)};
  for (std::int64_t c = 0; c < r; ++c) {
    const auto& e = nodes.entries[static_cast<std::size_t>(c)];
    auto v = fam.eval_stack(std::span<const T>(e.point), k, k + spec.m, e.direction);
    for (std::int64_t i = 0; i < r; ++i) out.square(i, c) = v[static_cast<std::size_t>(i)];
    for (std::int64_t i = 0; i < tail; ++i) out.top(i, c) = v[static_cast<std::size_t>(r + i)];
  }
  return out;
}

template <Scalar T>
struct PoisednessResult {
  bool poised = false;
  /// det Sigma (exact scalars: the certificate itself).
  T determinant{0};
  /// Float scalars: smallest and largest singular values.
  double min_singular_value = 0;
  double max_singular_value = 0;
  /// |det| for exact scalars, s_min for floats.
  double certificate = 0;
  std::string certificate_text;
};

template <Scalar T>
PoisednessResult<T> poisedness(const Matrix<T>& sigma, double rel_tol = Tolerances{}.poised) {
  if (sigma.rows() != sigma.cols()) throw DimensionMismatch("poisedness needs a square sample matrix");
  PoisednessResult<T> r;
  r.determinant = determinant(sigma);
  if (sigma.rows() == 0) {
    r.poised = true;
    r.certificate = 1;
    r.certificate_text = "1";
    return r;
  }
  if constexpr (is_exact_v<T>) {
    r.poised = !is_zero(r.determinant);
    r.certificate = magnitude(r.determinant);
    r.certificate_text = to_string(r.determinant);
  } else {
    auto s = singular_values(sigma);
    r.max_singular_value = s.front();
    r.min_singular_value = s.back();
    r.poised = s.front() > 0 && s.back() >= rel_tol * s.front();
    r.certificate = s.back();
    r.certificate_text = detail::format_double(s.back());
  }
  return r;
}

/// TP_[k] by the quasi-determinant formula, divided exactly by Q.
template <Scalar T>
std::vector<MPoly<T>> christoffel_transform(const MVOPRFamily<T>& fam, const DarbouxSpec<T>& spec, const NodeSet<T>& nodes,
                                            int k, const Tolerances& tol = {}) {
  auto sm = build_sample_matrices(fam, spec, nodes, k, tol);
  auto pr = poisedness(sm.square, tol.poised);
  if (!pr.poised)
    throw NotPoised("node set is not poised for degree " + std::to_string(k) + " (certificate " + pr.certificate_text + ")");
  const auto r = sm.square.rows();
  const auto tail = sm.top.rows();
  // W^T = Sigma^{-T} Sigma_[k,m]^T
  Matrix<T> wt = r > 0 ? solve(sm.square.transpose(), sm.top.transpose()) : Matrix<T>(0, tail);

  std::vector<MPoly<T>> lower;
  for (int l = k; l < k + spec.m; ++l)
    for (auto& p : fam.polynomial_block(l)) lower.push_back(std::move(p));
  auto upper = fam.polynomial_block(k + spec.m);
  std::vector<MPoly<T>> bracket;
  for (std::int64_t i = 0; i < tail; ++i) {
    MPoly<T> b = upper[static_cast<std::size_t>(i)];
    for (std::int64_t c = 0; c < r; ++c) b -= lower[static_cast<std::size_t>(c)] * wt(c, i);
    bracket.push_back(std::move(b));
  }

  const auto& basis = *fam.basis();
  auto ql = shifted_coefficients(spec.q, basis, basis.block_offset(k + 1), basis.block_offset(k + spec.m + 1));
  const auto row0 = basis.block_offset(k), col0 = basis.block_offset(k + spec.m);
  std::vector<MPoly<T>> out;
  for (std::int64_t a = 0; a < basis.block_length(k); ++a) {
    MPoly<T> num(spec.dimension);
    for (std::int64_t i = 0; i < tail; ++i) {
      const T& c = ql(row0 + a, col0 + i);
      if (!is_zero(c)) num += bracket[static_cast<std::size_t>(i)] * c;
    }
    auto div = divide(num, spec.q);
    bool exact_quotient;
    if constexpr (is_exact_v<T>) exact_quotient = div.remainder.is_zero();
    else exact_quotient = div.remainder.max_coefficient() <= tol.division * std::max(1.0, num.max_coefficient());
    if (!exact_quotient)
      throw InexactDivision("degree-" + std::to_string(k) + " numerator is not divisible by Q; remainder " +
                            format_poly(div.remainder));
    out.push_back(std::move(div.quotient));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Vandermonde matrices and the truncated ideal

/// Columns d^j chi^[k+m]/dn at each node entry: N_{k+m-1} x r.
template <Scalar T>
Matrix<T> vandermonde(const GradedBasis& basis, const NodeSet<T>& nodes, int k, int m) {
  const int top = k + m - 1;
  const std::int64_t rows = top < 0 ? 0 : basis.block_offset(top + 1);
  Matrix<T> v(rows, static_cast<std::int64_t>(nodes.size()));
  if (rows == 0) return v;
  for (std::size_t c = 0; c < nodes.size(); ++c) {
    const auto& e = nodes.entries[c];
    auto col = monomial_column<T>(basis, std::span<const T>(e.point), top, e.direction);
    for (std::int64_t i = 0; i < rows; ++i) v(i, static_cast<std::int64_t>(c)) = col[static_cast<std::size_t>(i)];
  }
  return v;
}

struct FactorizationCheck {
  double deviation = 0;
  bool holds = true;
};

/// Sigma_k^m = S_k^m V_k^m.
template <Scalar T>
FactorizationCheck sigma_factorization_check(const MVOPRFamily<T>& fam, const DarbouxSpec<T>& spec,
                                             const NodeSet<T>& nodes, int k, const Tolerances& tol = {}) {
  auto sm = build_sample_matrices(fam, spec, nodes, k, tol);
  if (sm.square.rows() == 0) return {};
  auto v = vandermonde(*fam.basis(), nodes, k, spec.m);
  auto prod = slice_s(fam.cholesky(), k, spec.m) * v;
  FactorizationCheck c{max_deviation(prod, sm.square), true};
  if constexpr (is_exact_v<T>) c.holds = prod == sm.square;
  else c.holds = c.deviation <= tol.verify * std::max(1.0, sm.square.max_abs());
  return c;
}

/// Coefficient rows of x^alpha Q, |alpha| <= k-1, in the monomials of degree
/// <= k+m-1: the first N_{k-1} rows of Q(Lambda) truncated to N_{k+m-1} columns.
template <Scalar T>
Matrix<T> ideal_truncation_basis(const DarbouxSpec<T>& spec, int k) {
  if (k < 0) throw DegreeOverflow("ideal truncation degree must be >= 0");
  const int top = k + spec.m - 1;
  if (top < 0) return Matrix<T>(0, 0);
  auto basis = GradedBasis::make(spec.dimension, top);
  return shifted_coefficients(spec.q, *basis, cumulative_dim(spec.dimension, k - 1), basis->size());
}

struct IdealRankReport {
  std::int64_t vandermonde_rank = 0;
  std::int64_t stacked_rank = 0;
  std::int64_t expected = 0;  // N_{k+m-1}
  bool ideal_annihilates = true;
};

/// Rank of V, rank of [ideal rows; V^T], and whether the ideal rows kill V.
template <Scalar T>
IdealRankReport ideal_vandermonde_rank(const DarbouxSpec<T>& spec, const NodeSet<T>& nodes, int k) {
  IdealRankReport rep;
  const int top = k + spec.m - 1;
  if (top < 0) return rep;
  auto basis = GradedBasis::make(spec.dimension, top);
  auto v = vandermonde(*basis, nodes, k, spec.m);
  auto ideal = ideal_truncation_basis(spec, k);
  rep.expected = basis->size();
  rep.vandermonde_rank = rank(v);
  Matrix<T> stacked(ideal.rows() + v.cols(), basis->size());
  stacked.set_block(0, 0, ideal);
  stacked.set_block(ideal.rows(), 0, v.transpose());
  rep.stacked_rank = rank(stacked);
  if (ideal.rows() > 0) {
    auto prod = ideal * v;
    if constexpr (is_exact_v<T>) rep.ideal_annihilates = prod.is_exactly_zero();
    else rep.ideal_annihilates = prod.max_abs() <= 1e-8 * std::max(1.0, ideal.max_abs() * v.max_abs());
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Node-count bounds

struct BoundCheck {
  std::string what;
  long value = 0;
  long lower = 0;
  long upper = 0;
  bool ok = true;
};

struct NodeCountReport {
  std::vector<BoundCheck> checks;
  std::vector<std::string> warnings;
  bool ok() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.ok; });
  }
};

/// r_{k,m} > N k + m.
inline bool count_bound_holds(int dimension, int k, int m, int factors) {
  return window_size(dimension, k, m) > static_cast<std::int64_t>(factors) * k + m;
}

/// Per-factor bounds on the entry counts for a degree-k transform.
struct FactorCountBounds {
  long total_min = 0;
  long total_max = 0;
  /// Cap on the j = 0 entries (confluent factors).
  long plain_max = 0;
  bool confluent = false;
};

template <Scalar T>
FactorCountBounds factor_count_bounds(const DarbouxSpec<T>& spec, int a, int k) {
  const int na = spec.factor_degree(a), da = spec.multiplicity(a), m = spec.m, D = spec.dimension;
  const long r = static_cast<long>(node_count_needed(D, k, m));
  FactorCountBounds b;
  b.confluent = da > 1;
  if (!b.confluent) {
    if (D > 1) {
      b.total_min = k + na;
      b.total_max = static_cast<long>(window_size(D, k + m - na, na));
    } else {
      b.total_min = 0;
      b.total_max = r;
    }
    b.plain_max = b.total_max;
  } else {
    b.total_min = (k + da - 1) / da + na;
    b.total_max = r;
    b.plain_max = static_cast<long>(window_size(D, k + m - na, na));
  }
  return b;
}

/// Cap on the entries sharing one direction n of order j on a confluent factor:
/// r_{k+m-d, d} with d = deg d^j(R_a^{d_a})/dn.
template <Scalar T>
long derivative_count_cap(const DarbouxSpec<T>& spec, int a, int k, const Direction<T>& n) {
  const auto& f = spec.factors.at(static_cast<std::size_t>(a));
  auto d = directional_derivative(power(f.poly, f.power), n);
  if (d.is_zero()) return 0;
  int deg = d.degree();
  if (deg < 1) return static_cast<long>(node_count_needed(spec.dimension, k, spec.m));
  return static_cast<long>(window_size(spec.dimension, k + spec.m - deg, deg));
}

/// Necessary count conditions for poisedness; violations are warnings only.
template <Scalar T>
NodeCountReport node_count_diagnostics(const DarbouxSpec<T>& spec, const NodeSet<T>& nodes, int k) {
  NodeCountReport rep;
  const long r = static_cast<long>(node_count_needed(spec.dimension, k, spec.m));
  rep.checks.push_back({"total entries = r_{k,m}", static_cast<long>(nodes.size()), r, r, static_cast<long>(nodes.size()) == r});
  if (spec.dimension > 1 && spec.m > 0) {
    long nk = static_cast<long>(spec.factor_count()) * k + spec.m;
    rep.checks.push_back({"r_{k,m} > N k + m", r, nk + 1, r, count_bound_holds(spec.dimension, k, spec.m, spec.factor_count())});
  }
  for (int a = 0; a < spec.factor_count(); ++a) {
    auto b = factor_count_bounds(spec, a, k);
    std::string tag = "factor " + std::to_string(a);
    long total = nodes.count(a);
    if (!b.confluent) {
      if (spec.dimension > 1)
        rep.checks.push_back({tag + ": k + deg R_a <= n_a <= r_{k+m-deg R_a, deg R_a}", total, b.total_min, b.total_max,
                              total >= b.total_min && total <= b.total_max});
    } else {
      rep.checks.push_back({tag + ": |N_a| >= ceil(k/d_a) + deg R_a", total, b.total_min, b.total_max, total >= b.total_min});
      long plain = nodes.count(a, 0);
      rep.checks.push_back({tag + ": j = 0 entries <= r_{k+m-deg R_a, deg R_a}", plain, 0, b.plain_max, plain <= b.plain_max});
      std::vector<std::pair<std::pair<int, std::vector<T>>, long>> groups;
      for (const auto& e : nodes.entries) {
        if (e.factor != a || e.order == 0) continue;
        std::pair<int, std::vector<T>> key{e.order, e.direction.coefficients};
        auto it = std::find_if(groups.begin(), groups.end(), [&](const auto& g) { return g.first == key; });
        if (it == groups.end()) groups.push_back({key, 1});
        else ++it->second;
      }
      for (const auto& [key, count] : groups) {
        auto dir = Direction<T>::from_coefficients(spec.dimension, key.first, key.second);
        long cap = derivative_count_cap(spec, a, k, dir);
        std::string dtag = tag + ", j = " + std::to_string(key.first);
        rep.checks.push_back({dtag + ": entries per direction <= r_{k+m-d, d}", count, 0, cap, count <= cap});
        if (forbidden_direction(spec.factors[static_cast<std::size_t>(a)].poly, dir)) {
          rep.checks.push_back({dtag + ": direction is admissible", 0, 1, 1, false});
        }
      }
    }
  }
  if (spec.confluent() && std::all_of(nodes.entries.begin(), nodes.entries.end(), [](const auto& e) { return e.order == 0; }) &&
      !nodes.empty())
    rep.warnings.push_back("all entries have j = 0 on a repeated factor: poised sets with plain nodes do not exist for Q = R^d, d > 1");
  for (const auto& c : rep.checks)
    if (!c.ok) rep.warnings.push_back("bound violated: " + c.what + " (value " + std::to_string(c.value) + ")");
  return rep;
}

// ---------------------------------------------------------------------------
// Oracle comparison

template <Scalar T>
struct OracleComparison {
  double deviation = 0;
  bool exact_match = true;
  std::vector<MPoly<T>> formula;
  std::vector<MPoly<T>> oracle;
};

template <Scalar T>
double max_coefficient_deviation(const std::vector<MPoly<T>>& a, const std::vector<MPoly<T>>& b) {
  if (a.size() != b.size()) throw DimensionMismatch("polynomial lists differ in length");
  double worst = 0;
  for (std::size_t i = 0; i < a.size(); ++i) worst = std::max(worst, (a[i] - b[i]).max_coefficient());
  return worst;
}

/// Christoffel formula vs the Cholesky of the perturbed moments at degree k.
template <Scalar T>
OracleComparison<T> verify_against_oracle(const MVOPRFamily<T>& fam, const DarbouxSpec<T>& spec, const NodeSet<T>& nodes,
                                          int k, const Resolvent<T>& res, const Tolerances& tol = {}) {
  OracleComparison<T> c;
  c.formula = christoffel_transform(fam, spec, nodes, k, tol);
  c.oracle = res.transformed.polynomial_block(k);
  c.deviation = max_coefficient_deviation(c.formula, c.oracle);
  c.exact_match = c.formula == c.oracle;
  return c;
}

}  // namespace mvop
