#pragma once

// Sparse multivariate polynomials over a pluggable scalar, plus the
// homogeneous directional derivative operators
//   d^j/dn = sum_{|alpha| = j} n_alpha d^j/dx^alpha.

#include "mvop/errors.hpp"
#include "mvop/graded_basis.hpp"
#include "mvop/scalar.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <span>
#include <utility>
#include <vector>

namespace mvop {

template <Scalar T>
class MPoly {
 public:
  using Terms = std::map<MultiIndex, T, GradedLess>;
  static constexpr int kZeroDegree = std::numeric_limits<int>::min();

  explicit MPoly(int dimension) : dim_(dimension) {
    if (dimension < 1) throw DimensionMismatch("polynomial dimension must be >= 1");
  }

  static MPoly constant(int dimension, const T& c) {
    MPoly p(dimension);
    p.add_term(MultiIndex(dimension), c);
    return p;
  }
  static MPoly monomial(const MultiIndex& a, const T& c = T(1)) {
    MPoly p(a.dimension());
    p.add_term(a, c);
    return p;
  }
  /// The coordinate polynomial x_axis (0-based axis).
  static MPoly variable(int dimension, int axis) { return monomial(MultiIndex::unit(dimension, axis)); }

  int dimension() const { return dim_; }
  bool is_zero() const { return terms_.empty(); }
  /// Total degree; kZeroDegree for the zero polynomial.
  int degree() const {
    int d = kZeroDegree;
    for (const auto& [a, c] : terms_) d = std::max(d, a.degree());
    return d;
  }
  const Terms& terms() const { return terms_; }
  std::size_t term_count() const { return terms_.size(); }

  T coefficient(const MultiIndex& a) const {
    auto it = terms_.find(a);
    return it == terms_.end() ? T(0) : it->second;
  }

  /// Adds c x^a, merging like terms and dropping exact zeros.
  void add_term(const MultiIndex& a, const T& c) {
    if (a.dimension() != dim_) throw DimensionMismatch("term dimension mismatch");
    auto it = terms_.find(a);
    if (it == terms_.end()) {
      if (!mvop::is_zero(c)) terms_.emplace(a, c);
      return;
    }
    it->second += c;
    if (mvop::is_zero(it->second)) terms_.erase(it);
  }
  void set_term(const MultiIndex& a, const T& c) {
    if (a.dimension() != dim_) throw DimensionMismatch("term dimension mismatch");
    if (mvop::is_zero(c)) terms_.erase(a);
    else terms_[a] = c;
  }

  /// Drops coefficients with magnitude <= tol (float cleanup).
  void prune(double tol) {
    std::erase_if(terms_, [tol](const auto& kv) { return mvop::is_zero(kv.second, tol); });
  }

  double max_coefficient() const {
    double m = 0;
    for (const auto& [a, c] : terms_) m = std::max(m, magnitude(c));
    return m;
  }

  MPoly& operator+=(const MPoly& o) {
    same_dim(o);
    for (const auto& [a, c] : o.terms_) add_term(a, c);
    return *this;
  }
  MPoly& operator-=(const MPoly& o) {
    same_dim(o);
    for (const auto& [a, c] : o.terms_) add_term(a, T(-c));
    return *this;
  }
  MPoly& operator*=(const T& s) {
    if (mvop::is_zero(s)) { terms_.clear(); return *this; }
    for (auto& [a, c] : terms_) c *= s;
    return *this;
  }
  friend MPoly operator+(MPoly a, const MPoly& b) { return a += b; }
  friend MPoly operator-(MPoly a, const MPoly& b) { return a -= b; }
  friend MPoly operator*(MPoly a, const T& s) { return a *= s; }
  friend MPoly operator*(const T& s, MPoly a) { return a *= s; }
  friend MPoly operator-(MPoly a) { return a *= T(-1); }

  friend MPoly operator*(const MPoly& p, const MPoly& q) {
    p.same_dim(q);
    MPoly r(p.dim_);
    for (const auto& [a, ca] : p.terms_)
      for (const auto& [b, cb] : q.terms_) r.add_term(a + b, T(ca * cb));
    return r;
  }
  MPoly& operator*=(const MPoly& o) { return *this = *this * o; }

  friend bool operator==(const MPoly& a, const MPoly& b) { return a.dim_ == b.dim_ && a.terms_ == b.terms_; }

  /// Sum c_a x^a at `x`; U may be a wider scalar (complex points) or any ring
  /// T converts into, e.g. MPoly for composition.
  template <class U>
  U eval(std::span<const U> x, const U& zero = U(0)) const {
    if (static_cast<int>(x.size()) != dim_) throw DimensionMismatch("evaluation point has wrong dimension");
    U sum = zero;
    for (const auto& [a, c] : terms_) {
      U term = lift<U>(c, zero);
      for (int i = 0; i < dim_; ++i)
        for (int e = 0; e < a[i]; ++e) term = term * x[static_cast<std::size_t>(i)];
      sum = sum + term;
    }
    return sum;
  }
  T operator()(std::span<const T> x) const { return eval<T>(x); }
  T operator()(const std::vector<T>& x) const { return eval<T>(std::span<const T>(x)); }

  /// Greatest term under the graded lexicographic monomial order.
  std::pair<MultiIndex, T> leading_term() const {
    if (terms_.empty()) throw Error("leading term of the zero polynomial");
    int d = degree();
    for (const auto& [a, c] : terms_)
      if (a.degree() == d) return {a, c};
    throw Error("unreachable");
  }

 private:
  template <class U>
  static U lift(const T& c, const U& zero) {
    if constexpr (std::is_same_v<U, MPoly>) return MPoly::constant(zero.dimension(), c);
    else return U(c);
  }
  void same_dim(const MPoly& o) const {
    if (o.dim_ != dim_) throw DimensionMismatch("polynomial dimension mismatch");
  }

  int dim_;
  Terms terms_;
};

/// A homogeneous differential operator of order j: one coefficient per
/// multi-index of the block [j], stored in block order.
template <Scalar T>
struct Direction {
  int dimension = 1;
  int order = 0;
  std::vector<T> coefficients{T(1)};

  static Direction identity(int dimension) { return Direction{dimension, 0, {T(1)}}; }

  /// d^j / dx_axis^j.
  static Direction coordinate(int dimension, int axis, int order) {
    Direction d{dimension, order, {}};
    auto block = block_indices(dimension, order);
    d.coefficients.assign(block.size(), T(0));
    MultiIndex target(dimension);
    target[axis] = order;
    for (std::size_t i = 0; i < block.size(); ++i)
      if (block[i] == target) d.coefficients[i] = T(1);
    return d;
  }

  static Direction from_coefficients(int dimension, int order, std::vector<T> coefficients) {
    Direction d{dimension, order, std::move(coefficients)};
    d.validate();
    return d;
  }

  void validate() const {
    if (order < 0) throw Error("direction order must be >= 0");
    auto expected = static_cast<std::size_t>(block_size(dimension, order));
    if (coefficients.size() != expected)
      throw DimensionMismatch("direction of order " + std::to_string(order) + " needs " + std::to_string(expected) +
                              " coefficients, got " + std::to_string(coefficients.size()));
    if (std::all_of(coefficients.begin(), coefficients.end(), [](const T& c) { return mvop::is_zero(c); }))
      throw Error("direction has no nonzero coefficient");
  }

  friend bool operator==(const Direction&, const Direction&) = default;
};

/// d^j p / dx^alpha with plain repeated partials (falling factorials, no
/// multinomial normalization).
template <Scalar T>
MPoly<T> partial_derivative(const MPoly<T>& p, const MultiIndex& alpha) {
  MPoly<T> out(p.dimension());
  for (const auto& [b, c] : p.terms()) {
    if (!b.dominates(alpha)) continue;
    T coef = c;
    for (int i = 0; i < p.dimension(); ++i)
      for (int t = 0; t < alpha[i]; ++t) coef *= from_int<T>(b[i] - t);
    out.add_term(b.minus(alpha), coef);
  }
  return out;
}

template <Scalar T>
MPoly<T> directional_derivative(const MPoly<T>& p, const Direction<T>& n) {
  if (n.dimension != p.dimension()) throw DimensionMismatch("direction dimension mismatch");
  if (n.order == 0) {
    MPoly<T> r = p;
    return r *= n.coefficients.at(0);
  }
  auto block = block_indices(p.dimension(), n.order);
  if (block.size() != n.coefficients.size()) throw DimensionMismatch("direction coefficient count mismatch");
  MPoly<T> out(p.dimension());
  for (std::size_t i = 0; i < block.size(); ++i) {
    if (mvop::is_zero(n.coefficients[i])) continue;
    out += partial_derivative(p, block[i]) * n.coefficients[i];
  }
  return out;
}

template <Scalar T>
MPoly<T> power(const MPoly<T>& p, int e) {
  if (e < 0) throw Error("negative polynomial power");
  MPoly<T> r = MPoly<T>::constant(p.dimension(), T(1));
  for (int i = 0; i < e; ++i) r *= p;
  return r;
}

template <Scalar T>
struct Factor {
  MPoly<T> poly;
  int power = 1;
};

/// prod R_a^{d_a}.
template <Scalar T>
MPoly<T> expand_factored(std::span<const Factor<T>> factors, int dimension) {
  MPoly<T> q = MPoly<T>::constant(dimension, T(1));
  for (const auto& f : factors) {
    if (f.power < 1) throw Error("factor multiplicity must be >= 1");
    if (f.poly.dimension() != dimension) throw DimensionMismatch("factor dimension mismatch");
    q *= power(f.poly, f.power);
  }
  return q;
}

template <Scalar T>
struct DivisionResult {
  MPoly<T> quotient;
  MPoly<T> remainder;
};

/// Multivariate division by a single polynomial under graded lex order.
/// For float scalars the eliminated leading coefficient is dropped
/// explicitly so rounding cannot stall the loop.
template <Scalar T>
DivisionResult<T> divide(const MPoly<T>& numerator, const MPoly<T>& divisor) {
  if (divisor.is_zero()) throw Error("division by the zero polynomial");
  if (numerator.dimension() != divisor.dimension()) throw DimensionMismatch("division dimension mismatch");
  const auto [lead_m, lead_c] = divisor.leading_term();
  MPoly<T> q(numerator.dimension()), r(numerator.dimension()), p = numerator;
  while (!p.is_zero()) {
    auto [m, c] = p.leading_term();
    if (m.dominates(lead_m)) {
      MultiIndex shift = m.minus(lead_m);
      T factor = c / lead_c;
      q.add_term(shift, factor);
      MPoly<T> sub = divisor * MPoly<T>::monomial(shift, factor);
      p -= sub;
      p.set_term(m, T(0));
    } else {
      r.add_term(m, c);
      p.set_term(m, T(0));
    }
  }
  return {std::move(q), std::move(r)};
}

}  // namespace mvop
