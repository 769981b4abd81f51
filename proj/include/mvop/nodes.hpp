#pragma once

// Points on Z(R) and randomized search for poised node sets.
//
// Draws come from std::mt19937_64 raw outputs reduced by modulo, so a seed
// reproduces the same node set on every platform.

#include "mvop/darboux.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <complex>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace mvop {

using Rng = std::mt19937_64;

struct DrawRange {
  long numerator = 12;    // numerators in [-numerator, numerator]
  long denominator = 6;   // denominators in [1, denominator]
};

/// Small-denominator rational from raw generator output.
inline Rational draw_rational(Rng& rng, const DrawRange& range = {}) {
  auto span = static_cast<std::uint64_t>(2 * range.numerator + 1);
  long num = static_cast<long>(rng() % span) - range.numerator;
  long den = 1 + static_cast<long>(rng() % static_cast<std::uint64_t>(range.denominator));
  Rational r(num, den);
  r.canonicalize();
  return r;
}

namespace detail {

template <Scalar T>
T lift_rational(const Rational& r) {
  if constexpr (std::is_same_v<T, Rational>) return r;
  else if constexpr (std::is_same_v<T, ComplexRational>) return ComplexRational(r);
  else return T(r.get_d());
}

template <Scalar T>
Rational exact_real(const T& v) {
  if constexpr (std::is_same_v<T, Rational>) return v;
  else if constexpr (std::is_same_v<T, ComplexRational>) {
    if (v.im != 0) throw Error("hyperplane sampling needs real coefficients");
    return v.re;
  } else {
    if (ScalarTraits<T>::imag_part(v) != 0) throw Error("hyperplane sampling needs real coefficients");
    return Rational(ScalarTraits<T>::real_part(v));
  }
}

inline std::complex<double> to_complex(const Rational& v) { return {v.get_d(), 0}; }
inline std::complex<double> to_complex(const ComplexRational& v) { return {v.re.get_d(), v.im.get_d()}; }
inline std::complex<double> to_complex(double v) { return {v, 0}; }
inline std::complex<double> to_complex(const std::complex<double>& v) { return v; }

}  // namespace detail

/// Roots of sum_i c_i t^i (c ascending) via the companion matrix, each
/// polished by Newton steps; sorted by (real, imag).
inline std::vector<std::complex<double>> polynomial_roots(std::vector<std::complex<double>> c) {
  while (!c.empty() && std::abs(c.back()) == 0.0) c.pop_back();
  if (c.size() < 2) return {};
  const auto n = static_cast<Eigen::Index>(c.size() - 1);
  Eigen::MatrixXcd comp = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index i = 1; i < n; ++i) comp(i, i - 1) = 1.0;
  for (Eigen::Index i = 0; i < n; ++i) comp(i, n - 1) = -c[static_cast<std::size_t>(i)] / c.back();
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(comp, false);
  if (es.info() != Eigen::Success) throw RootFindingFailure("companion eigenvalue iteration did not converge");
  std::vector<std::complex<double>> roots;
  for (Eigen::Index i = 0; i < n; ++i) {
    std::complex<double> t = es.eigenvalues()(i);
    for (int it = 0; it < 8; ++it) {
      std::complex<double> f = 0, df = 0;
      for (auto k = c.size(); k-- > 0;) {
        df = df * t + f;
        f = f * t + c[k];
      }
      if (std::abs(df) == 0.0) break;
      auto step = f / df;
      t -= step;
      if (std::abs(step) <= 1e-16 * std::max(1.0, std::abs(t))) break;
    }
    roots.push_back(t);
  }
  std::sort(roots.begin(), roots.end(), [](const auto& a, const auto& b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return roots;
}

enum class SamplerStrategy { Hyperplane, LineRestriction, UserSupplied };

inline const char* strategy_name(SamplerStrategy s) {
  switch (s) {
    case SamplerStrategy::Hyperplane: return "hyperplane";
    case SamplerStrategy::LineRestriction: return "line-restriction";
    case SamplerStrategy::UserSupplied: return "user-supplied";
  }
  return "?";
}

template <Scalar T>
class HypersurfaceSampler {
 public:
  explicit HypersurfaceSampler(MPoly<T> r) : r_(std::move(r)) {
    if (r_.degree() < 1) throw Error("sampler needs a non-constant polynomial");
    strategy_ = r_.degree() == 1 ? SamplerStrategy::Hyperplane : SamplerStrategy::LineRestriction;
  }
  HypersurfaceSampler(MPoly<T> r, std::vector<std::vector<T>> points, double tol = Tolerances{}.variety)
      : r_(std::move(r)), strategy_(SamplerStrategy::UserSupplied), user_(std::move(points)) {
    for (std::size_t i = 0; i < user_.size(); ++i)
      if (!on_variety(r_, user_[i], tol)) throw NodeOffVariety("supplied point " + std::to_string(i) + " is not on Z(R)");
  }

  SamplerStrategy strategy() const { return strategy_; }
  const MPoly<T>& polynomial() const { return r_; }

  /// `count` distinct points on Z(R).
  std::vector<std::vector<T>> sample_points(std::size_t count, Rng& rng) const {
    if (count == 0) return {};
    if (strategy_ == SamplerStrategy::UserSupplied) {
      if (user_.size() < count)
        throw Error("only " + std::to_string(user_.size()) + " supplied points, " + std::to_string(count) + " requested");
      std::vector<std::size_t> idx(user_.size());
      for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
      for (std::size_t i = 0; i < count; ++i) std::swap(idx[i], idx[i + rng() % (idx.size() - i)]);
      std::vector<std::vector<T>> out;
      for (std::size_t i = 0; i < count; ++i) out.push_back(user_[idx[i]]);
      return out;
    }
    std::vector<std::vector<T>> out;
    const std::size_t max_attempts = 200 * count + 200;
    for (std::size_t attempt = 0; out.size() < count && attempt < max_attempts; ++attempt) {
      std::vector<std::vector<T>> batch =
          strategy_ == SamplerStrategy::Hyperplane ? std::vector<std::vector<T>>{hyperplane_point(rng)} : line_points(rng);
      for (auto& p : batch) {
        if (out.size() == count) break;
        if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(std::move(p));
      }
    }
    if (out.size() < count)
      throw RootFindingFailure("found " + std::to_string(out.size()) + " of " + std::to_string(count) + " points on Z(" +
                               format_poly(r_) + ")");
    return out;
  }

  /// Z(R) intersected with the line p0 + t v (float scalars).
  std::vector<std::vector<T>> points_on_line(const std::vector<Rational>& p0, const std::vector<Rational>& v) const {
    if constexpr (is_exact_v<T>) {
      throw Error("line-restriction sampling is float-only; supply points for nonlinear factors in exact mode");
    } else {
      const int D = r_.dimension();
      MPoly<T> zero(1);
      std::vector<MPoly<T>> line;
      for (int i = 0; i < D; ++i) {
        MPoly<T> xi = MPoly<T>::constant(1, detail::lift_rational<T>(p0[static_cast<std::size_t>(i)]));
        xi += MPoly<T>::variable(1, 0) * detail::lift_rational<T>(v[static_cast<std::size_t>(i)]);
        line.push_back(std::move(xi));
      }
      auto uni = r_.template eval<MPoly<T>>(std::span<const MPoly<T>>(line), zero);
      int deg = uni.degree();
      if (deg < 1) return {};
      std::vector<std::complex<double>> coef(static_cast<std::size_t>(deg) + 1);
      for (const auto& [a, c] : uni.terms()) coef[static_cast<std::size_t>(a[0])] = detail::to_complex(c);
      std::vector<std::vector<T>> out;
      for (const auto& t : polynomial_roots(coef)) {
        std::vector<T> p;
        if constexpr (ScalarTraits<T>::complex) {
          for (int i = 0; i < D; ++i)
            p.push_back(T(p0[static_cast<std::size_t>(i)].get_d()) + t * v[static_cast<std::size_t>(i)].get_d());
        } else {
          if (std::abs(t.imag()) > 1e-9 * std::max(1.0, std::abs(t.real()))) continue;
          for (int i = 0; i < D; ++i)
            p.push_back(p0[static_cast<std::size_t>(i)].get_d() + t.real() * v[static_cast<std::size_t>(i)].get_d());
        }
        if (magnitude(r_(p)) <= 1e-12 * std::max(1.0, r_.max_coefficient())) out.push_back(std::move(p));
      }
      return out;
    }
  }

 private:
  std::vector<T> hyperplane_point(Rng& rng) const {
    const int D = r_.dimension();
    std::vector<Rational> c(static_cast<std::size_t>(D));
    Rational c0 = detail::exact_real(r_.coefficient(MultiIndex(D)));
    int pivot = -1;
    for (int i = 0; i < D; ++i) {
      c[static_cast<std::size_t>(i)] = detail::exact_real(r_.coefficient(MultiIndex::unit(D, i)));
      if (pivot < 0 && c[static_cast<std::size_t>(i)] != 0) pivot = i;
    }
    std::vector<Rational> x(static_cast<std::size_t>(D));
    Rational rest = c0;
    for (int i = 0; i < D; ++i) {
      if (i == pivot) continue;
      x[static_cast<std::size_t>(i)] = draw_rational(rng);
      rest += c[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i)];
    }
    x[static_cast<std::size_t>(pivot)] = -rest / c[static_cast<std::size_t>(pivot)];
    std::vector<T> p;
    for (const auto& xi : x) p.push_back(detail::lift_rational<T>(xi));
    return p;
  }

  std::vector<std::vector<T>> line_points(Rng& rng) const {
    const int D = r_.dimension();
    std::vector<Rational> p0(static_cast<std::size_t>(D)), v(static_cast<std::size_t>(D));
    DrawRange near{4, 3};
    for (auto& x : p0) x = draw_rational(rng, near);
    bool nonzero = false;
    while (!nonzero) {
      for (auto& x : v) {
        x = draw_rational(rng, near);
        nonzero = nonzero || x != 0;
      }
    }
    return points_on_line(p0, v);
  }

  MPoly<T> r_;
  SamplerStrategy strategy_;
  std::vector<std::vector<T>> user_;
};

// ---------------------------------------------------------------------------
// Poised-set search

struct SearchOptions {
  /// Allow derivative-tagged entries on repeated factors. With false every
  /// entry is plain evaluation (the non-existence experiment).
  bool confluent = true;
  Tolerances tol{};
};

/// Entry counts per (factor, order) slot.
struct NodeSplit {
  std::vector<std::pair<int, int>> slots;
  std::vector<long> counts;
};

enum class SearchStatus { Found, BudgetExhausted, NoFeasibleSplit };

inline const char* status_name(SearchStatus s) {
  switch (s) {
    case SearchStatus::Found: return "found";
    case SearchStatus::BudgetExhausted: return "budget-exhausted";
    case SearchStatus::NoFeasibleSplit: return "no-feasible-split";
  }
  return "?";
}

template <Scalar T>
struct SearchOutcome {
  SearchStatus status = SearchStatus::BudgetExhausted;
  NodeSet<T> nodes;
  PoisednessResult<T> certificate;
  long draws = 0;
  /// Largest certificate among failed draws.
  std::optional<NodeSet<T>> best;
  double best_certificate = 0;
  std::string best_certificate_text;
  std::vector<NodeSplit> feasible_splits;
  std::string message;

  bool success() const { return status == SearchStatus::Found; }
};

/// First admissible coordinate direction d^j/dx_i^j for factor a, if any.
template <Scalar T>
std::optional<Direction<T>> default_direction(const DarbouxSpec<T>& spec, int a, int j) {
  for (int i = 0; i < spec.dimension; ++i) {
    auto n = Direction<T>::coordinate(spec.dimension, i, j);
    if (!forbidden_direction(spec.factors[static_cast<std::size_t>(a)].poly, n)) return n;
  }
  return std::nullopt;
}

/// All splits meeting the necessary count bounds, in lexicographic order.
template <Scalar T>
std::vector<NodeSplit> feasible_splits(const DarbouxSpec<T>& spec, int k, const SearchOptions& opts) {
  const long r = static_cast<long>(node_count_needed(spec.dimension, k, spec.m));
  std::vector<std::pair<int, int>> slots;
  std::vector<long> cap;
  for (int a = 0; a < spec.factor_count(); ++a) {
    int orders = opts.confluent ? spec.multiplicity(a) : 1;
    for (int j = 0; j < orders; ++j) {
      slots.emplace_back(a, j);
      long c = r;
      if (spec.multiplicity(a) > 1 && opts.confluent) {
        auto b = factor_count_bounds(spec, a, k);
        if (j == 0) c = b.plain_max;
        else {
          auto n = default_direction(spec, a, j);
          c = n ? derivative_count_cap(spec, a, k, *n) : 0;
        }
      }
      cap.push_back(std::min(c, r));
    }
  }
  std::vector<NodeSplit> out;
  std::vector<long> cur(slots.size(), 0);
  auto accept = [&] {
    for (int a = 0; a < spec.factor_count(); ++a) {
      long total = 0;
      for (std::size_t s = 0; s < slots.size(); ++s)
        if (slots[s].first == a) total += cur[s];
      bool repeated = spec.multiplicity(a) > 1;
      if (repeated && !opts.confluent) continue;
      auto b = factor_count_bounds(spec, a, k);
      if (total < b.total_min || total > b.total_max) return false;
    }
    return true;
  };
  auto rec = [&](auto&& self, std::size_t s, long left) -> void {
    if (s + 1 == slots.size()) {
      if (left > cap[s]) return;
      cur[s] = left;
      if (accept()) out.push_back({slots, cur});
      return;
    }
    for (long c = std::min(left, cap[s]); c >= 0; --c) {
      cur[s] = c;
      self(self, s + 1, left - c);
    }
  };
  if (!slots.empty()) rec(rec, 0, r);
  return out;
}

/// Random splits and points until the sample matrix is nonsingular.
template <Scalar T>
SearchOutcome<T> search_poised(const MVOPRFamily<T>& fam, const DarbouxSpec<T>& spec, int k, long budget,
                               std::uint64_t seed, const SearchOptions& opts = {},
                               const std::vector<HypersurfaceSampler<T>>* samplers = nullptr) {
  detail::check_transform_degree(fam, spec, k);
  SearchOutcome<T> out;
  const bool plain_on_repeated = !opts.confluent && spec.confluent();
  const std::string nonexistence =
      "poised sets with plain (j = 0) nodes do not exist when a factor is repeated (Q = R^d, d > 1); "
      "use derivative-tagged nodes";
  if (budget < 1) {
    out.status = SearchStatus::BudgetExhausted;
    out.message = "budget exhausted after 0 draws";
    if (plain_on_repeated) out.message += "; " + nonexistence;
    return out;
  }
  if (spec.m == 0) {
    out.status = SearchStatus::Found;
    out.certificate = poisedness(Matrix<T>(0, 0));
    out.message = "Q is constant: the empty node set is poised";
    return out;
  }
  out.feasible_splits = feasible_splits(spec, k, opts);
  if (out.feasible_splits.empty()) {
    out.status = SearchStatus::NoFeasibleSplit;
    out.message = "no node split satisfies the necessary count bounds for degree " + std::to_string(k);
    if (plain_on_repeated) out.message += "; " + nonexistence;
    return out;
  }
  std::vector<HypersurfaceSampler<T>> own;
  if (!samplers) {
    for (const auto& f : spec.factors) own.emplace_back(f.poly);
    samplers = &own;
  }
  std::vector<std::vector<std::optional<Direction<T>>>> dirs(static_cast<std::size_t>(spec.factor_count()));
  for (int a = 0; a < spec.factor_count(); ++a)
    for (int j = 0; j < spec.multiplicity(a); ++j)
      dirs[static_cast<std::size_t>(a)].push_back(j == 0 ? std::optional<Direction<T>>(Direction<T>::identity(spec.dimension))
                                                         : default_direction(spec, a, j));

  Rng rng(seed);
  for (long draw = 1; draw <= budget; ++draw) {
    out.draws = draw;
    const auto& split = out.feasible_splits[rng() % out.feasible_splits.size()];
    NodeSet<T> ns;
    for (std::size_t s = 0; s < split.slots.size(); ++s) {
      auto [a, j] = split.slots[s];
      if (split.counts[s] == 0) continue;
      auto pts = (*samplers)[static_cast<std::size_t>(a)].sample_points(static_cast<std::size_t>(split.counts[s]), rng);
      for (auto& p : pts) ns.entries.push_back({std::move(p), a, j, *dirs[static_cast<std::size_t>(a)][static_cast<std::size_t>(j)]});
    }
    auto sm = build_sample_matrices(fam, spec, ns, k, opts.tol);
    auto pr = poisedness(sm.square, opts.tol.poised);
    if (pr.poised) {
      out.status = SearchStatus::Found;
      out.nodes = std::move(ns);
      out.certificate = std::move(pr);
      out.message = "poised set found after " + std::to_string(draw) + " draw(s)";
      return out;
    }
    if (!out.best || pr.certificate > out.best_certificate) {
      out.best = ns;
      out.best_certificate = pr.certificate;
      out.best_certificate_text = pr.certificate_text;
    }
  }
  out.status = SearchStatus::BudgetExhausted;
  out.message = "no poised set in " + std::to_string(budget) + " draw(s); best certificate " + out.best_certificate_text;
  if (plain_on_repeated) out.message += "; " + nonexistence;
  return out;
}

}  // namespace mvop
