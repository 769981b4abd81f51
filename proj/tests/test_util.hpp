#pragma once

#include "mvop/poly_io.hpp"

#include <random>
#include <string>

namespace mvop::testing {

inline Rational q(const std::string& s) { return parse_scalar<Rational>(s); }

/// Canonical n/d (mpq_class(n, d) alone does not reduce).
inline Rational qr(long n, long d) {
  Rational r(n, d);
  r.canonicalize();
  return r;
}

inline MPoly<Rational> rp(const std::string& s, int dim) { return parse_poly<Rational>(s, dim); }

inline MultiIndex mi(std::initializer_list<int> e) { return MultiIndex(std::vector<int>(e)); }

/// Random polynomial with small rational coefficients.
inline MPoly<Rational> random_poly(std::mt19937_64& rng, int dim, int max_degree, int terms) {
  std::uniform_int_distribution<int> num(-9, 9), den(1, 5), deg(0, max_degree);
  MPoly<Rational> p(dim);
  for (int t = 0; t < terms; ++t) {
    int d = deg(rng);
    auto block = block_indices(dim, d);
    std::uniform_int_distribution<std::size_t> pick(0, block.size() - 1);
    p.add_term(block[pick(rng)], qr(num(rng), den(rng)));
  }
  return p;
}

}  // namespace mvop::testing
