#pragma once

// JSON forms of families, node sets and reports. Scalars are written as
// strings ("p/q", "%.17g" decimals, "(re,im)") so every value round-trips.

#include "mvop/nodes.hpp"
#include "mvop/poly_io.hpp"

#include <json.hpp>

#include <string>
#include <vector>

namespace mvop {

using Json = nlohmann::ordered_json;

inline constexpr const char* kOrdering = "graded-lex-decreasing";

// ---------------------------------------------------------------------------
// Scalars, vectors, matrices, polynomials

template <Scalar T>
Json scalar_json(const T& v) {
  return to_string(v);
}

/// Strings go through the scalar parser; plain JSON numbers are accepted too.
template <Scalar T>
T scalar_from_json(const Json& j) {
  try {
    if (j.is_string()) return parse_scalar<T>(j.get<std::string>());
    if (j.is_number_integer()) return parse_scalar<T>(j.dump());
    if (j.is_number_float()) return parse_scalar<T>(j.dump());
  } catch (const std::invalid_argument& e) {
    throw ParseError(e.what());
  }
  throw ParseError("expected a number or numeric string, got " + j.dump());
}

template <Scalar T>
Json vector_json(const std::vector<T>& v) {
  Json out = Json::array();
  for (const auto& x : v) out.push_back(scalar_json(x));
  return out;
}

template <Scalar T>
std::vector<T> vector_from_json(const Json& j) {
  if (!j.is_array()) throw ParseError("expected an array of numbers, got " + j.dump());
  std::vector<T> out;
  for (const auto& x : j) out.push_back(scalar_from_json<T>(x));
  return out;
}

template <Scalar T>
Json matrix_json(const Matrix<T>& m) {
  Json out = Json::array();
  for (std::int64_t i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (std::int64_t j = 0; j < m.cols(); ++j) row.push_back(scalar_json(m(i, j)));
    out.push_back(std::move(row));
  }
  return out;
}

template <Scalar T>
Matrix<T> matrix_from_json(const Json& j, std::int64_t rows, std::int64_t cols) {
  if (!j.is_array() || static_cast<std::int64_t>(j.size()) != rows)
    throw ParseError("expected a matrix with " + std::to_string(rows) + " rows");
  Matrix<T> m(rows, cols);
  for (std::int64_t i = 0; i < rows; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<std::int64_t>(row.size()) != cols)
      throw ParseError("expected matrix rows with " + std::to_string(cols) + " entries");
    for (std::int64_t c = 0; c < cols; ++c) m(i, c) = scalar_from_json<T>(row[static_cast<std::size_t>(c)]);
  }
  return m;
}

template <Scalar T>
MPoly<T> poly_from_json(const Json& j, int dimension) {
  if (j.is_string()) return parse_poly<T>(j.get<std::string>(), dimension);
  if (j.is_number()) return MPoly<T>::constant(dimension, scalar_from_json<T>(j));
  throw ParseError("expected a polynomial string, got " + j.dump());
}

inline std::string monomial_label(const MultiIndex& a) {
  auto s = detail::monomial_string(a);
  return s.empty() ? "1" : s;
}

template <Scalar T>
Json poly_list_json(const GradedBasis& basis, int k, const std::vector<MPoly<T>>& polys) {
  Json out = Json::array();
  auto off = basis.block_offset(k);
  for (std::size_t i = 0; i < polys.size(); ++i)
    out.push_back(Json{{"index", monomial_label(basis.multiindex_at(off + static_cast<std::int64_t>(i)))},
                       {"poly", format_poly(polys[i])}});
  return out;
}

// ---------------------------------------------------------------------------
// Families

/// H blocks, the rows of S by degree (columns up to that degree) and the
/// polynomial listing.
template <Scalar T>
Json family_json(const MVOPRFamily<T>& fam) {
  const auto& b = *fam.basis();
  Json basis = Json::array();
  for (std::int64_t i = 0; i < b.size(); ++i) basis.push_back(monomial_label(b.multiindex_at(i)));
  Json h = Json::array(), s = Json::array(), polys = Json::array();
  for (int k = 0; k <= fam.degree(); ++k) {
    h.push_back(matrix_json(fam.h(k)));
    s.push_back(matrix_json(fam.s().blocks(k, k, 0, k)));
    polys.push_back(Json{{"degree", k}, {"polynomials", poly_list_json(b, k, fam.polynomial_block(k))}});
  }
  return Json{{"format", "mvop-family"},
              {"version", 1},
              {"dimension", fam.dimension()},
              {"degree", fam.degree()},
              {"ordering", kOrdering},
              {"scalar", ScalarTraits<T>::name},
              {"basis", std::move(basis)},
              {"h", std::move(h)},
              {"s", std::move(s)},
              {"polynomials", std::move(polys)}};
}

template <Scalar T>
MVOPRFamily<T> family_from_json(const Json& j) {
  try {
    if (j.at("format") != "mvop-family") throw ParseError("not a family file");
    if (j.at("ordering") != kOrdering) throw ParseError("unsupported basis ordering " + j.at("ordering").dump());
    if (j.at("scalar") != ScalarTraits<T>::name)
      throw ParseError("family scalar " + j.at("scalar").dump() + " does not match " + ScalarTraits<T>::name);
    const int D = j.at("dimension").get<int>();
    const int L = j.at("degree").get<int>();
    auto basis = GradedBasis::make(D, L);
    auto s = BlockMatrix<T>::identity(basis);
    s.set_bands(kUnboundedBand, 0);
    std::vector<Matrix<T>> h;
    for (int k = 0; k <= L; ++k) {
      const auto len = basis->block_length(k);
      h.push_back(matrix_from_json<T>(j.at("h").at(static_cast<std::size_t>(k)), len, len));
      auto rows = matrix_from_json<T>(j.at("s").at(static_cast<std::size_t>(k)), len, basis->block_offset(k + 1));
      for (std::int64_t r = 0; r < len; ++r)
        for (std::int64_t c = 0; c < rows.cols(); ++c) s.at(basis->block_offset(k) + r, c) = rows(r, c);
    }
    auto s_inv = invert_unitriangular(s);
    return MVOPRFamily<T>(CholeskyResult<T>{std::move(s), std::move(s_inv), std::move(h)});
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed family file: ") + e.what());
  }
}

// ---------------------------------------------------------------------------
// Node sets

template <Scalar T>
Json node_set_json(const NodeSet<T>& ns) {
  Json nodes = Json::array();
  for (const auto& e : ns.entries)
    nodes.push_back(Json{{"point", vector_json(e.point)},
                         {"factor", e.factor},
                         {"order", e.order},
                         {"direction", vector_json(e.direction.coefficients)}});
  return nodes;
}

/// Entries `{point, factor, order?, direction?}`; a missing direction means
/// d^j/dx_1^j.
template <Scalar T>
NodeSet<T> node_set_from_json(const Json& j, int dimension) {
  if (!j.is_array()) throw ParseError("nodes must be an array");
  NodeSet<T> ns;
  try {
    for (const auto& e : j) {
      NodeEntry<T> n;
      n.point = vector_from_json<T>(e.at("point"));
      n.factor = e.at("factor").get<int>();
      n.order = e.value("order", 0);
      if (n.order < 0) throw ParseError("node order must be >= 0");
      if (e.contains("direction"))
        n.direction = Direction<T>::from_coefficients(dimension, n.order, vector_from_json<T>(e.at("direction")));
      else
        n.direction = n.order == 0 ? Direction<T>::identity(dimension) : Direction<T>::coordinate(dimension, 0, n.order);
      ns.entries.push_back(std::move(n));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("malformed node entry: ") + e.what());
  }
  return ns;
}

// ---------------------------------------------------------------------------
// Reports

template <Scalar T>
Json poisedness_json(const PoisednessResult<T>& p) {
  Json out{{"poised", p.poised}, {"det", scalar_json(p.determinant)}};
  if constexpr (!is_exact_v<T>) {
    out["min_singular_value"] = detail::format_double(p.min_singular_value);
    out["max_singular_value"] = detail::format_double(p.max_singular_value);
  }
  out["certificate"] = p.certificate_text;
  return out;
}

inline Json identity_report_json(const IdentityReport& r) {
  Json checks = Json::array();
  for (const auto& c : r.checks)
    checks.push_back(Json{{"name", c.name},
                          {"passed", c.passed},
                          {"max_violation", detail::format_double(c.max_violation)},
                          {"detail", c.detail}});
  return Json{{"all_passed", r.all_passed()}, {"max_violation", detail::format_double(r.max_violation())},
              {"checks", std::move(checks)}};
}

inline Json residual_json(const ResidualReport& r) {
  return Json{{"max_residual", detail::format_double(r.max_residual)},
              {"exact_zero", r.exact_zero},
              {"evaluations", r.evaluations}};
}

inline Json count_report_json(const NodeCountReport& r) {
  Json checks = Json::array();
  for (const auto& c : r.checks)
    checks.push_back(Json{{"what", c.what}, {"value", c.value}, {"lower", c.lower}, {"upper", c.upper}, {"ok", c.ok}});
  return Json{{"ok", r.ok()}, {"checks", std::move(checks)}, {"warnings", r.warnings}};
}

template <Scalar T>
Json search_json(const SearchOutcome<T>& s) {
  Json out{{"status", status_name(s.status)}, {"draws", s.draws}, {"message", s.message}};
  out["feasible_splits"] = s.feasible_splits.size();
  if (!s.success() && s.best) {
    out["best_certificate"] = s.best_certificate_text;
    out["best_nodes"] = node_set_json(*s.best);
  }
  return out;
}

}  // namespace mvop
