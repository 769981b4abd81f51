#pragma once

// Multi-indices and the graded ordering that fixes the block layout of every
// matrix in the library.
//
// Ordering convention: total degree ascending; inside a degree block the
// exponent vectors are listed in lexicographically decreasing order, so for
// D = 2 the degree-2 block is (2,0), (1,1), (0,2), i.e. x^2, xy, y^2.

#include "mvop/errors.hpp"

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <memory>
#include <numeric>
#include <string>
#include <vector>

namespace mvop {

class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(int dimension) : e_(static_cast<std::size_t>(dimension), 0) {
    if (dimension < 1) throw DimensionMismatch("multi-index dimension must be >= 1");
  }
  MultiIndex(std::initializer_list<int> exps) : e_(exps) { check(); }
  explicit MultiIndex(std::vector<int> exps) : e_(std::move(exps)) { check(); }

  /// e_a: the unit multi-index along axis a (0-based).
  static MultiIndex unit(int dimension, int axis) {
    MultiIndex m(dimension);
    m.e_.at(static_cast<std::size_t>(axis)) = 1;
    return m;
  }

  int dimension() const { return static_cast<int>(e_.size()); }
  int degree() const { return std::accumulate(e_.begin(), e_.end(), 0); }
  int operator[](int a) const { return e_[static_cast<std::size_t>(a)]; }
  int& operator[](int a) { return e_[static_cast<std::size_t>(a)]; }
  const std::vector<int>& exponents() const { return e_; }

  MultiIndex& operator+=(const MultiIndex& o) {
    same_dim(o);
    for (std::size_t i = 0; i < e_.size(); ++i) e_[i] += o.e_[i];
    return *this;
  }
  friend MultiIndex operator+(MultiIndex a, const MultiIndex& b) { return a += b; }

  /// Componentwise a >= b, i.e. x^b divides x^a.
  bool dominates(const MultiIndex& o) const {
    same_dim(o);
    for (std::size_t i = 0; i < e_.size(); ++i)
      if (e_[i] < o.e_[i]) return false;
    return true;
  }
  MultiIndex minus(const MultiIndex& o) const {
    MultiIndex r(*this);
    for (std::size_t i = 0; i < e_.size(); ++i) r.e_[i] -= o.e_[i];
    return r;
  }

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

  std::string str() const {
    std::string s = "(";
    for (std::size_t i = 0; i < e_.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(e_[i]);
    }
    return s + ")";
  }

 private:
  void check() const {
    if (e_.empty()) throw DimensionMismatch("multi-index dimension must be >= 1");
    for (int v : e_)
      if (v < 0) throw DimensionMismatch("multi-index exponents must be non-negative");
  }
  void same_dim(const MultiIndex& o) const {
    if (o.e_.size() != e_.size()) throw DimensionMismatch("multi-index dimension mismatch");
  }

  std::vector<int> e_;
};

/// Graded comparison: less means `a` is listed before `b`.
inline std::strong_ordering graded_compare(const MultiIndex& a, const MultiIndex& b) {
  if (a.dimension() != b.dimension()) throw DimensionMismatch("compare: dimension mismatch");
  if (auto c = a.degree() <=> b.degree(); c != 0) return c;
  for (int i = 0; i < a.dimension(); ++i)
    if (a[i] != b[i]) return b[i] <=> a[i];  // larger leading exponent comes first
  return std::strong_ordering::equal;
}

struct GradedLess {
  bool operator()(const MultiIndex& a, const MultiIndex& b) const { return graded_compare(a, b) < 0; }
};

namespace detail {

inline std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r = 0;
  if (__builtin_mul_overflow(a, b, &r)) throw CapacityError("binomial coefficient overflows 64 bits");
  return r;
}

}  // namespace detail

/// C(n, r) with overflow detection.
inline std::int64_t binomial(std::int64_t n, std::int64_t r) {
  if (r < 0 || n < 0 || r > n) return 0;
  if (r > n - r) r = n - r;
  std::int64_t result = 1;
  for (std::int64_t i = 1; i <= r; ++i) {
    // result * (n - r + i) is divisible by i; divide by gcd first to delay overflow
    std::int64_t num = n - r + i;
    std::int64_t g = std::gcd(result, i);
    result = detail::checked_mul(result / g, num / (i / g));
  }
  return result;
}

/// |[k]| = C(D+k-1, k): number of monomials of total degree exactly k.
inline std::int64_t block_size(int dimension, int k) {
  if (dimension < 1) throw DimensionMismatch("dimension must be >= 1");
  if (k < 0) throw DegreeOverflow("block degree must be >= 0");
  return binomial(dimension + k - 1, k);
}

/// N_k = C(D+k, D): dimension of polynomials of degree <= k; N_{-1} = 0.
inline std::int64_t cumulative_dim(int dimension, int k) {
  if (dimension < 1) throw DimensionMismatch("dimension must be >= 1");
  if (k < -1) throw DegreeOverflow("cumulative_dim needs k >= -1");
  if (k == -1) return 0;
  return binomial(dimension + k, dimension);
}

/// r_{k,m} = N_{k+m-1} - N_{k-1} = |[k]| + ... + |[k+m-1]|.
inline std::int64_t window_size(int dimension, int k, int m) {
  if (k < 0 || m < 0) throw DegreeOverflow("window_size needs k >= 0, m >= 0");
  return cumulative_dim(dimension, k + m - 1) - cumulative_dim(dimension, k - 1);
}

/// Multi-indices of total degree k, in block order.
inline std::vector<MultiIndex> block_indices(int dimension, int k) {
  std::vector<MultiIndex> out;
  std::vector<int> cur(static_cast<std::size_t>(dimension), 0);
  // Fill position `pos` with every value from `left` down to 0.
  auto rec = [&](auto&& self, int pos, int left) -> void {
    if (pos == dimension - 1) {
      cur[static_cast<std::size_t>(pos)] = left;
      out.emplace_back(cur);
      return;
    }
    for (int v = left; v >= 0; --v) {
      cur[static_cast<std::size_t>(pos)] = v;
      self(self, pos + 1, left - v);
    }
  };
  rec(rec, 0, k);
  return out;
}

/// Position <-> multi-index bijection for all monomials of degree <= L.
/// Immutable after construction.
class GradedBasis {
 public:
  GradedBasis(int dimension, int max_degree) : dim_(dimension), max_degree_(max_degree) {
    if (dimension < 1) throw DimensionMismatch("dimension must be >= 1");
    if (max_degree < 0) throw DegreeOverflow("max degree must be >= 0");
    offsets_.reserve(static_cast<std::size_t>(max_degree) + 2);
    for (int k = 0; k <= max_degree; ++k) {
      offsets_.push_back(static_cast<std::int64_t>(indices_.size()));
      for (auto& a : block_indices(dimension, k)) {
        index_.emplace(a, static_cast<std::int64_t>(indices_.size()));
        indices_.push_back(std::move(a));
      }
    }
    offsets_.push_back(static_cast<std::int64_t>(indices_.size()));
  }

  static std::shared_ptr<const GradedBasis> make(int dimension, int max_degree) {
    return std::make_shared<const GradedBasis>(dimension, max_degree);
  }

  int dimension() const { return dim_; }
  int max_degree() const { return max_degree_; }
  /// N_L.
  std::int64_t size() const { return static_cast<std::int64_t>(indices_.size()); }

  /// First position of block [k] (= N_{k-1}); k may be max_degree + 1.
  std::int64_t block_offset(int k) const {
    if (k < 0 || k > max_degree_ + 1) throw DegreeOverflow("block offset out of range: " + std::to_string(k));
    return offsets_[static_cast<std::size_t>(k)];
  }
  std::int64_t block_length(int k) const { return block_offset(k + 1) - block_offset(k); }

  std::int64_t index_of(const MultiIndex& a) const {
    if (a.dimension() != dim_) throw DimensionMismatch("index_of: dimension mismatch");
    auto it = index_.find(a);
    if (it == index_.end())
      throw DegreeOverflow("multi-index " + a.str() + " exceeds truncation degree " + std::to_string(max_degree_));
    return it->second;
  }
  bool contains(const MultiIndex& a) const { return a.dimension() == dim_ && a.degree() <= max_degree_; }

  const MultiIndex& multiindex_at(std::int64_t pos) const { return indices_.at(static_cast<std::size_t>(pos)); }

  /// Position of alpha + e_axis (axis 0-based).
  std::int64_t shifted_position(const MultiIndex& alpha, int axis) const {
    if (axis < 0 || axis >= dim_) throw DimensionMismatch("axis out of range");
    if (alpha.degree() + 1 > max_degree_) throw DegreeOverflow("shift leaves the truncation");
    return index_of(alpha + MultiIndex::unit(dim_, axis));
  }

  /// Degree of the block containing position `pos`.
  int degree_at(std::int64_t pos) const { return multiindex_at(pos).degree(); }

 private:
  int dim_;
  int max_degree_;
  std::vector<MultiIndex> indices_;
  std::vector<std::int64_t> offsets_;
  std::map<MultiIndex, std::int64_t, GradedLess> index_;
};

}  // namespace mvop
