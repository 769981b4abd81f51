#pragma once

#include <stdexcept>
#include <string>

namespace mvop {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Integer arithmetic on basis sizes overflowed 64 bits.
struct CapacityError : Error {
  using Error::Error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

/// A degree index fell outside the truncation.
struct DegreeOverflow : Error {
  using Error::Error;
};

/// H_[k] is singular: the measure has no MVOPR family at degree k.
struct SingularBlock : Error {
  explicit SingularBlock(int k)
      : Error("singular block at degree " + std::to_string(k)), degree(k) {}
  int degree;
};

struct SingularMatrix : Error {
  using Error::Error;
};

struct NotPoised : Error {
  using Error::Error;
};

/// Exact division by the perturbation polynomial left a remainder.
struct InexactDivision : Error {
  using Error::Error;
};

struct NodeOffVariety : Error {
  using Error::Error;
};

struct RootFindingFailure : Error {
  using Error::Error;
};

struct ParseError : Error {
  using Error::Error;
};

}  // namespace mvop
