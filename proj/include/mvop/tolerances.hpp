#pragma once

// Float-path thresholds. Exact scalars ignore all of these.
//
// Environment overrides (parsed as doubles):
//   MVOP_TOL_CHOLESKY  relative singular-value floor for H blocks
//   MVOP_TOL_POISED    relative singular-value floor for sample matrices
//   MVOP_TOL_DIVISION  relative remainder allowed when dividing by Q
//   MVOP_TOL_VARIETY   |R_a(p)| allowed for a node on Z(R_a)
//   MVOP_TOL_VERIFY    oracle deviation / identity violation allowed

#include "mvop/errors.hpp"

#include <cstdlib>
#include <string>

namespace mvop {

struct Tolerances {
  double cholesky = 1e-10;
  double poised = 1e-8;
  double division = 1e-8;
  double variety = 1e-9;
  double verify = 1e-9;

  /// Applies MVOP_TOL_* environment overrides on top of `base`.
  static Tolerances from_env() { return from_env(Tolerances()); }
  static Tolerances from_env(Tolerances base) {
    auto read = [](const char* name, double& slot) {
      const char* v = std::getenv(name);
      if (!v || !*v) return;
      char* end = nullptr;
      double d = std::strtod(v, &end);
      if (end == v || *end != '\0' || !(d >= 0)) throw ParseError(std::string("invalid value for ") + name + ": " + v);
      slot = d;
    };
    read("MVOP_TOL_CHOLESKY", base.cholesky);
    read("MVOP_TOL_POISED", base.poised);
    read("MVOP_TOL_DIVISION", base.division);
    read("MVOP_TOL_VARIETY", base.variety);
    read("MVOP_TOL_VERIFY", base.verify);
    return base;
  }
};

}  // namespace mvop
