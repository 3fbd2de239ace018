#pragma once

#include <limits>

namespace rca {

// Tolerance hierarchy. Exact linear-algebraic identities are checked at
// kTolLinear, oracle-vs-oracle comparisons at kTolOracle, and anything that
// came out of an iterative solver at kTolOptim.
inline constexpr double kTolLinear = 1e-12;
inline constexpr double kTolOracle = 1e-9;
inline constexpr double kTolOptim = 1e-6;

// Distances below this are reported as exactly zero so that support sets of
// the form [d > 0] are stable.
inline constexpr double kDistanceSnap = 1e-9;

inline constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace rca
