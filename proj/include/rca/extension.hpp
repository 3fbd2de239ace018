#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "rca/report.hpp"
#include "rca/risk.hpp"
#include "rca/sampling.hpp"
#include "rca/space.hpp"

namespace rca {

// Canonical representation: a partition into F-measurable parts with one
// base point per part, standing for the gluing sum of indicator times piece.
struct CanonicalRep {
  FPartition partition;
  std::vector<RandVar> pieces;
};

// A map on vectors expected to be F-local. extendEval feeds it base points.
using LocalOracle = std::function<RandVar(const RandVar&)>;

CanonicalRep makeRep(FPartition partition, std::vector<RandVar> pieces);

// The point the representation stands for.
RandVar glueRep(const CanonicalRep& rep);

// A representation of x whose pieces agree with x on their parts and are
// junk elsewhere, so locality of the oracle is actually load-bearing.
CanonicalRep randomRepOf(Rng& rng, const SigmaAlgebra& F, const RandVar& x, int maxParts = 4);

// Sum of indicator times f(piece), with extended-value conventions: the
// indicator wins against infinities off its part.
RandVar extendEval(const LocalOracle& f, const CanonicalRep& rep);

// All representations of the same point must evaluate identically; a failure
// names the refinement cell where the oracle saw across parts.
Report representationIndependenceCheck(const FiniteProbSpace& space, const SigmaAlgebra& F,
                                       const LocalOracle& f,
                                       const std::vector<CanonicalRep>& reps);

// |f(x) - f(y)| <= |||x - y|||_inf atomwise for a monotone cash-invariant
// family, evaluated through random representations on both sides. Also
// pins down uniqueness: two extensions agreeing on base points agree
// everywhere.
Report linfLipschitzCheck(const FiniteProbSpace& space, const SigmaAlgebra& F,
                          const RiskSpec& spec, int trials, std::uint64_t seed);

// Optional moment restriction on the sampled densities.
enum class BoundMode { None, Linf, Lgamma };

// Gluings of feasible densities along F-partitions stay feasible (and stay
// inside the moment bound when one is imposed); plus the base round-trip:
// every vector is the gluing of its own restrictions.
Report feasibleHullIdentity(const FiniteProbSpace& space, const SigmaAlgebra& F, double q,
                            BoundMode mode, double gamma, int trials, std::uint64_t seed);

// Monotonicity, cash invariance, and L0-convexity survive the extension:
// the axioms re-checked with every evaluation routed through a fresh random
// representation.
Report extensionPreservationCheck(const FiniteProbSpace& space, const SigmaAlgebra& F,
                                  const RiskSpec& spec, int trials, std::uint64_t seed);

}  // namespace rca
