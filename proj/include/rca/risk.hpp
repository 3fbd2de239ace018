#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rca/report.hpp"
#include "rca/space.hpp"

namespace rca {

// Shipped conditional risk measures. The first five satisfy all four axioms
// (monotone, cash-invariant, local, L0-convex). The last two are negative
// controls and must fail the suite: NegSqCondExpect breaks cash invariance
// and convexity, MeanControl is convex but sees across blocks, so it breaks
// locality and with it L0-convexity.
enum class RiskFamily {
  NegCondExpect,
  Entropic,
  Avar,
  WorstCase,
  ScenarioRobust,
  NegSqCondExpect,
  MeanControl,
};

struct RiskSpec {
  RiskFamily family = RiskFamily::NegCondExpect;
  double beta = 1.0;                // Entropic
  RandVar lambda;                   // Avar: F-measurable, 0 < lambda <= 1
  std::vector<RandVar> densities;   // ScenarioRobust: each dual feasible
};

std::string familyName(RiskFamily family);
RiskFamily familyFromName(const std::string& name);

// y <= 0 atomwise with E[y|F] = -1 on every block, both within tol.
bool isDualFeasible(const FiniteProbSpace& space, const SigmaAlgebra& F, const RandVar& y,
                    double tol = 1e-12);

void validateRiskSpec(const FiniteProbSpace& space, const SigmaAlgebra& F, const RiskSpec& spec);

RandVar riskEvaluate(const FiniteProbSpace& space, const SigmaAlgebra& F, const RiskSpec& spec,
                     const RandVar& x);

// The density achieving the dual representation's supremum at x, built from
// the family's structure (softmax weights for entropic, the greedy fill for
// avar, a point mass for worst case). Negative controls have no
// representation and raise InputError.
RandVar riskMaximizerDensity(const FiniteProbSpace& space, const SigmaAlgebra& F,
                             const RiskSpec& spec, const RandVar& x);

// Randomized axiom suite: monotonicity, cash invariance, locality, direct
// L0-convexity with measurable weights, and the convex+local cross-check.
Report riskAxiomCheck(const FiniteProbSpace& space, const SigmaAlgebra& F, const RiskSpec& spec,
                      int trials, std::uint64_t seed);

// Cross-family order relations and degenerate coincidences.
Report riskOrderingCheck(const FiniteProbSpace& space, const SigmaAlgebra& F, int trials,
                         std::uint64_t seed);

}  // namespace rca
