#pragma once

#include <cstdint>

#include "rca/bodies.hpp"
#include "rca/report.hpp"
#include "rca/space.hpp"

namespace rca {

// Conditional L^p norm |||x|||_{p,F}: per block (E[|x|^p | F])^{1/p} for
// finite p, the per-block maximum of |x| for p = inf. Result is broadcast to
// atoms, so it is F-measurable by construction.
RandVar condNorm(const FiniteProbSpace& space, const SigmaAlgebra& F, const RandVar& x,
                 double p);

// Norm of a single block restriction; wb are the conditional weights.
double blockNorm(const Eigen::ArrayXd& wb, const Eigen::ArrayXd& ub, double p);

// Randomized module-norm axiom suite: F-homogeneity against measurable
// multipliers, triangle inequality, definiteness, indicator locality, and
// p-monotonicity. Failures carry the worst witness row found.
Report rnmAxiomCheck(const FiniteProbSpace& space, const SigmaAlgebra& F, double p, int trials,
                     std::uint64_t seed);

// Neighborhood membership for the two topologies that coincide at finite
// scale: the locally L0-convex ball {|||x||| <= radius} and the
// probability-of-exceedance ball P{|||x||| < eps} > 1 - lambda.
bool ballMembershipTc(const FiniteProbSpace& space, const SigmaAlgebra& F, const RandVar& x,
                      double p, const RandVar& radius);
bool ballMembershipEpsLambda(const FiniteProbSpace& space, const SigmaAlgebra& F,
                             const RandVar& x, double p, double eps, double lambda);

// d*(x, M): per-block infimum of |||x - y||| over y in the body. Exact
// clamping for boxes and sup-balls at every p; exact weighted projection for
// hulls at p = 2; projected subgradient otherwise. Values below 1e-9 snap to
// exactly 0 so the support set [d* > 0] is stable.
RandVar randomDistance(const FiniteProbSpace& space, const SigmaAlgebra& F, const RandVar& x,
                       const ConvexBody& body, double p);

}  // namespace rca
