#pragma once

#include <cstdint>
#include <vector>

#include "rca/bodies.hpp"
#include "rca/report.hpp"
#include "rca/space.hpp"

namespace rca {

// Certificate for blockwise separation of x from a product body M. The
// functional acts by z -> E[z u|F]; strict marks the blocks where separation
// is strict, and by construction it equals [randomDistance(x, M) > 0].
// margin is clamped at 0; verification recomputes the gap from u directly.
struct SeparationCertificate {
  RandVar u;
  Indicator strict;
  RandVar margin;
};

// On strict blocks u is the normalized projection residual r scaled atomwise
// by 1/(P(atom) |r|_2), which makes the conditional pairing realize the
// Euclidean functional: E[z u|F] = <z_b, r>/(P(block) |r|_2). The margin is
// then d_euclid / P(block), safely above the 1e-9 strictness bar whenever
// the distance survives the snap. On the other blocks u is an outward
// support normal at x when one verifies numerically (|gap| <= 1e-8), else 0.
SeparationCertificate separate(const FiniteProbSpace& space, const SigmaAlgebra& F,
                               const RandVar& x, const ConvexBody& M, double p);

// Re-derives the certificate's claims from u alone: margin above 1e-9 on the
// strict set, |gap| <= 1e-6 off it, and strict = [d* > 0].
Report separationCheck(const FiniteProbSpace& space, const SigmaAlgebra& F, const RandVar& x,
                       const ConvexBody& M, double p);

// sup of E[m u|F] over the block set, exact per kind (vertex max for hulls,
// separable bound picks for boxes and sup-balls).
double supPairingBlock(const ConvexBody& body, int b, const Eigen::ArrayXd& ub,
                       const Eigen::ArrayXd& wb);

// Gauge p_U(x): per-block bisection of the scaled membership oracle to 1e-9.
// Verifies the balanced / contains-zero claims and treats a missing bracket
// below 1e9 as an absorbency violation.
RandVar gauge(const FiniteProbSpace& space, const SigmaAlgebra& F, const ConvexBody& U,
              const RandVar& x);

// Body scaled blockwise by a positive F-measurable factor.
ConvexBody scaleBody(const ConvexBody& body, const SigmaAlgebra& F, const RandVar& xi);

// Prop 2.24 inclusions interior => p < 1 => member => p <= 1, on mixed
// random / member / boundary samples.
Report gaugeSandwichCheck(const FiniteProbSpace& space, const SigmaAlgebra& F,
                          const ConvexBody& U, int samples, std::uint64_t seed);

// Seminorm axioms for the gauge: measurable homogeneity, subadditivity, and
// the scaling rule p_{xi U} = p_U / xi.
Report gaugeSeminormCheck(const FiniteProbSpace& space, const SigmaAlgebra& F,
                          const ConvexBody& U, int trials, std::uint64_t seed);

// A0 = {y : |E[a y|F]| <= 1 per block, for each generator a}, as a Cuts body
// whose rows come pre-multiplied by the conditional weights.
ConvexBody polarOf(const FiniteProbSpace& space, const SigmaAlgebra& F,
                   const std::vector<RandVar>& gens);
ConvexBody polarOf(const FiniteProbSpace& space, const SigmaAlgebra& F, const ConvexBody& A);

// conv{+-a_i} per block: the balanced convex hull with product structure.
ConvexBody balancedHullBody(const SigmaAlgebra& F, const std::vector<RandVar>& gens);

// Membership in A00 straight from the definition: the sup of the pairing
// over the polar polytope, by vertex enumeration over active constraint
// subsets plus a recession-cone test. Shares nothing with the hull route.
bool bipolarMemberByCuts(const FiniteProbSpace& space, const SigmaAlgebra& F,
                         const std::vector<RandVar>& gens, const RandVar& x, double tol);

// Two-sided agreement of the definitional A00 with the balanced convex hull
// on vertices, scaled vertices, gluings, and random probes.
Report bipolarCheck(const FiniteProbSpace& space, const SigmaAlgebra& F,
                    const std::vector<RandVar>& gens, int probes, std::uint64_t seed);

// |x|_A = max over generators of |E[x a|F]| per block.
RandVar supportSeminorm(const FiniteProbSpace& space, const SigmaAlgebra& F, const RandVar& x,
                        const std::vector<RandVar>& gens);

// Seminorm axioms, indicator locality, and invariance under dropping
// non-vertex generators.
Report supportSeminormCheck(const FiniteProbSpace& space, const SigmaAlgebra& F,
                            const std::vector<RandVar>& gens, int trials, std::uint64_t seed);

}  // namespace rca
