#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "rca/space.hpp"

namespace rca {

enum class BodyKind { Box, Hull, BallInf, Cuts };

// A closed convex set with product structure across F-blocks: a vector belongs
// to the body iff each of its block restrictions lies in that block's set.
// Product structure is the only shape this type can express, which is exactly
// what the stability-under-gluing axiom demands, so non-stable sets are
// unrepresentable by construction.
//
// Per-block payloads by kind:
//   Box     cell intervals [lower, upper] per atom (entries may be +-inf)
//   Hull    convex hull of the columns of gens[b]
//   BallInf sup-ball of radius radius[b]
//   Cuts    two-sided pairing constraints |r_i . x_b| <= 1, rows of cuts[b]
//           (rows come pre-multiplied by the conditional weights)
class ConvexBody {
 public:
  BodyKind kind;
  std::vector<Eigen::ArrayXd> lower, upper;    // Box
  std::vector<Eigen::MatrixXd> gens;           // Hull, block dim x generator count
  Eigen::ArrayXd radius;                       // BallInf, one entry per block
  std::vector<Eigen::MatrixXd> cuts;           // Cuts, constraint count x block dim

  int blocks() const;
  int blockDim(int b) const;
};

ConvexBody boxBody(const SigmaAlgebra& F, const RandVar& lower, const RandVar& upper);
ConvexBody ballInfBody(const SigmaAlgebra& F, const RandVar& radius);  // F-measurable radius
ConvexBody hullBody(const SigmaAlgebra& F, const std::vector<RandVar>& generators);
// conv{ +-scale_i e_i } per block; scale must be strictly positive.
ConvexBody crossPolytopeBody(const SigmaAlgebra& F, const RandVar& scale);

// Membership of the block restriction xb in t * (block set). t = 0 collapses
// every kind to {0}. Tolerance is an absolute slack on the defining
// inequalities; for hulls it bounds the projection residual instead.
bool memberBlock(const ConvexBody& body, int b, const Eigen::ArrayXd& xb, double t,
                 const Eigen::ArrayXd& wb, double tol);
bool member(const FiniteProbSpace& space, const SigmaAlgebra& F, const ConvexBody& body,
            const RandVar& x, double tol);

// Strict interior test; hulls are probed along coordinate directions with a
// step of probe.
bool interiorBlock(const ConvexBody& body, int b, const Eigen::ArrayXd& xb,
                   const Eigen::ArrayXd& wb, double probe);

// 0 in U and balanced (symmetry of the block sets); absorbency is automatic
// for the bounded kinds once 0 is interior, so callers check that separately.
bool containsZero(const FiniteProbSpace& space, const SigmaAlgebra& F, const ConvexBody& body,
                  double tol);
bool isBalanced(const FiniteProbSpace& space, const SigmaAlgebra& F, const ConvexBody& body,
                double tol);

struct HullProjection {
  Eigen::VectorXd point;   // nearest point of the hull in the weighted metric
  Eigen::VectorXd lambda;  // convex coefficients over the generator columns
  double dist2 = 0.0;      // squared weighted distance
  int iterations = 0;
};

// Nearest-point problem over conv(columns of G) in the metric <u,v> = u' W v,
// W = diag(w), solved by Wolfe's active-set method. Throws BudgetError past
// cap iterations.
HullProjection projectHull(const Eigen::MatrixXd& G, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& w, double tol = 1e-9, int cap = 10000);

}  // namespace rca
