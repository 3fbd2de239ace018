#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "rca/report.hpp"
#include "rca/space.hpp"

namespace rca {

// Non-recombining binary tree over [0, maturity]: 2^steps leaves with
// uniform probability, leaf index = path bits with the first step as the
// most significant bit, bit 0 meaning an up move of +sqrt(dt).
struct BinaryTree {
  int steps = 1;
  double maturity = 1.0;

  double dt() const { return maturity / steps; }
  int leaves() const { return 1 << steps; }

  // F_t: partition of the leaves by their depth-t ancestor.
  SigmaAlgebra algebraAt(int t) const;
  FiniteProbSpace space() const;

  // Brownian path value at the leaf after all steps.
  double terminalB(int leaf) const;
};

BinaryTree makeTree(int steps, double maturity);

struct Driver {
  std::string name;
  double mu = 0.0;  // Lipschitz constant in z
  std::function<double(double t, double z)> g;
};

Driver zeroDriver();
Driver absDriver(double mu);
Driver linearDriver(double mu);
// Concave in z: a negative control. The axiom suite's convexity records
// must fail under it.
Driver negAbsDriver(double mu);

// Conditions (A), (C), (D) on sampled points: Lipschitz in z with the
// declared constant, zero at z = 0, convex in z.
Report driverInvariantCheck(const Driver& d, double maturity, int samples, std::uint64_t seed);

// Y per level (level t holds 2^t nodes), Z per non-leaf level.
struct GSolution {
  std::vector<std::vector<double>> Y;
  std::vector<std::vector<double>> Z;
};

// One-pass backward induction: Z = (Y_up - Y_down)/(2 sqrt(dt)),
// Y = (Y_up + Y_down)/2 + g(t, Z) dt. Requires mu*sqrt(dt) <= 1, which is
// what keeps the scheme monotone (and with it comparison).
GSolution backwardSolve(const BinaryTree& tree, const Driver& d, const RandVar& terminal);

// rho_t(x) = E_g(-x | F_t), broadcast back to the leaves.
RandVar rho(const BinaryTree& tree, const Driver& d, const RandVar& x, int t);

// Monotonicity, cash invariance under F_t-measurable shifts, L0(F_t)-
// convexity, locality, the Lipschitz bound with c = e^{8(1+mu^2)(T-t)},
// comparison against a driver dominating g, time consistency of the
// recursion, and the zero-driver/conditional-expectation agreement.
Report gexpAxiomSuite(const BinaryTree& tree, const Driver& d, int trials, std::uint64_t seed);

// Y_0 for a fixed payoff functional of B_T while the step count doubles up
// to maxSteps; informational trend report per the design notes.
Report gexpConvergenceReport(int maxSteps, double mu, double maturity);

}  // namespace rca
