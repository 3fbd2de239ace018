#pragma once

#include <cstdint>
#include <optional>

#include "rca/report.hpp"
#include "rca/risk.hpp"
#include "rca/space.hpp"
#include "rca/stratified.hpp"

namespace rca {

// Conjugation against the conditional pairing <x,y> = E[x y|F]. Values are
// extended reals; +-inf entries follow the conventions in stratified.hpp.
struct ConjugateValue {
  RandVar value;                   // F-measurable, possibly +-inf
  std::optional<RandVar> maximizer;
};

// Budget knobs for the grid-ascent oracle. The oracle escalates the box
// radius (doubling from radiusScale * (1 + scale)) until the running sup is
// stable, crosses divergeThreshold (verdict +inf), or escalations and the
// evaluation budget run out (BudgetError: no verdict either way).
struct BruteConfig {
  double radiusScale = 8.0;
  int refinePasses = 3;          // grid-step halvings per radius
  int sweepCap = 30;             // coordinate sweeps per pass
  int maxEscalations = 24;
  double divergeThreshold = 1e6;
  long long budget = 10000000;   // oracle evaluations
};

// Closed-form conjugate of a shipped family: 0 / +inf indicator shapes for
// the positively homogeneous families, scaled relative entropy for entropic.
ConjugateValue conjugate(const FiniteProbSpace& space, const SigmaAlgebra& F,
                         const RiskSpec& spec, const RandVar& y);

// Independent certification route: per-block coordinate grid ascent of
// E[x y|F] - f(x) over x. Works for any local oracle, extended values
// included.
ConjugateValue conjugateBrute(const FiniteProbSpace& space, const SigmaAlgebra& F,
                              const VectorOracle& f, const RandVar& y,
                              const BruteConfig& config = {});

// f** on the known dual domain. Entropic uses its closed-form maximizer;
// avar and worst_case enumerate the vertices of the box-simplex polytope
// {0 <= q <= w/lambda, sum q = 1}, a route sharing no code with evaluate()'s
// greedy fill.
ConjugateValue biconjugate(const FiniteProbSpace& space, const SigmaAlgebra& F,
                           const RiskSpec& spec, const RandVar& x);

// Generic fallback engine over the feasible densities, softmax-parameterized
// per block, 10^3 iterations at step 0.1/sqrt(k). Guarantees feasibility of
// the maximizer and a weak-duality lower bound on f; measured value accuracy
// is coarse (1e-1 scale on spread inputs), so nothing tight is built on it.
ConjugateValue biconjugateAscent(const FiniteProbSpace& space, const SigmaAlgebra& F,
                                 const RiskSpec& spec, const RandVar& x, int iters = 1000);

// Brute biconjugate for arbitrary oracles: grid ascent over unrestricted y
// with f*(y) itself produced by conjugateBrute. Exponentially expensive, so
// it refuses blocks of dimension > 3.
ConjugateValue biconjugateBrute(const FiniteProbSpace& space, const SigmaAlgebra& F,
                                const VectorOracle& f, const RandVar& x,
                                const BruteConfig& config = {});

struct DualRep {
  RandVar value;
  RandVar maximizer;  // dual feasible within 1e-9, by construction
};

// f(x) = max{ E[x y|F] - f*(y) } over the dual feasible set, evaluated at
// the family's attaining density. Throws std::logic_error if the constructed
// maximizer fails feasibility: that is a solver bug, not an input problem.
DualRep dualRepresentation(const FiniteProbSpace& space, const SigmaAlgebra& F,
                           const RiskSpec& spec, const RandVar& x);

// alpha(Q) for Q = -y dP: the penalty is the conjugate at the density.
RandVar penalty(const FiniteProbSpace& space, const SigmaAlgebra& F, const RiskSpec& spec,
                const RandVar& y);

struct SubgradientResult {
  RandVar u;
  bool verified = false;
  double worstGap = 0.0;  // max over samples of E[(z-x)u|F] - (f(z) - f(x))
};

// The attaining dual density is a subgradient; verified against the
// subgradient inequality on random samples.
SubgradientResult subgradientAt(const FiniteProbSpace& space, const SigmaAlgebra& F,
                                const RiskSpec& spec, const RandVar& x, int samples,
                                std::uint64_t seed);

// MI / PI / BP partition of the blocks, decided by probing an extended
// oracle: MI where some probe reaches -inf, PI where every probe is +inf.
struct DomainClassification {
  Indicator mi, pi, bp;
};

DomainClassification classifyDomain(const SigmaAlgebra& F, const VectorOracle& f,
                                    const std::vector<RandVar>& probes);

// Closedness of f via biconjugation: f** <= f everywhere, f** = f on BP
// blocks whose restriction is the given shipped family (when provided), and
// the +-inf blocks propagate through conjugation, certified by the brute
// oracle rather than by construction.
Report closednessCheck(const FiniteProbSpace& space, const SigmaAlgebra& F,
                       const VectorOracle& f, const std::vector<RandVar>& probes,
                       const RiskSpec* bpFamily, const BruteConfig& config = {});

// E[x y|F] <= f(x) + f*(y) on sampled feasible pairs, with equality at the
// attaining density.
Report fenchelYoungCheck(const FiniteProbSpace& space, const SigmaAlgebra& F,
                         const RiskSpec& spec, int trials, std::uint64_t seed);

// Finite-space shadow of the feasible-set equivalences: restricting the dual
// search to a moment ball around the attaining density leaves the
// representation value unchanged.
Report momentBallShadowCheck(const FiniteProbSpace& space, const SigmaAlgebra& F,
                             const RiskSpec& spec, const RandVar& x, double q, int samples,
                             std::uint64_t seed);

}  // namespace rca
