#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "rca/errors.hpp"
#include "rca/risk.hpp"
#include "rca/sampling.hpp"
#include "rca/tolerances.hpp"

using namespace rca;

namespace {

RandVar vec(std::initializer_list<double> vals) {
  RandVar x(static_cast<Eigen::Index>(vals.size()));
  Eigen::Index i = 0;
  for (double v : vals) x[i++] = v;
  return x;
}

FiniteProbSpace uniform4() { return FiniteProbSpace(Eigen::ArrayXd::Constant(4, 0.25)); }
SigmaAlgebra twoBlocks() { return SigmaAlgebra({0, 0, 1, 1}); }

RiskSpec entropicSpec(double beta) {
  RiskSpec s;
  s.family = RiskFamily::Entropic;
  s.beta = beta;
  return s;
}

RiskSpec avarSpec(const RandVar& lambda) {
  RiskSpec s;
  s.family = RiskFamily::Avar;
  s.lambda = lambda;
  return s;
}

RiskSpec plainSpec(RiskFamily f) {
  RiskSpec s;
  s.family = f;
  return s;
}

// Which records of the axiom suite failed, as a sorted id list.
std::vector<std::string> failedIds(const Report& rep) {
  std::vector<std::string> out;
  for (const auto& rec : rep.records)
    if (!rec.pass) out.push_back(rec.id);
  return out;
}

}  // namespace

TEST_SUITE("risk") {

TEST_CASE("family names round-trip") {
  for (const RiskFamily f :
       {RiskFamily::NegCondExpect, RiskFamily::Entropic, RiskFamily::Avar, RiskFamily::WorstCase,
        RiskFamily::ScenarioRobust, RiskFamily::NegSqCondExpect, RiskFamily::MeanControl}) {
    CHECK(familyFromName(familyName(f)) == f);
  }
  CHECK_THROWS_AS(familyFromName("exotic"), InputError);
}

TEST_CASE("entropic frozen values and the cash identity instance") {
  const FiniteProbSpace space = uniform4();
  const SigmaAlgebra F = twoBlocks();
  const RandVar x = vec({1, 2, 3, 4});

  // Oracle: log block-mean of exp(-x) -> [-1.3798854930417224, -3.3798854930417224].
  const RandVar f = riskEvaluate(space, F, entropicSpec(1.0), x);
  CHECK(f[0] == doctest::Approx(-1.3798854930417224).epsilon(1e-14));
  CHECK(f[1] == doctest::Approx(-1.3798854930417224).epsilon(1e-14));
  CHECK(f[3] == doctest::Approx(-3.3798854930417224).epsilon(1e-14));

  // Cash invariance at the measurable shift m = (1,1,-1,-1): exact for the
  // exponential family, algebraically.
  const RandVar m = vec({1, 1, -1, -1});
  const RandVar shifted = riskEvaluate(space, F, entropicSpec(1.0), x + m);
  CHECK(((shifted - (f - m)).abs().maxCoeff()) <= kTolLinear);
}

TEST_CASE("avar, worst-case, neg-cond-expect frozen values") {
  const FiniteProbSpace space = uniform4();
  const SigmaAlgebra F = twoBlocks();
  const RandVar x = vec({1, 2, 3, 4});

  // Oracle: avar lambda=0.5 on block (1,2) puts all density on the worst atom -> -1.
  const RandVar half = riskEvaluate(space, F, avarSpec(RandVar::Constant(4, 0.5)), x);
  CHECK(half[0] == doctest::Approx(-1.0).epsilon(1e-14));
  CHECK(half[2] == doctest::Approx(-3.0).epsilon(1e-14));

  const RandVar worst = riskEvaluate(space, F, plainSpec(RiskFamily::WorstCase), x);
  CHECK(worst[0] == -1.0);
  CHECK(worst[2] == -3.0);

  const RandVar mean = riskEvaluate(space, F, plainSpec(RiskFamily::NegCondExpect), x);
  CHECK(mean[0] == doctest::Approx(-1.5).epsilon(1e-14));
  CHECK(mean[2] == doctest::Approx(-3.5).epsilon(1e-14));

  // lambda = 1 collapses avar onto the conditional mean.
  const RandVar full = riskEvaluate(space, F, avarSpec(RandVar::Ones(4)), x);
  CHECK(((full - mean).abs().maxCoeff()) <= kTolLinear);
}

TEST_CASE("scenario-robust dominates each of its densities") {
  Rng rng(71);
  const FiniteProbSpace space = uniform4();
  const SigmaAlgebra F = twoBlocks();
  RiskSpec s;
  s.family = RiskFamily::ScenarioRobust;
  for (int i = 0; i < 3; ++i) s.densities.push_back(randomFeasibleDensity(rng, space, F));
  validateRiskSpec(space, F, s);

  for (int t = 0; t < 40; ++t) {
    const RandVar x = randomVector(rng, 4);
    const RandVar f = riskEvaluate(space, F, s, x);
    for (const RandVar& y : s.densities) {
      const RandVar pairing = condExpect(space, F, x * y);
      CHECK(((f - pairing).minCoeff()) >= -kTolLinear);
    }
  }
}

TEST_CASE("spec validation rejects malformed parameters") {
  const FiniteProbSpace space = uniform4();
  const SigmaAlgebra F = twoBlocks();

  CHECK_THROWS_AS(validateRiskSpec(space, F, entropicSpec(0.0)), InputError);
  CHECK_THROWS_AS(validateRiskSpec(space, F, entropicSpec(-1.0)), InputError);
  CHECK_THROWS_AS(validateRiskSpec(space, F, avarSpec(RandVar::Zero(4))), InputError);
  CHECK_THROWS_AS(validateRiskSpec(space, F, avarSpec(RandVar::Constant(4, 1.5))), InputError);
  CHECK_THROWS_AS(validateRiskSpec(space, F, avarSpec(vec({0.5, 0.6, 0.5, 0.5}))), InputError);

  RiskSpec robust;
  robust.family = RiskFamily::ScenarioRobust;
  CHECK_THROWS_AS(validateRiskSpec(space, F, robust), InputError);  // no densities
  robust.densities.push_back(RandVar::Ones(4));                    // not a density at all
  CHECK_THROWS_AS(validateRiskSpec(space, F, robust), InputError);
}

TEST_CASE("dual feasibility predicate") {
  Rng rng(3);
  const FiniteProbSpace space = uniform4();
  const SigmaAlgebra F = twoBlocks();
  for (int t = 0; t < 20; ++t)
    CHECK(isDualFeasible(space, F, randomFeasibleDensity(rng, space, F)));
  CHECK_FALSE(isDualFeasible(space, F, RandVar::Zero(4)));         // mean 0, not -1
  CHECK_FALSE(isDualFeasible(space, F, vec({1, -3, -1, -1})));     // positive entry
}

TEST_CASE("axiom suite passes for every shipped family") {
  Rng rng(12);
  const FiniteProbSpace space = randomSpace(rng, 8);
  const SigmaAlgebra F = randomAlgebra(rng, 8, 3);

  std::vector<RiskSpec> specs{entropicSpec(2.0), plainSpec(RiskFamily::WorstCase),
                              plainSpec(RiskFamily::NegCondExpect)};
  specs.push_back(avarSpec(randomMeasurablePositive(rng, F, 0.25, 1.0)));
  RiskSpec robust;
  robust.family = RiskFamily::ScenarioRobust;
  for (int i = 0; i < 2; ++i) robust.densities.push_back(randomFeasibleDensity(rng, space, F));
  specs.push_back(robust);

  for (const RiskSpec& s : specs) {
    const Report rep = riskAxiomCheck(space, F, s, 150, 555);
    CHECK_MESSAGE(rep.allPass(), familyName(s.family));
  }
}

TEST_CASE("negative controls fail exactly where advertised") {
  const FiniteProbSpace space = uniform4();
  const SigmaAlgebra F = twoBlocks();

  // neg_sq_cond_expect breaks monotonicity, cash invariance, and convexity,
  // but stays local: the local record must never be among the failures.
  const Report sq = riskAxiomCheck(space, F, plainSpec(RiskFamily::NegSqCondExpect), 200, 99);
  CHECK_FALSE(sq.allPass());
  for (const auto& id : failedIds(sq)) CHECK(id != "risk/neg_sq_cond_expect/local");
  const auto sqFailed = failedIds(sq);
  CHECK(std::find(sqFailed.begin(), sqFailed.end(), "risk/neg_sq_cond_expect/cash") !=
        sqFailed.end());
  CHECK(std::find(sqFailed.begin(), sqFailed.end(), "risk/neg_sq_cond_expect/l0-convex") !=
        sqFailed.end());

  // mean_control is linear (so convex) but reads other blocks: locality must
  // fail, convexity must not.
  const Report mc = riskAxiomCheck(space, F, plainSpec(RiskFamily::MeanControl), 200, 99);
  CHECK_FALSE(mc.allPass());
  bool localFailed = false;
  for (const auto& id : failedIds(mc)) {
    if (id == "risk/mean_control/local") localFailed = true;
    CHECK(id != "risk/mean_control/l0-convex");
  }
  CHECK(localFailed);

  // Failures must ship a concrete witness row.
  for (const auto& rec : mc.records)
    if (!rec.pass) CHECK_FALSE(rec.witnesses.empty());
}

TEST_CASE("maximizer densities are feasible and attain the evaluation") {
  Rng rng(31);
  const FiniteProbSpace space = randomSpace(rng, 6);
  const SigmaAlgebra F = randomAlgebra(rng, 6, 3);

  std::vector<RiskSpec> specs{entropicSpec(1.0), plainSpec(RiskFamily::WorstCase),
                              plainSpec(RiskFamily::NegCondExpect),
                              avarSpec(randomMeasurablePositive(rng, F, 0.3, 1.0))};
  for (const RiskSpec& s : specs) {
    for (int t = 0; t < 25; ++t) {
      const RandVar x = randomVector(rng, 6);
      const RandVar y = riskMaximizerDensity(space, F, s, x);
      CHECK(isDualFeasible(space, F, y, 1e-9));
    }
  }
  CHECK_THROWS_AS(riskMaximizerDensity(space, F, plainSpec(RiskFamily::NegSqCondExpect),
                                       randomVector(rng, 6)),
                  InputError);
  CHECK_THROWS_AS(riskMaximizerDensity(space, F, plainSpec(RiskFamily::MeanControl),
                                       randomVector(rng, 6)),
                  InputError);
}

TEST_CASE("cross-family order relations") {
  Rng rng(47);
  const FiniteProbSpace space = randomSpace(rng, 8);
  const SigmaAlgebra F = randomAlgebra(rng, 8, 4);
  CHECK(riskOrderingCheck(space, F, 150, 2718).allPass());
}

}  // TEST_SUITE
