#include "doctest.h"

#include <cmath>

#include "rca/bodies.hpp"
#include "rca/cond_norm.hpp"
#include "rca/errors.hpp"
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

}  // namespace

TEST_SUITE("cond_norm") {

TEST_CASE("frozen values for x=(1,2,3,4) on the uniform two-block space") {
  const FiniteProbSpace space = uniform4();
  const SigmaAlgebra F = twoBlocks();
  const RandVar x = vec({1, 2, 3, 4});

  // Oracle: sqrt(block_mean of squares) -> [1.5811388300841898, 3.5355339059327378].
  const RandVar n2 = condNorm(space, F, x, 2.0);
  CHECK(n2[0] == doctest::Approx(1.5811388300841898).epsilon(1e-14));
  CHECK(n2[1] == doctest::Approx(1.5811388300841898).epsilon(1e-14));
  CHECK(n2[3] == doctest::Approx(3.5355339059327378).epsilon(1e-14));

  const RandVar n1 = condNorm(space, F, x, 1.0);
  CHECK(n1[0] == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(n1[2] == doctest::Approx(3.5).epsilon(1e-15));

  const RandVar ninf = condNorm(space, F, x, kInf);
  CHECK(ninf[0] == 2.0);
  CHECK(ninf[2] == 4.0);

  CHECK_THROWS_AS(condNorm(space, F, x, 0.5), InputError);  // p < 1 is not a norm
}

TEST_CASE("blockNorm agrees with the broadcast route") {
  const Eigen::ArrayXd wb = Eigen::ArrayXd::Constant(2, 0.5);
  CHECK(blockNorm(wb, vec({1, 2}), 2.0) == doctest::Approx(1.5811388300841898).epsilon(1e-14));
  CHECK(blockNorm(wb, vec({-3, 1}), kInf) == 3.0);
  CHECK(blockNorm(wb, vec({0, 0}), 1.0) == 0.0);
}

TEST_CASE("module-norm axiom suite passes across exponents") {
  Rng rng(5);
  const FiniteProbSpace space = randomSpace(rng, 9);
  const SigmaAlgebra F = randomAlgebra(rng, 9, 4);
  for (const double p : {1.0, 2.0, 3.5, kInf}) {
    const Report rep = rnmAxiomCheck(space, F, p, 120, 44 + static_cast<std::uint64_t>(p));
    CHECK_MESSAGE(rep.allPass(), "p = ", p);
  }
}

TEST_CASE("the two neighborhood systems agree on the frozen example") {
  const FiniteProbSpace space = uniform4();
  const SigmaAlgebra F = twoBlocks();
  const RandVar x = vec({1, 2, 3, 4});

  // |||x|||_inf = (2,2,4,4): the Tc ball of measurable radius accepts iff
  // the radius dominates blockwise.
  CHECK(ballMembershipTc(space, F, x, kInf, vec({2, 2, 4, 4})));
  CHECK_FALSE(ballMembershipTc(space, F, x, kInf, vec({2, 2, 3.9, 3.9})));

  // Oracle: P{|||x|||_inf < 3} = 0.5, so membership needs lambda > 0.5.
  CHECK(ballMembershipEpsLambda(space, F, x, kInf, 3.0, 0.6));
  CHECK_FALSE(ballMembershipEpsLambda(space, F, x, kInf, 3.0, 0.4));
}

TEST_CASE("randomDistance: frozen box case and the zero snap") {
  const FiniteProbSpace space = uniform4();
  const SigmaAlgebra F = twoBlocks();
  const ConvexBody box = boxBody(F, RandVar::Zero(4), RandVar::Ones(4));
  const RandVar x = vec({2.0, 0.5, 0.5, 0.5});

  // Oracle: per-block sup-distance to the clamp is (1.0, 0.0).
  const RandVar dinf = randomDistance(space, F, x, box, kInf);
  CHECK(dinf[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(dinf[2] == 0.0);  // members snap to exactly zero

  // Members of the body are at distance exactly 0 for every exponent.
  const RandVar inside = vec({0.25, 0.75, 0.5, 1.0});
  for (const double p : {1.0, 2.0, kInf}) {
    const RandVar d = randomDistance(space, F, inside, box, p);
    CHECK(d.abs().maxCoeff() == 0.0);
  }
}

TEST_CASE("randomDistance: hull route cross-checked against the projection") {
  Rng rng(23);
  const FiniteProbSpace space = uniform4();
  const SigmaAlgebra F = twoBlocks();
  const RandVar w = condWeights(space, F);
  for (int t = 0; t < 30; ++t) {
    std::vector<RandVar> gens;
    for (int g = 0; g < 3; ++g) gens.push_back(randomVector(rng, 4));
    const ConvexBody hull = hullBody(F, gens);
    const RandVar x = randomVector(rng, 4);
    const RandVar d = randomDistance(space, F, x, hull, 2.0);
    for (int b = 0; b < F.blocks(); ++b) {
      const HullProjection proj =
          projectHull(hull.gens[b], blockSlice(x, F, b).matrix(), blockSlice(w, F, b).matrix());
      const double expected = std::sqrt(proj.dist2);
      const double got = d[F.members(b)[0]];
      if (expected <= kDistanceSnap) {
        CHECK(got == 0.0);
      } else {
        CHECK(std::abs(got - expected) <= kTolOracle);
      }
    }
  }
}

}  // TEST_SUITE
