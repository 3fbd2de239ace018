#include "doctest.h"

#include <cmath>
#include <vector>

#include "rca/cond_norm.hpp"
#include "rca/errors.hpp"
#include "rca/geometry.hpp"
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

TEST_SUITE("geometry") {

TEST_CASE("separation certificate: the frozen box case") {
  // Oracle: x=(2,.5,.5,.5) against [0,1]^4 separates strictly on block A with
  // u=(4,0,0,0): E[x u|F] = 4 against sup_M = 2, margin 2; block B touches.
  const FiniteProbSpace space = uniform4();
  const SigmaAlgebra F = twoBlocks();
  const ConvexBody box = boxBody(F, RandVar::Zero(4), RandVar::Ones(4));
  const RandVar x = vec({2.0, 0.5, 0.5, 0.5});

  const SeparationCertificate cert = separate(space, F, x, box, 2.0);
  CHECK(cert.strict.in[0]);
  CHECK(cert.strict.in[1]);
  CHECK_FALSE(cert.strict.in[2]);
  CHECK(cert.u[0] == doctest::Approx(4.0).epsilon(1e-10));
  CHECK(cert.u[1] == doctest::Approx(0.0).epsilon(1e-10));
  CHECK(cert.margin[0] == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(cert.margin[2] == 0.0);

  const RandVar pairing = condExpect(space, F, x * cert.u);
  CHECK(pairing[0] == doctest::Approx(4.0).epsilon(1e-10));
  const RandVar w = condWeights(space, F);
  CHECK(supPairingBlock(box, 0, blockSlice(cert.u, F, 0), blockSlice(w, F, 0)) ==
        doctest::Approx(2.0).epsilon(1e-10));

  CHECK(separationCheck(space, F, x, box, 2.0).allPass());
}

TEST_CASE("separation check passes across body kinds and exponents") {
  Rng rng(7);
  const FiniteProbSpace space = uniform4();
  const SigmaAlgebra F = twoBlocks();
  for (int t = 0; t < 25; ++t) {
    const RandVar lo = randomVector(rng, 4, -2.0, -0.5);
    const RandVar hi = randomVector(rng, 4, 0.5, 2.0);
    const ConvexBody box = boxBody(F, lo, hi);
    std::vector<RandVar> gens;
    for (int g = 0; g < 4; ++g) gens.push_back(randomVector(rng, 4));
    const ConvexBody hull = hullBody(F, gens);
    const RandVar x = randomVector(rng, 4, -4.0, 4.0);
    for (const double p : {1.0, 2.0, kInf}) {
      CHECK(separationCheck(space, F, x, box, p).allPass());
    }
    CHECK(separationCheck(space, F, x, hull, 2.0).allPass());
  }
}

TEST_CASE("gauge closed forms") {
  const FiniteProbSpace space = uniform4();
  const SigmaAlgebra F = twoBlocks();
  const RandVar x = vec({1, 2, 3, 4});

  // Unit sup-ball: the gauge is the conditional sup-norm (2,2,4,4).
  const RandVar gBall = gauge(space, F, ballInfBody(F, RandVar::Ones(4)), x);
  CHECK(gBall[0] == doctest::Approx(2.0).epsilon(1e-9));
  CHECK(gBall[2] == doctest::Approx(4.0).epsilon(1e-9));

  // The symmetric unit box is the same body.
  const RandVar gBox = gauge(space, F, boxBody(F, RandVar::Constant(4, -1.0), RandVar::Ones(4)), x);
  CHECK(((gBox - gBall).abs().maxCoeff()) <= 1e-9);

  // Cross polytope at scale 1: blockwise l1 sums (3, 7).
  const RandVar gCross = gauge(space, F, crossPolytopeBody(F, RandVar::Ones(4)), x);
  CHECK(gCross[0] == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(gCross[2] == doctest::Approx(7.0).epsilon(1e-9));

  // Against the norm route.
  const RandVar ninf = condNorm(space, F, x, kInf);
  CHECK(((gBall - ninf).abs().maxCoeff()) <= 1e-9);
}

TEST_CASE("gauge rejects bodies outside its preconditions") {
  const FiniteProbSpace space = uniform4();
  const SigmaAlgebra F = twoBlocks();
  const RandVar x = vec({1, -1, 1, -1});

  CHECK_THROWS_WITH(gauge(space, F, boxBody(F, RandVar::Ones(4), RandVar::Constant(4, 2.0)), x),
                    doctest::Contains("must contain zero"));
  CHECK_THROWS_WITH(gauge(space, F, boxBody(F, RandVar::Zero(4), RandVar::Ones(4)), x),
                    doctest::Contains("must be balanced"));

  // A balanced hull spanning only a line of each 2-dim block absorbs nothing
  // off that line.
  const ConvexBody thin = hullBody(F, {vec({1, 1, 1, 1}), vec({-1, -1, -1, -1})});
  CHECK_THROWS_WITH(gauge(space, F, thin, x), doctest::Contains("not absorbent"));
}

TEST_CASE("gauge scaling against scaleBody") {
  Rng rng(11);
  const FiniteProbSpace space = uniform4();
  const SigmaAlgebra F = twoBlocks();
  const ConvexBody ball = ballInfBody(F, RandVar::Ones(4));
  for (int t = 0; t < 20; ++t) {
    const RandVar x = randomVector(rng, 4);
    const RandVar xi = randomMeasurablePositive(rng, F);
    const RandVar lhs = gauge(space, F, scaleBody(ball, F, xi), x);
    const RandVar rhs = gauge(space, F, ball, x) / xi;
    CHECK(((lhs - rhs).abs().maxCoeff()) <= 1e-8);
  }
}

TEST_CASE("gauge sandwich and seminorm suites across body kinds") {
  Rng rng(13);
  const FiniteProbSpace space = uniform4();
  const SigmaAlgebra F = twoBlocks();

  std::vector<RandVar> gens;
  for (int g = 0; g < 3; ++g) gens.push_back(randomVector(rng, 4, -2.0, 2.0));
  const std::vector<ConvexBody> bodies{
      boxBody(F, RandVar::Constant(4, -1.5), RandVar::Constant(4, 1.5)),
      ballInfBody(F, vec({2, 2, 1, 1})),
      crossPolytopeBody(F, RandVar::Constant(4, 1.25)),
      balancedHullBody(F, gens),
  };
  for (std::size_t i = 0; i < bodies.size(); ++i) {
    CHECK_MESSAGE(gaugeSandwichCheck(space, F, bodies[i], 120, 17 + i).allPass(), "body ", i);
    CHECK_MESSAGE(gaugeSeminormCheck(space, F, bodies[i], 60, 19 + i).allPass(), "body ", i);
  }
}

TEST_CASE("polar membership: frozen single-generator case") {
  const FiniteProbSpace space = uniform4();
  const SigmaAlgebra F = twoBlocks();
  const std::vector<RandVar> gens{vec({1, 1, 1, 1})};
  const ConvexBody polar = polarOf(space, F, gens);

  // Oracle: E[a y|F] = (0.5, 0) for y=(2,-1,0,0), within the unit band.
  CHECK(member(space, F, polar, vec({2, -1, 0, 0}), kTolLinear));
  CHECK_FALSE(member(space, F, polar, vec({3, 0, 0, 0}), kTolLinear));  // pairing 1.5
  CHECK(member(space, F, polar, vec({1, 1, -1, -1}), kTolLinear));      // pairing +-1 exactly
}

TEST_CASE("support seminorm: frozen value and suite") {
  const FiniteProbSpace space = uniform4();
  const SigmaAlgebra F = twoBlocks();
  const std::vector<RandVar> gens{vec({1, 1, 1, 1})};

  const RandVar s = supportSeminorm(space, F, vec({2, -1, 0, 0}), gens);
  CHECK(s[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(s[2] == 0.0);

  Rng rng(23);
  std::vector<RandVar> many;
  for (int g = 0; g < 4; ++g) many.push_back(randomVector(rng, 4));
  CHECK(supportSeminormCheck(space, F, many, 100, 27).allPass());
}

TEST_CASE("support seminorm survives duplicated vertices") {
  // Two generators whose block-0 restrictions are exact negatives: the
  // balanced hull lists that vertex twice, which once collapsed the
  // extreme-point invariance check.
  const FiniteProbSpace space = uniform4();
  const SigmaAlgebra F = twoBlocks();
  const std::vector<RandVar> gens{vec({1, 2, 3, 4}), vec({-1, -2, 5, 6})};
  CHECK(supportSeminormCheck(space, F, gens, 80, 29).allPass());
}

TEST_CASE("bipolar: definitional route equals the balanced hull") {
  const FiniteProbSpace space = uniform4();
  const SigmaAlgebra F = twoBlocks();
  const std::vector<RandVar> gens{vec({1, 1, 1, 1})};

  // Blockwise scalings of the generator stay inside the bipolar.
  CHECK(bipolarMemberByCuts(space, F, gens, vec({0.5, 0.5, -1.0, -1.0}), 1e-9));
  CHECK_FALSE(bipolarMemberByCuts(space, F, gens, vec({1.5, 1.5, 0.0, 0.0}), 1e-9));

  Rng rng(37);
  for (int t = 0; t < 5; ++t) {
    std::vector<RandVar> g;
    const int count = 1 + static_cast<int>(rng() % 3);
    for (int i = 0; i < count; ++i) g.push_back(randomVector(rng, 4));
    CHECK(bipolarCheck(space, F, g, 40, 1000 + t).allPass());
  }
}

TEST_CASE("polar of a body object and antitonicity") {
  const FiniteProbSpace space = uniform4();
  const SigmaAlgebra F = twoBlocks();
  const std::vector<RandVar> gens{vec({1, 1, 1, 1}), vec({0.5, -0.5, 1, -1})};
  const ConvexBody hull = balancedHullBody(F, gens);
  const ConvexBody polar = polarOf(space, F, hull);

  // Doubling the body shrinks the polar.
  const ConvexBody bigger = scaleBody(hull, F, RandVar::Constant(4, 2.0));
  const ConvexBody smallerPolar = polarOf(space, F, bigger);
  Rng rng(41);
  for (int t = 0; t < 40; ++t) {
    const RandVar y = randomVector(rng, 4);
    if (member(space, F, smallerPolar, y, kTolLinear))
      CHECK(member(space, F, polar, y, kTolOracle));
  }
}

TEST_CASE("projectHull: exact small projection and the iteration cap") {
  Eigen::MatrixXd G(2, 2);
  G << 0, 1, 0, 1;  // segment from (0,0) to (1,1)
  const Eigen::VectorXd w = Eigen::VectorXd::Constant(2, 0.5);
  const HullProjection proj = projectHull(G, Eigen::Vector2d(1, 0), w);
  CHECK(proj.point[0] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(proj.point[1] == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(proj.dist2 == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(proj.lambda.sum() == doctest::Approx(1.0).epsilon(1e-12));

  CHECK_THROWS_AS(projectHull(G, Eigen::Vector2d(1, 0), w, 1e-9, 0), BudgetError);
  CHECK_THROWS_AS(projectHull(Eigen::MatrixXd(2, 0), Eigen::Vector2d(1, 0), w), InputError);
}

TEST_CASE("membership collapses to the origin at scale zero") {
  const SigmaAlgebra F = twoBlocks();
  const ConvexBody box = boxBody(F, RandVar::Constant(4, -1.0), RandVar::Ones(4));
  const Eigen::ArrayXd wb = Eigen::ArrayXd::Constant(2, 0.5);
  CHECK(memberBlock(box, 0, vec({0, 0}), 0.0, wb, 1e-12));
  CHECK_FALSE(memberBlock(box, 0, vec({0.1, 0}), 0.0, wb, 1e-12));
  CHECK_THROWS_AS(memberBlock(box, 0, vec({0, 0}), -1.0, wb, 1e-12), InputError);
}

}  // TEST_SUITE
