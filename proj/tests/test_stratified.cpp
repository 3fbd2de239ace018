#include "doctest.h"

#include <cmath>
#include <vector>

#include "rca/errors.hpp"
#include "rca/sampling.hpp"
#include "rca/space.hpp"
#include "rca/stratified.hpp"
#include "rca/tolerances.hpp"

using namespace rca;

namespace {

RandVar vec(std::initializer_list<double> vals) {
  RandVar x(static_cast<Eigen::Index>(vals.size()));
  Eigen::Index i = 0;
  for (double v : vals) x[i++] = v;
  return x;
}

// The workhorse fixture: 4 uniform atoms, blocks {0,1} and {2,3}.
FiniteProbSpace uniform4() { return FiniteProbSpace(Eigen::ArrayXd::Constant(4, 0.25)); }
SigmaAlgebra twoBlocks() { return SigmaAlgebra({0, 0, 1, 1}); }

}  // namespace

TEST_SUITE("stratified") {

TEST_CASE("space rejects bad probability vectors") {
  CHECK_THROWS_AS(FiniteProbSpace(vec({0.4, 0.5})), InputError);        // sums to 0.9
  CHECK_THROWS_AS(FiniteProbSpace(vec({0.5, 0.5, 0.0})), InputError);   // zero atom
  CHECK_THROWS_AS(FiniteProbSpace(vec({1.5, -0.5})), InputError);       // negative atom
  CHECK_THROWS_WITH(FiniteProbSpace(vec({0.4, 0.5})),
                    doctest::Contains("probabilities must sum to 1"));
}

TEST_CASE("algebra labels must be contiguous blocks") {
  CHECK_NOTHROW(SigmaAlgebra({0, 0, 1, 2}));
  CHECK_NOTHROW(SigmaAlgebra({0, 1, 0, 1}));  // blocks may interleave atoms
  CHECK_THROWS_AS(SigmaAlgebra({0, 0, 2, 2}), InputError);  // label 1 skipped
  CHECK_THROWS_AS(SigmaAlgebra({0, -1, 0, 0}), InputError);
  CHECK_THROWS_AS(SigmaAlgebra({}), InputError);

  const SigmaAlgebra F = twoBlocks();
  CHECK(F.blocks() == 2);
  CHECK(F.members(1) == std::vector<int>{2, 3});
  CHECK(SigmaAlgebra::trivial(4).blocks() == 1);
  CHECK(SigmaAlgebra::finest(4).blocks() == 4);
  CHECK(SigmaAlgebra::finest(4).refines(F));
  CHECK(F.refines(SigmaAlgebra::trivial(4)));
  CHECK_FALSE(F.refines(SigmaAlgebra::finest(4)));
}

TEST_CASE("conditional expectation matches the frozen block means") {
  // Oracle: block_mean -> [1.5, 3.5] for x=(1,2,3,4), uniform, blocks {0,1},{2,3}.
  const RandVar e = condExpect(uniform4(), twoBlocks(), vec({1, 2, 3, 4}));
  CHECK(e[0] == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(e[1] == doctest::Approx(1.5).epsilon(1e-15));
  CHECK(e[2] == doctest::Approx(3.5).epsilon(1e-15));
  CHECK(e[3] == doctest::Approx(3.5).epsilon(1e-15));
}

TEST_CASE("conditional expectation: tower and total-mass properties") {
  Rng rng(91);
  for (int t = 0; t < 50; ++t) {
    const FiniteProbSpace space = randomSpace(rng, 8);
    const SigmaAlgebra G = randomAlgebra(rng, 8, 4);
    const RandVar x = randomVector(rng, 8);
    const RandVar ex = condExpect(space, G, x);
    CHECK(isMeasurable(ex, G, kTolLinear));
    // E over the trivial algebra reproduces the plain expectation.
    const RandVar tot = condExpect(space, SigmaAlgebra::trivial(8), x);
    const double direct = (space.probs() * x).sum();
    CHECK(std::abs(tot[0] - direct) <= kTolLinear);
    // Tower: conditioning the G-average down to the trivial algebra changes nothing.
    const RandVar towered = condExpect(space, SigmaAlgebra::trivial(8), ex);
    CHECK(std::abs(towered[0] - direct) <= kTolLinear);
  }
  CHECK_THROWS_AS(condExpect(uniform4(), twoBlocks(), vec({1, kInf, 0, 0})), InputError);
}

TEST_CASE("extended arithmetic conventions") {
  CHECK(extMul(0.0, kInf) == 0.0);
  CHECK(extMul(0.0, -kInf) == 0.0);
  CHECK(extMul(2.0, kInf) == kInf);
  CHECK(extAdd(kInf, -5.0) == kInf);
  CHECK(extAdd(-kInf, 5.0) == -kInf);
  CHECK(extAdd(3.0, 4.0) == 7.0);

  Indicator a = emptyIndicator(3);
  a.in[0] = true;
  const RandVar masked = indicatorTimes(a, vec({2.0, kInf, -kInf}));
  CHECK(masked[0] == 2.0);
  CHECK(masked[1] == 0.0);  // indicator wins against +inf off the set
  CHECK(masked[2] == 0.0);
}

TEST_CASE("indicators and measurability") {
  const SigmaAlgebra F = twoBlocks();
  const Indicator blockA = unionOfBlocks(F, {0});
  CHECK(blockA.count() == 2);
  CHECK(isMeasurable(blockA, F));
  CHECK(complement(blockA).count() == 2);

  Indicator lopsided = emptyIndicator(4);
  lopsided.in[0] = true;  // half of block 0
  CHECK_FALSE(isMeasurable(lopsided, F));

  CHECK(isMeasurable(vec({1, 1, 2, 2}), F));
  CHECK_FALSE(isMeasurable(vec({1, 2, 2, 2}), F));
  CHECK_THROWS_AS(requireMeasurable(vec({1, 2, 2, 2}), F, "test input"), InputError);
}

TEST_CASE("block slice and assign round-trip") {
  const SigmaAlgebra F = twoBlocks();
  RandVar x = vec({1, 2, 3, 4});
  const Eigen::ArrayXd b1 = blockSlice(x, F, 1);
  CHECK(b1.size() == 2);
  CHECK(b1[0] == 3.0);
  blockAssign(x, F, 1, vec({7, 8}));
  CHECK(x[2] == 7.0);
  CHECK(x[3] == 8.0);
  CHECK(x[0] == 1.0);
}

TEST_CASE("essExtremum and concatenate") {
  const std::vector<RandVar> fam{vec({1, 5, 2, 0}), vec({3, 0, 2, 4})};
  const RandVar hi = essExtremum(fam, Extremum::Sup);
  const RandVar lo = essExtremum(fam, Extremum::Inf);
  CHECK(hi[0] == 3.0);
  CHECK(hi[1] == 5.0);
  CHECK(lo[3] == 0.0);
  CHECK_THROWS_AS(essExtremum({}, Extremum::Sup), InputError);

  const SigmaAlgebra F = twoBlocks();
  const FPartition parts({unionOfBlocks(F, {0}), unionOfBlocks(F, {1})}, F);
  const RandVar glued = concatenate(parts, {vec({1, 1, 9, 9}), vec({9, 9, 2, 2})});
  CHECK(glued[0] == 1.0);
  CHECK(glued[3] == 2.0);
}

TEST_CASE("FPartition validates its parts") {
  const SigmaAlgebra F = twoBlocks();
  Indicator half = emptyIndicator(4);
  half.in[0] = true;
  // Non-measurable part.
  CHECK_THROWS_AS(FPartition({half, complement(half)}, F), InputError);
  // Overlap: block 0 covered twice.
  CHECK_THROWS_AS(FPartition({unionOfBlocks(F, {0}), fullIndicator(4)}, F), InputError);
  // Gap: block 1 never covered.
  CHECK_THROWS_AS(FPartition({unionOfBlocks(F, {0})}, F), InputError);
}

TEST_CASE("concatenation hull enumerates exactly the gluings") {
  // Oracle: hull of {0000, 1111} over 2 blocks has the four elements
  // (0,0,0,0), (0,0,1,1), (1,1,0,0), (1,1,1,1).
  const SigmaAlgebra F = twoBlocks();
  const std::vector<RandVar> gens{vec({0, 0, 0, 0}), vec({1, 1, 1, 1})};
  const std::vector<RandVar> hull = hccHull(gens, F);
  CHECK(hull.size() == 4);
  CHECK(hccHullContains(gens, F, vec({1, 1, 0, 0})));
  CHECK(hccHullContains(gens, F, vec({0, 0, 1, 1})));
  CHECK_FALSE(hccHullContains(gens, F, vec({1, 0, 0, 0})));  // splits block 0
  CHECK_FALSE(hccHullContains(gens, F, vec({2, 2, 0, 0})));  // not a generator restriction

  // Budget: 3 generators on 4 singleton blocks would enumerate 81 gluings.
  const SigmaAlgebra fine = SigmaAlgebra::finest(4);
  const std::vector<RandVar> three{vec({0, 0, 0, 0}), vec({1, 1, 1, 1}), vec({2, 2, 2, 2})};
  CHECK_THROWS_AS(hccHull(three, fine, 10), BudgetError);
  CHECK(hccHull(three, fine, 81).size() == 81);
}

TEST_CASE("locality verdicts") {
  const FiniteProbSpace space = uniform4();
  const SigmaAlgebra F = twoBlocks();
  const VectorOracle condMean = [&](const RandVar& x) { return condExpect(space, F, x); };

  Rng rng(17);
  std::vector<std::pair<RandVar, Indicator>> samples;
  for (int i = 0; i < 40; ++i) {
    samples.emplace_back(randomVector(rng, 4),
                         unionOfBlocks(F, {std::uniform_int_distribution<int>(0, 1)(rng)}));
  }
  CHECK(isLocal(condMean, samples).pass);

  // A global mean sees across blocks, so masking the input changes it.
  const VectorOracle peek = [&](const RandVar& x) {
    return RandVar::Constant(4, (space.probs() * x).sum());
  };
  const LocalityVerdict bad = isLocal(peek, samples);
  CHECK_FALSE(bad.pass);
  CHECK(bad.sample >= 0);
  CHECK(bad.atom >= 0);
  CHECK(std::abs(bad.lhs - bad.rhs) > 1e-9);
}

TEST_CASE("local sup over generators equals sup over the hull") {
  // Oracle: f=cond_expect, G={(0,0,4,4),(2,2,0,0)} -> both sups are (2,2,4,4).
  const FiniteProbSpace space = uniform4();
  const SigmaAlgebra F = twoBlocks();
  const VectorOracle condMean = [&](const RandVar& x) { return condExpect(space, F, x); };
  const std::vector<RandVar> gens{vec({0, 0, 4, 4}), vec({2, 2, 0, 0})};

  CHECK(localSupReduction(condMean, gens, F).pass);
  const RandVar supG = essExtremum({condMean(gens[0]), condMean(gens[1])}, Extremum::Sup);
  CHECK(supG[0] == doctest::Approx(2.0));
  CHECK(supG[2] == doctest::Approx(4.0));

  const VectorOracle peek = [&](const RandVar& x) {
    return RandVar::Constant(4, (space.probs() * x).sum());
  };
  CHECK_FALSE(localSupReduction(peek, gens, F).pass);
}

}  // TEST_SUITE
