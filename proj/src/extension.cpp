#include "rca/extension.hpp"

#include <cmath>
#include <cstdio>
#include <string>
#include <utility>
#include <vector>

#include "rca/cond_norm.hpp"
#include "rca/errors.hpp"
#include "rca/stratified.hpp"
#include "rca/tolerances.hpp"

namespace rca {
namespace {

struct WorstRow {
  double gap = -kInf;
  Witness w;
  void offer(int atom, int block, double lhs, double rhs, const std::string& note) {
    const double g = lhs - rhs;
    if (g > gap) {
      gap = g;
      w = makeWitness(atom, block, lhs, rhs, note);
    }
  }
};

int partIndexOf(const FPartition& partition, int atom) {
  for (std::size_t i = 0; i < partition.size(); ++i)
    if (partition.part(i)[atom]) return static_cast<int>(i);
  return -1;
}

}  // namespace

CanonicalRep makeRep(FPartition partition, std::vector<RandVar> pieces) {
  if (partition.size() != pieces.size())
    throw InputError("makeRep: one piece per part required");
  const int atoms = partition.part(0).atoms();
  for (const RandVar& p : pieces)
    if (p.size() != atoms) throw InputError("makeRep: piece length mismatch");
  return CanonicalRep{std::move(partition), std::move(pieces)};
}

RandVar glueRep(const CanonicalRep& rep) { return concatenate(rep.partition, rep.pieces); }

CanonicalRep randomRepOf(Rng& rng, const SigmaAlgebra& F, const RandVar& x, int maxParts) {
  if (x.size() != F.atoms()) throw InputError("randomRepOf: length mismatch");
  FPartition partition = randomPartition(rng, F, maxParts);
  std::vector<RandVar> pieces;
  pieces.reserve(partition.size());
  for (std::size_t i = 0; i < partition.size(); ++i) {
    RandVar piece = randomVector(rng, F.atoms());
    for (int a = 0; a < F.atoms(); ++a)
      if (partition.part(i)[a]) piece[a] = x[a];
    pieces.push_back(std::move(piece));
  }
  return CanonicalRep{std::move(partition), std::move(pieces)};
}

RandVar extendEval(const LocalOracle& f, const CanonicalRep& rep) {
  if (!f) throw InputError("extendEval: oracle is empty");
  const int atoms = rep.partition.part(0).atoms();
  RandVar out = RandVar::Zero(atoms);
  for (std::size_t i = 0; i < rep.partition.size(); ++i) {
    const RandVar fx = f(rep.pieces[i]);
    if (fx.size() != atoms) throw InputError("extendEval: oracle returned wrong length");
    out = extAdd(out, indicatorTimes(rep.partition.part(i), fx));
  }
  return out;
}

Report representationIndependenceCheck(const FiniteProbSpace& space, const SigmaAlgebra& F,
                                       const LocalOracle& f,
                                       const std::vector<CanonicalRep>& reps) {
  (void)space;
  if (reps.empty()) throw InputError("representationIndependenceCheck: no representations");
  const RandVar target = glueRep(reps[0]);
  for (const CanonicalRep& rep : reps)
    if ((glueRep(rep) != target).any())
      throw InputError("representationIndependenceCheck: representations glue to different points");

  const RandVar base = extendEval(f, reps[0]);
  WorstRow row;
  for (std::size_t i = 1; i < reps.size(); ++i) {
    const RandVar other = extendEval(f, reps[i]);
    for (int a = 0; a < F.atoms(); ++a) {
      const double diff = std::abs(other[a] - base[a]);
      if (diff > row.gap) {
        char note[96];
        std::snprintf(note, sizeof note, "rep %d cell A%d\xe2\x88\xa9" "B%d", static_cast<int>(i),
                      partIndexOf(reps[0].partition, a), partIndexOf(reps[i].partition, a));
        row.offer(a, F.blockOf(a), diff, 0.0, note);
      }
    }
  }

  Report rep;
  CheckRecord rec;
  rec.id = "extension/representation-independence";
  rec.anchor = "Thm 4.28";
  rec.context = "reps=" + std::to_string(reps.size());
  rec.pass = row.gap <= kTolLinear;
  rec.witnesses.push_back(row.w);
  rep.records.push_back(std::move(rec));
  return rep;
}

Report linfLipschitzCheck(const FiniteProbSpace& space, const SigmaAlgebra& F,
                          const RiskSpec& spec, int trials, std::uint64_t seed) {
  if (trials < 1) throw InputError("linfLipschitzCheck: trials must be >= 1");
  validateRiskSpec(space, F, spec);
  {
    const Report ax = riskAxiomCheck(space, F, spec, 60, seed ^ 0x9e3779b97f4a7c15ULL);
    for (const CheckRecord& rec : ax.records) {
      const bool needed = rec.id.find("/monotone") != std::string::npos ||
                          rec.id.find("/cash") != std::string::npos;
      if (needed && !rec.pass)
        throw InputError("linfLipschitzCheck: axiom precheck failed at " + rec.id);
    }
  }

  Rng rng(seed);
  const int n = F.atoms();
  const LocalOracle f = [&](const RandVar& v) { return riskEvaluate(space, F, spec, v); };
  char ctx[96];
  std::snprintf(ctx, sizeof ctx, "family=%s trials=%d seed=%llu", familyName(spec.family).c_str(),
                trials, static_cast<unsigned long long>(seed));

  WorstRow lip, unique, tight;
  for (int t = 0; t < trials; ++t) {
    const RandVar x = randomVector(rng, n);
    const bool cashTrial = t % 5 == 2;
    const RandVar y = cashTrial ? RandVar(x + randomMeasurable(rng, F)) : randomVector(rng, n);

    const RandVar fx = extendEval(f, randomRepOf(rng, F, x));
    const RandVar fy = extendEval(f, randomRepOf(rng, F, y));
    const RandVar bound = condNorm(space, F, RandVar(x - y), kInf);
    const std::string note = "trial " + std::to_string(t);
    for (int a = 0; a < n; ++a) {
      lip.offer(a, F.blockOf(a), std::abs(fx[a] - fy[a]), bound[a], note);
      if (cashTrial)
        tight.offer(a, F.blockOf(a), std::abs(std::abs(fx[a] - fy[a]) - bound[a]), 0.0, note);
    }

    const RandVar fx2 = extendEval(f, randomRepOf(rng, F, x));
    for (int a = 0; a < n; ++a)
      unique.offer(a, F.blockOf(a), std::abs(fx2[a] - fx[a]), 0.0, note);
  }

  Report rep;
  const auto push = [&](const char* id, const char* anchor, const WorstRow& row, double tol) {
    CheckRecord rec;
    rec.id = id;
    rec.anchor = anchor;
    rec.context = ctx;
    rec.pass = row.gap <= tol;
    rec.witnesses.push_back(row.w);
    rep.records.push_back(std::move(rec));
  };
  push("extension/linf-lipschitz", "Thm 4.21", lip, kTolOracle);
  push("extension/lipschitz-tight", "Thm 4.21", tight, kTolOracle);
  push("extension/uniqueness", "Lem 3.16", unique, kTolLinear);
  return rep;
}

Report feasibleHullIdentity(const FiniteProbSpace& space, const SigmaAlgebra& F, double q,
                            BoundMode mode, double gamma, int trials, std::uint64_t seed) {
  if (trials < 1) throw InputError("feasibleHullIdentity: trials must be >= 1");
  if (mode != BoundMode::None && !(gamma >= 1.0))
    throw InputError("feasibleHullIdentity: bound must be >= 1 (the constant density has norm 1)");
  if (mode == BoundMode::Lgamma && !(q >= 1.0))
    throw InputError("feasibleHullIdentity: exponent must be >= 1");

  Rng rng(seed);
  const int n = F.atoms();
  const RandVar w = condWeights(space, F);
  char ctx[96];
  std::snprintf(ctx, sizeof ctx, "mode=%d q=%g gamma=%g trials=%d seed=%llu",
                static_cast<int>(mode), q, gamma, trials,
                static_cast<unsigned long long>(seed));

  // Shrink a feasible density toward the constant -1 until it meets the
  // moment bound; the segment stays inside the feasible set.
  const auto bounded = [&]() {
    RandVar y = randomFeasibleDensity(rng, space, F);
    if (mode == BoundMode::None) return y;
    for (int b = 0; b < F.blocks(); ++b) {
      const auto& idx = F.members(b);
      double theta = 1.0;
      if (mode == BoundMode::Linf) {
        double s = 0.0;
        for (int a : idx) s = std::max(s, std::abs(y[a]));
        if (s > gamma) theta = (gamma - 1.0) / (s - 1.0);
      } else {
        const auto moment = [&](double th) {
          double acc = 0.0;
          for (int a : idx) acc += w[a] * std::pow(1.0 - th * (y[a] + 1.0), q);
          return acc;
        };
        const double cap = std::pow(gamma, q);
        if (moment(1.0) > cap) {
          double lo = 0.0, hi = 1.0;
          for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            (moment(mid) <= cap ? lo : hi) = mid;
          }
          theta = lo;
        }
      }
      for (int a : idx) y[a] = -1.0 + theta * (y[a] + 1.0);
    }
    return y;
  };

  WorstRow sign, mean, bound, roundtrip;
  for (int t = 0; t < trials; ++t) {
    const RandVar y1 = bounded();
    const RandVar y2 = bounded();
    const FPartition partition = randomPartition(rng, F);
    std::vector<RandVar> pieces;
    for (std::size_t i = 0; i < partition.size(); ++i) pieces.push_back(i % 2 ? y2 : y1);
    const RandVar glued = concatenate(partition, pieces);
    const std::string note = "trial " + std::to_string(t);

    for (int a = 0; a < n; ++a) sign.offer(a, F.blockOf(a), glued[a], 0.0, note);
    const RandVar m = condExpect(space, F, glued);
    for (int b = 0; b < F.blocks(); ++b) {
      const int a0 = F.members(b)[0];
      mean.offer(a0, b, std::abs(m[a0] + 1.0), 0.0, note);
    }
    if (mode != BoundMode::None) {
      const RandVar nb = mode == BoundMode::Linf
                             ? condNorm(space, F, glued, kInf)
                             : condNorm(space, F, glued, q);
      for (int b = 0; b < F.blocks(); ++b) {
        const int a0 = F.members(b)[0];
        bound.offer(a0, b, nb[a0], gamma, note);
      }
    }

    // Lemma 4.22 at finite scale: a vector is the gluing of its own
    // restrictions along any partition.
    const RandVar x = randomVector(rng, n);
    const CanonicalRep rep = randomRepOf(rng, F, x);
    const RandVar back = glueRep(rep);
    for (int a = 0; a < n; ++a)
      roundtrip.offer(a, F.blockOf(a), std::abs(back[a] - x[a]), 0.0, note);
  }

  Report rep;
  const auto push = [&](const char* id, const char* anchor, const WorstRow& row, double tol) {
    CheckRecord rec;
    rec.id = id;
    rec.anchor = anchor;
    rec.context = ctx;
    rec.pass = row.gap <= tol;
    rec.witnesses.push_back(row.w);
    rep.records.push_back(std::move(rec));
  };
  push("extension/hull/feasible-sign", "Lem 4.24", sign, 0.0);
  push("extension/hull/feasible-mean", "Lem 4.24", mean, kTolLinear);
  if (mode != BoundMode::None)
    push("extension/hull/bound-preserved", "Lem 4.24", bound, kTolOracle);
  push("extension/hull/base-roundtrip", "Lem 4.22", roundtrip, 0.0);
  return rep;
}

Report extensionPreservationCheck(const FiniteProbSpace& space, const SigmaAlgebra& F,
                                  const RiskSpec& spec, int trials, std::uint64_t seed) {
  if (trials < 1) throw InputError("extensionPreservationCheck: trials must be >= 1");
  validateRiskSpec(space, F, spec);
  Rng rng(seed);
  const int n = F.atoms();
  const LocalOracle f = [&](const RandVar& v) { return riskEvaluate(space, F, spec, v); };
  const auto fbar = [&](const RandVar& v) { return extendEval(f, randomRepOf(rng, F, v)); };
  char ctx[96];
  std::snprintf(ctx, sizeof ctx, "family=%s trials=%d seed=%llu", familyName(spec.family).c_str(),
                trials, static_cast<unsigned long long>(seed));

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  WorstRow mono, cash, convex;
  for (int t = 0; t < trials; ++t) {
    const RandVar x = randomVector(rng, n);
    const RandVar y = randomVector(rng, n);
    const std::string note = "trial " + std::to_string(t);

    RandVar up = x;
    for (int a = 0; a < n; ++a) up[a] += 3.0 * unit(rng);
    const RandVar fx = fbar(x);
    const RandVar fup = fbar(up);
    for (int a = 0; a < n; ++a) mono.offer(a, F.blockOf(a), fup[a], fx[a], note);

    const RandVar c = randomMeasurable(rng, F);
    const RandVar shifted = fbar(RandVar(x + c));
    for (int a = 0; a < n; ++a) {
      cash.offer(a, F.blockOf(a), shifted[a], fx[a] - c[a], note);
      cash.offer(a, F.blockOf(a), fx[a] - c[a], shifted[a], note);
    }

    RandVar xi = randomMeasurablePositive(rng, F, 0.0, 1.0);
    const RandVar mix = fbar(RandVar(xi * x + (1.0 - xi) * y));
    const RandVar fy = fbar(y);
    for (int a = 0; a < n; ++a)
      convex.offer(a, F.blockOf(a), mix[a], xi[a] * fx[a] + (1.0 - xi[a]) * fy[a], note);
  }

  Report rep;
  const auto push = [&](const char* id, const WorstRow& row) {
    CheckRecord rec;
    rec.id = id;
    rec.anchor = "Thm 4.28";
    rec.context = ctx;
    rec.pass = row.gap <= kTolOracle;
    rec.witnesses.push_back(row.w);
    rep.records.push_back(std::move(rec));
  };
  push("extension/preserve/monotone", mono);
  push("extension/preserve/cash", cash);
  push("extension/preserve/l0-convex", convex);
  return rep;
}

}  // namespace rca
