#include "rca/risk.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "rca/errors.hpp"
#include "rca/sampling.hpp"
#include "rca/stratified.hpp"
#include "rca/tolerances.hpp"

namespace rca {

std::string familyName(RiskFamily family) {
  switch (family) {
    case RiskFamily::NegCondExpect:
      return "neg_cond_expect";
    case RiskFamily::Entropic:
      return "entropic";
    case RiskFamily::Avar:
      return "avar";
    case RiskFamily::WorstCase:
      return "worst_case";
    case RiskFamily::ScenarioRobust:
      return "scenario_robust";
    case RiskFamily::NegSqCondExpect:
      return "neg_sq_cond_expect";
    case RiskFamily::MeanControl:
      return "mean_control";
  }
  throw InputError("familyName: unknown family");
}

RiskFamily familyFromName(const std::string& name) {
  if (name == "neg_cond_expect") return RiskFamily::NegCondExpect;
  if (name == "entropic") return RiskFamily::Entropic;
  if (name == "avar") return RiskFamily::Avar;
  if (name == "worst_case") return RiskFamily::WorstCase;
  if (name == "scenario_robust") return RiskFamily::ScenarioRobust;
  if (name == "neg_sq_cond_expect") return RiskFamily::NegSqCondExpect;
  if (name == "mean_control") return RiskFamily::MeanControl;
  throw InputError("unknown risk family: " + name);
}

bool isDualFeasible(const FiniteProbSpace& space, const SigmaAlgebra& F, const RandVar& y,
                    double tol) {
  if (y.size() != F.atoms() || !y.isFinite().all()) return false;
  if ((y > tol).any()) return false;
  const RandVar mean = condExpect(space, F, y);
  return ((mean + 1.0).abs() <= tol).all();
}

void validateRiskSpec(const FiniteProbSpace& space, const SigmaAlgebra& F,
                      const RiskSpec& spec) {
  switch (spec.family) {
    case RiskFamily::Entropic:
      if (!(spec.beta > 0)) throw InputError("entropic: beta must be positive");
      break;
    case RiskFamily::Avar:
      if (spec.lambda.size() != F.atoms()) throw InputError("avar: lambda length mismatch");
      requireMeasurable(spec.lambda, F, "avar lambda");
      if ((spec.lambda <= 0).any() || (spec.lambda > 1).any())
        throw InputError("avar: lambda must lie in (0,1] per block");
      break;
    case RiskFamily::ScenarioRobust:
      if (spec.densities.empty()) throw InputError("scenario_robust: empty density set");
      for (const RandVar& y : spec.densities)
        if (!isDualFeasible(space, F, y))
          throw InputError("scenario_robust: density is not dual feasible");
      break;
    default:
      break;
  }
}

namespace {

// Per-block log of E[e^{-beta x}|F], shifted by the block max so the
// exponentials stay bounded by 1.
double blockLogMgf(const Eigen::ArrayXd& wb, const Eigen::ArrayXd& xb, double beta) {
  const Eigen::ArrayXd e = -beta * xb;
  const double shift = e.maxCoeff();
  return shift + std::log((wb * (e - shift).exp()).sum());
}

// Greedy fill for the avar polytope sup: capacity 1/lambda per atom, unit
// conditional mass, cheapest outcomes first, ties by ascending atom index.
Eigen::ArrayXd avarFillBlock(const Eigen::ArrayXd& wb, const Eigen::ArrayXd& xb, double lambda) {
  const Eigen::Index d = xb.size();
  std::vector<Eigen::Index> order(d);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&xb](Eigen::Index a, Eigen::Index b) { return xb[a] < xb[b]; });
  Eigen::ArrayXd yprime = Eigen::ArrayXd::Zero(d);
  const double cap = 1.0 / lambda;
  double budget = 1.0;
  for (const Eigen::Index i : order) {
    if (budget <= 0.0) break;
    const double take = std::min(cap, budget / wb[i]);
    yprime[i] = take;
    budget -= take * wb[i];
  }
  return yprime;
}

}  // namespace

RandVar riskEvaluate(const FiniteProbSpace& space, const SigmaAlgebra& F, const RiskSpec& spec,
                     const RandVar& x) {
  if (x.size() != F.atoms()) throw InputError("riskEvaluate: length mismatch");
  if (!x.isFinite().all()) throw InputError("riskEvaluate: vector must be finite");
  validateRiskSpec(space, F, spec);
  const RandVar w = condWeights(space, F);
  RandVar out(F.atoms());
  switch (spec.family) {
    case RiskFamily::NegCondExpect:
      return -condExpect(space, F, x);
    case RiskFamily::Entropic: {
      for (int b = 0; b < F.blocks(); ++b) {
        const double v =
            blockLogMgf(blockSlice(w, F, b), blockSlice(x, F, b), spec.beta) / spec.beta;
        for (int a : F.members(b)) out[a] = v;
      }
      return out;
    }
    case RiskFamily::Avar: {
      for (int b = 0; b < F.blocks(); ++b) {
        const Eigen::ArrayXd wb = blockSlice(w, F, b);
        const Eigen::ArrayXd xb = blockSlice(x, F, b);
        const Eigen::ArrayXd yp = avarFillBlock(wb, xb, spec.lambda[F.members(b).front()]);
        const double v = (wb * (-xb) * yp).sum();
        for (int a : F.members(b)) out[a] = v;
      }
      return out;
    }
    case RiskFamily::WorstCase: {
      for (int b = 0; b < F.blocks(); ++b) {
        double m = -kInf;
        for (int a : F.members(b)) m = std::max(m, -x[a]);
        for (int a : F.members(b)) out[a] = m;
      }
      return out;
    }
    case RiskFamily::ScenarioRobust: {
      for (int b = 0; b < F.blocks(); ++b) {
        double best = -kInf;
        for (const RandVar& y : spec.densities) {
          const Eigen::ArrayXd wb = blockSlice(w, F, b);
          const double v = (wb * blockSlice(x, F, b) * blockSlice(y, F, b)).sum();
          best = std::max(best, v);
        }
        for (int a : F.members(b)) out[a] = best;
      }
      return out;
    }
    case RiskFamily::NegSqCondExpect: {
      const RandVar m = condExpect(space, F, x);
      return -(m * m);
    }
    case RiskFamily::MeanControl: {
      const double m = (space.probs() * x).sum();
      return RandVar::Constant(F.atoms(), m);
    }
  }
  throw InputError("riskEvaluate: unknown family");
}

RandVar riskMaximizerDensity(const FiniteProbSpace& space, const SigmaAlgebra& F,
                             const RiskSpec& spec, const RandVar& x) {
  if (x.size() != F.atoms()) throw InputError("riskMaximizerDensity: length mismatch");
  validateRiskSpec(space, F, spec);
  const RandVar w = condWeights(space, F);
  RandVar y(F.atoms());
  switch (spec.family) {
    case RiskFamily::NegCondExpect:
      return RandVar::Constant(F.atoms(), -1.0);
    case RiskFamily::Entropic: {
      for (int b = 0; b < F.blocks(); ++b) {
        const Eigen::ArrayXd wb = blockSlice(w, F, b);
        const Eigen::ArrayXd e = -spec.beta * blockSlice(x, F, b);
        const double shift = e.maxCoeff();
        const Eigen::ArrayXd num = (e - shift).exp();
        const double den = (wb * num).sum();
        blockAssign(y, F, b, -(num / den));
      }
      return y;
    }
    case RiskFamily::Avar: {
      for (int b = 0; b < F.blocks(); ++b) {
        const Eigen::ArrayXd wb = blockSlice(w, F, b);
        const Eigen::ArrayXd xb = blockSlice(x, F, b);
        blockAssign(y, F, b, -avarFillBlock(wb, xb, spec.lambda[F.members(b).front()]));
      }
      return y;
    }
    case RiskFamily::WorstCase: {
      y.setZero();
      for (int b = 0; b < F.blocks(); ++b) {
        int argmin = F.members(b).front();
        for (int a : F.members(b))
          if (x[a] < x[argmin]) argmin = a;
        y[argmin] = -1.0 / w[argmin];
      }
      return y;
    }
    case RiskFamily::ScenarioRobust: {
      for (int b = 0; b < F.blocks(); ++b) {
        const Eigen::ArrayXd wb = blockSlice(w, F, b);
        const Eigen::ArrayXd xb = blockSlice(x, F, b);
        double best = -kInf;
        Eigen::ArrayXd pick;
        for (const RandVar& cand : spec.densities) {
          const Eigen::ArrayXd yb = blockSlice(cand, F, b);
          const double v = (wb * xb * yb).sum();
          if (v > best) {
            best = v;
            pick = yb;
          }
        }
        blockAssign(y, F, b, pick);
      }
      return y;
    }
    default:
      throw InputError("riskMaximizerDensity: family has no dual representation");
  }
}

namespace {

struct WorstRow {
  double gap = -kInf;
  Witness w;
  void offer(int atom, int block, double lhs, double rhs, const std::string& note) {
    if (lhs - rhs > gap) {
      gap = lhs - rhs;
      w = makeWitness(atom, block, lhs, rhs, note);
    }
  }
};

Indicator randomBlockUnion(Rng& rng, const SigmaAlgebra& F) {
  std::bernoulli_distribution coin(0.5);
  Mask in = Mask::Constant(F.atoms(), false);
  for (int b = 0; b < F.blocks(); ++b)
    if (coin(rng))
      for (int a : F.members(b)) in[a] = true;
  return Indicator{in};
}

}  // namespace

Report riskAxiomCheck(const FiniteProbSpace& space, const SigmaAlgebra& F, const RiskSpec& spec,
                      int trials, std::uint64_t seed) {
  if (trials < 1) throw InputError("riskAxiomCheck: trials must be >= 1");
  validateRiskSpec(space, F, spec);
  Rng rng(seed);
  const int n = F.atoms();
  const std::string fam = familyName(spec.family);
  char ctx[128];
  std::snprintf(ctx, sizeof ctx, "family=%s seed=%llu trials=%d", fam.c_str(),
                static_cast<unsigned long long>(seed), trials);
  const auto f = [&](const RandVar& v) { return riskEvaluate(space, F, spec, v); };

  WorstRow mono, cash, local, l0conv, scalarConv;
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int t = 0; t < trials; ++t) {
    const std::string note = "trial " + std::to_string(t);
    const RandVar x = randomVector(rng, n);
    const RandVar y = randomVector(rng, n);
    const RandVar bump = randomVector(rng, n, 0.0, 2.0);
    const RandVar m = randomMeasurable(rng, F);
    const RandVar xi = randomMeasurable(rng, F, 0.0, 1.0);
    const double tscalar = unit(rng);
    const Indicator A = randomBlockUnion(rng, F);

    const RandVar fx = f(x);
    const RandVar fy = f(y);

    const RandVar fUp = f(x + bump);
    for (int a = 0; a < n; ++a) mono.offer(a, F.blockOf(a), fUp[a], fx[a], note);

    const RandVar fCash = f(x + m);
    for (int a = 0; a < n; ++a)
      cash.offer(a, F.blockOf(a), std::abs(fCash[a] - (fx[a] - m[a])), 0.0, note);

    const RandVar lhsL = indicatorTimes(A, fx);
    const RandVar rhsL = indicatorTimes(A, f(indicatorTimes(A, x)));
    for (int a = 0; a < n; ++a)
      local.offer(a, F.blockOf(a), std::abs(lhsL[a] - rhsL[a]), 0.0, note);

    const RandVar fMixL0 = f(xi * x + (1.0 - xi) * y);
    const RandVar bound = xi * fx + (1.0 - xi) * fy;
    for (int a = 0; a < n; ++a) l0conv.offer(a, F.blockOf(a), fMixL0[a], bound[a], note);

    const RandVar fMixS = f(tscalar * x + (1.0 - tscalar) * y);
    for (int a = 0; a < n; ++a)
      scalarConv.offer(a, F.blockOf(a), fMixS[a], tscalar * fx[a] + (1.0 - tscalar) * fy[a],
                       note);
  }

  Report rep;
  const auto push = [&](const std::string& id, const char* anchor, const WorstRow& row) {
    const bool ok = row.gap <= kTolOracle;
    CheckRecord rec;
    rec.id = "risk/" + fam + "/" + id;
    rec.anchor = anchor;
    rec.context = ctx;
    rec.pass = ok;
    rec.witnesses.push_back(row.w);
    rep.records.push_back(std::move(rec));
    return ok;
  };
  push("monotone", "Def 4.15", mono);
  push("cash", "Def 4.15", cash);
  const bool localPass = push("local", "Def 4.2", local);
  const bool l0Pass = push("l0-convex", "Def 4.26", l0conv);
  const bool scalarPass = scalarConv.gap <= kTolOracle;

  // Proposition 4.3(2): L0-convexity must coincide with plain convexity plus
  // locality. The two routes are computed independently above.
  CheckRecord cross;
  cross.id = "risk/" + fam + "/prop43-crosscheck";
  cross.anchor = "Prop 4.3";
  cross.context = ctx;
  cross.pass = l0Pass == (scalarPass && localPass);
  cross.witnesses.push_back(makeWitness(-1, -1, l0Pass ? 1.0 : 0.0,
                                        (scalarPass && localPass) ? 1.0 : 0.0,
                                        "lhs: direct L0-convex verdict, rhs: convex and local"));
  rep.records.push_back(std::move(cross));
  return rep;
}

Report riskOrderingCheck(const FiniteProbSpace& space, const SigmaAlgebra& F, int trials,
                         std::uint64_t seed) {
  if (trials < 1) throw InputError("riskOrderingCheck: trials must be >= 1");
  Rng rng(seed);
  const int n = F.atoms();
  char ctx[96];
  std::snprintf(ctx, sizeof ctx, "seed=%llu trials=%d", static_cast<unsigned long long>(seed),
                trials);

  RiskSpec negSpec;
  negSpec.family = RiskFamily::NegCondExpect;
  RiskSpec entSpec;
  entSpec.family = RiskFamily::Entropic;
  RiskSpec worstSpec;
  worstSpec.family = RiskFamily::WorstCase;
  RiskSpec avarOne;
  avarOne.family = RiskFamily::Avar;
  avarOne.lambda = RandVar::Constant(n, 1.0);

  WorstRow chain, avarEq, betaMono;
  for (int t = 0; t < trials; ++t) {
    const std::string note = "trial " + std::to_string(t);
    const RandVar x = randomVector(rng, n);
    const RandVar lo = riskEvaluate(space, F, negSpec, x);
    entSpec.beta = 1.0;
    const RandVar mid = riskEvaluate(space, F, entSpec, x);
    const RandVar hi = riskEvaluate(space, F, worstSpec, x);
    for (int a = 0; a < n; ++a) {
      chain.offer(a, F.blockOf(a), lo[a], mid[a], note);
      chain.offer(a, F.blockOf(a), mid[a], hi[a], note);
    }
    const RandVar av = riskEvaluate(space, F, avarOne, x);
    for (int a = 0; a < n; ++a)
      avarEq.offer(a, F.blockOf(a), std::abs(av[a] - lo[a]), 0.0, note);
    entSpec.beta = 0.5;
    const RandVar eHalf = riskEvaluate(space, F, entSpec, x);
    entSpec.beta = 2.0;
    const RandVar eTwo = riskEvaluate(space, F, entSpec, x);
    for (int a = 0; a < n; ++a) {
      betaMono.offer(a, F.blockOf(a), eHalf[a], mid[a], note);
      betaMono.offer(a, F.blockOf(a), mid[a], eTwo[a], note);
    }
  }

  Report rep;
  const auto push = [&](const char* id, const WorstRow& row, double tol) {
    CheckRecord rec;
    rec.id = id;
    rec.anchor = "Def 4.15";
    rec.context = ctx;
    rec.pass = row.gap <= tol;
    rec.witnesses.push_back(row.w);
    rep.records.push_back(std::move(rec));
  };
  push("risk/order/neg-entropic-worst", chain, kTolOracle);
  push("risk/order/avar-lambda-one", avarEq, kTolLinear);
  push("risk/order/entropic-beta-monotone", betaMono, kTolOracle);
  return rep;
}

}  // namespace rca
