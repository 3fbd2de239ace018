#include "rca/stratified.hpp"

#include <algorithm>
#include <cmath>

#include "rca/tolerances.hpp"

namespace rca {

double extMul(double a, double b) {
    if (a == 0.0 || b == 0.0) return 0.0;
    return a * b;
}

double extAdd(double a, double b) {
    if (a == kInf || b == kInf) return kInf;
    return a + b;  // -inf + finite and -inf + -inf fall through correctly
}

RandVar extMul(const RandVar& x, const RandVar& y) {
    RandVar out(x.size());
    for (int i = 0; i < x.size(); ++i) out[i] = extMul(x[i], y[i]);
    return out;
}

RandVar extAdd(const RandVar& x, const RandVar& y) {
    RandVar out(x.size());
    for (int i = 0; i < x.size(); ++i) out[i] = extAdd(x[i], y[i]);
    return out;
}

RandVar indicatorTimes(const Indicator& a, const RandVar& x) {
    RandVar out = RandVar::Zero(x.size());
    for (int i = 0; i < x.size(); ++i)
        if (a.in[i]) out[i] = x[i];
    return out;
}

RandVar condExpect(const FiniteProbSpace& space, const SigmaAlgebra& F, const RandVar& x) {
    if (x.size() != space.atoms()) throw InputError("vector length does not match space");
    if (F.atoms() != space.atoms()) throw InputError("algebra does not match space");
    if (!x.isFinite().all()) throw InputError("conditional expectation needs finite values");
    RandVar out(space.atoms());
    for (int b = 0; b < F.blocks(); ++b) {
        double mass = 0.0, acc = 0.0;
        for (int atom : F.members(b)) {
            mass += space.prob(atom);
            acc += space.prob(atom) * x[atom];
        }
        double v = acc / mass;
        for (int atom : F.members(b)) out[atom] = v;
    }
    return out;
}

RandVar essExtremum(const std::vector<RandVar>& family, Extremum mode) {
    if (family.empty()) throw InputError("extremum of an empty family");
    RandVar out = family.front();
    for (std::size_t i = 1; i < family.size(); ++i) {
        if (family[i].size() != out.size()) throw InputError("family members on different spaces");
        if (mode == Extremum::Sup)
            out = out.max(family[i]);
        else
            out = out.min(family[i]);
    }
    return out;
}

RandVar concatenate(const std::vector<std::pair<Indicator, RandVar>>& parts) {
    if (parts.empty()) throw InputError("nothing to concatenate");
    const int n = parts.front().first.atoms();
    std::vector<int> hits(n, 0);
    RandVar out(n);
    for (const auto& [ind, piece] : parts) {
        if (ind.atoms() != n || piece.size() != n)
            throw InputError("concatenation part has wrong length");
        for (int atom = 0; atom < n; ++atom) {
            if (!ind.in[atom]) continue;
            if (hits[atom]++) throw InputError("overlapping indicators at atom " + std::to_string(atom));
            out[atom] = piece[atom];
        }
    }
    for (int atom = 0; atom < n; ++atom)
        if (!hits[atom]) throw InputError("indicators do not cover atom " + std::to_string(atom));
    return out;
}

RandVar concatenate(const FPartition& partition, const std::vector<RandVar>& pieces) {
    if (pieces.size() != partition.size())
        throw InputError("piece count does not match partition");
    std::vector<std::pair<Indicator, RandVar>> parts;
    parts.reserve(pieces.size());
    for (std::size_t i = 0; i < pieces.size(); ++i)
        parts.emplace_back(partition.part(i), pieces[i]);
    return concatenate(parts);
}

namespace {

bool lexLess(const RandVar& a, const RandVar& b) {
    for (int i = 0; i < a.size(); ++i) {
        if (a[i] < b[i]) return true;
        if (a[i] > b[i]) return false;
    }
    return false;
}

}  // namespace

std::vector<RandVar> hccHull(const std::vector<RandVar>& gens, const SigmaAlgebra& F,
                             std::size_t maxElements) {
    if (gens.empty()) throw InputError("hull of an empty generator set");
    const std::size_t m = gens.size();
    const int k = F.blocks();
    double count = std::pow(static_cast<double>(m), k);
    if (count > static_cast<double>(maxElements))
        throw BudgetError("hull enumeration overflow: " + std::to_string(m) + "^" +
                          std::to_string(k) + " gluings exceed the cap");

    std::vector<RandVar> out;
    out.reserve(static_cast<std::size_t>(count));
    std::vector<std::size_t> choice(k, 0);  // generator picked per block
    while (true) {
        RandVar glued(F.atoms());
        for (int atom = 0; atom < F.atoms(); ++atom) glued[atom] = gens[choice[F.blockOf(atom)]][atom];
        out.push_back(std::move(glued));
        int b = 0;
        while (b < k && ++choice[b] == m) choice[b++] = 0;
        if (b == k) break;
    }
    std::sort(out.begin(), out.end(), lexLess);
    out.erase(std::unique(out.begin(), out.end(),
                          [](const RandVar& a, const RandVar& b) { return (a == b).all(); }),
              out.end());
    return out;
}

bool hccHullContains(const std::vector<RandVar>& gens, const SigmaAlgebra& F, const RandVar& x,
                     double tol) {
    if (gens.empty()) throw InputError("hull of an empty generator set");
    for (int b = 0; b < F.blocks(); ++b) {
        bool matched = false;
        for (const RandVar& g : gens) {
            bool ok = true;
            for (int atom : F.members(b)) {
                if (std::abs(x[atom] - g[atom]) > tol && x[atom] != g[atom]) {
                    ok = false;
                    break;
                }
            }
            if (ok) {
                matched = true;
                break;
            }
        }
        if (!matched) return false;
    }
    return true;
}

LocalityVerdict isLocal(const VectorOracle& f,
                        const std::vector<std::pair<RandVar, Indicator>>& samples, double tol) {
    LocalityVerdict v;
    for (std::size_t s = 0; s < samples.size(); ++s) {
        const auto& [x, a] = samples[s];
        RandVar lhs = f(x);
        RandVar rhs = f(indicatorTimes(a, x));
        for (int atom = 0; atom < x.size(); ++atom) {
            if (!a.in[atom]) continue;
            bool same = lhs[atom] == rhs[atom] || std::abs(lhs[atom] - rhs[atom]) <= tol;
            if (!same) {
                v.pass = false;
                v.sample = static_cast<int>(s);
                v.atom = atom;
                v.lhs = lhs[atom];
                v.rhs = rhs[atom];
                return v;
            }
        }
    }
    return v;
}

LocalityVerdict localSupReduction(const VectorOracle& f, const std::vector<RandVar>& gens,
                                  const SigmaAlgebra& F, double tol) {
    std::vector<RandVar> overGens;
    overGens.reserve(gens.size());
    for (const RandVar& g : gens) overGens.push_back(f(g));
    RandVar supGens = essExtremum(overGens, Extremum::Sup);

    std::vector<RandVar> overHull;
    for (const RandVar& h : hccHull(gens, F)) overHull.push_back(f(h));
    RandVar supHull = essExtremum(overHull, Extremum::Sup);

    LocalityVerdict v;
    for (int atom = 0; atom < supGens.size(); ++atom) {
        bool same = supGens[atom] == supHull[atom] ||
                    std::abs(supGens[atom] - supHull[atom]) <= tol;
        if (!same) {
            v.pass = false;
            v.atom = atom;
            v.lhs = supGens[atom];
            v.rhs = supHull[atom];
            return v;
        }
    }
    return v;
}

}  // namespace rca
