#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "rca/space.hpp"

namespace rca {

// Extended-real conventions used everywhere in this library:
//   0 * (+-inf) = 0,   +inf + anything = +inf,   -inf + finite = -inf.
// They make indicator multiplication and stratified sums of extended values
// well defined.
double extMul(double a, double b);
double extAdd(double a, double b);
RandVar extMul(const RandVar& x, const RandVar& y);
RandVar extAdd(const RandVar& x, const RandVar& y);

// Indicator times value; exactly zero off the set even when the value is
// +-inf there.
RandVar indicatorTimes(const Indicator& a, const RandVar& x);

// E[x|F]: per-block probability-weighted mean, broadcast back to the atoms.
// Rejects non-finite entries.
RandVar condExpect(const FiniteProbSpace& space, const SigmaAlgebra& F, const RandVar& x);

enum class Extremum { Sup, Inf };

// Per-atom sup (resp. inf) over a nonempty family.
RandVar essExtremum(const std::vector<RandVar>& family, Extremum mode);

// Glue pieces along indicators forming a partition: the result agrees with
// the n-th piece on the n-th part.
RandVar concatenate(const std::vector<std::pair<Indicator, RandVar>>& parts);
RandVar concatenate(const FPartition& partition, const std::vector<RandVar>& pieces);

using VectorOracle = std::function<RandVar(const RandVar&)>;

// All gluings of the generators along F-partitions, deduplicated. With m
// generators and k blocks there are at most m^k of them; counts above
// maxElements raise a budget error.
std::vector<RandVar> hccHull(const std::vector<RandVar>& gens, const SigmaAlgebra& F,
                             std::size_t maxElements = 1000000);

// Block-by-block membership: x is a gluing of the generators iff every block
// restriction of x matches some generator's restriction.
bool hccHullContains(const std::vector<RandVar>& gens, const SigmaAlgebra& F, const RandVar& x,
                     double tol = 0.0);

struct LocalityVerdict {
    bool pass = true;
    int sample = -1;  // index of the offending sample (or hull element)
    int atom = -1;
    double lhs = 0.0;
    double rhs = 0.0;
};

// Checks I_A f(x) = I_A f(I_A x) atomwise on the given (x, A) samples.
LocalityVerdict isLocal(const VectorOracle& f,
                        const std::vector<std::pair<RandVar, Indicator>>& samples,
                        double tol = 1e-9);

// For a local f: the per-atom sup of f over the generators equals the sup
// over the whole concatenation hull.
LocalityVerdict localSupReduction(const VectorOracle& f, const std::vector<RandVar>& gens,
                                  const SigmaAlgebra& F, double tol = 1e-9);

}  // namespace rca
