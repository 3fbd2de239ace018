#pragma once

#include <random>
#include <vector>

#include "rca/space.hpp"
#include "rca/stratified.hpp"

// Seeded generators for the randomized check suites. Everything here is
// deterministic given the engine state, so a check that reports a failing
// sample can be replayed from its seed.

namespace rca {

using Rng = std::mt19937_64;

inline RandVar randomVector(Rng& rng, int atoms, double lo = -3.0, double hi = 3.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  RandVar x(atoms);
  for (int i = 0; i < atoms; ++i) x[i] = dist(rng);
  return x;
}

inline RandVar randomMeasurable(Rng& rng, const SigmaAlgebra& F, double lo = -3.0,
                                double hi = 3.0) {
  std::uniform_real_distribution<double> dist(lo, hi);
  RandVar x(F.atoms());
  for (int b = 0; b < F.blocks(); ++b) {
    const double v = dist(rng);
    for (int a : F.members(b)) x[a] = v;
  }
  return x;
}

// Positive F-measurable vector, handy as a scaling factor.
inline RandVar randomMeasurablePositive(Rng& rng, const SigmaAlgebra& F, double lo = 0.25,
                                        double hi = 4.0) {
  return randomMeasurable(rng, F, lo, hi);
}

inline FiniteProbSpace randomSpace(Rng& rng, int atoms) {
  std::uniform_real_distribution<double> dist(0.5, 1.5);
  Eigen::ArrayXd p(atoms);
  for (int i = 0; i < atoms; ++i) p[i] = dist(rng);
  p /= p.sum();
  p[atoms - 1] += 1.0 - p.sum();
  return FiniteProbSpace(p);
}

// Random sub-algebra with at most maxBlocks blocks of contiguous atoms.
inline SigmaAlgebra randomAlgebra(Rng& rng, int atoms, int maxBlocks) {
  const int want = std::uniform_int_distribution<int>(1, std::min(maxBlocks, atoms))(rng);
  // Choose want-1 distinct interior cut points out of atoms-1 slots.
  std::vector<int> slots(atoms - 1);
  for (int i = 0; i + 1 < atoms; ++i) slots[i] = i + 1;
  for (int i = 0; i < want - 1; ++i) {
    const int j = std::uniform_int_distribution<int>(i, atoms - 2)(rng);
    std::swap(slots[i], slots[j]);
  }
  std::vector<int> cuts(slots.begin(), slots.begin() + (want - 1));
  std::sort(cuts.begin(), cuts.end());
  std::vector<int> label(atoms);
  int block = 0;
  std::size_t next = 0;
  for (int a = 0; a < atoms; ++a) {
    if (next < cuts.size() && a == cuts[next]) {
      ++block;
      ++next;
    }
    label[a] = block;
  }
  return SigmaAlgebra(label);
}

// Random F-measurable partition of the sample space into at most maxParts
// nonempty pieces (each piece a union of F-blocks).
inline FPartition randomPartition(Rng& rng, const SigmaAlgebra& F, int maxParts = 4) {
  const int blocks = F.blocks();
  const int want = std::uniform_int_distribution<int>(1, std::min(maxParts, blocks))(rng);
  std::vector<int> part(blocks);
  for (int b = 0; b < blocks; ++b) part[b] = std::uniform_int_distribution<int>(0, want - 1)(rng);
  // Keep labels dense so no part comes out empty.
  std::vector<int> remap(want, -1);
  int used = 0;
  for (int b = 0; b < blocks; ++b) {
    if (remap[part[b]] < 0) remap[part[b]] = used++;
    part[b] = remap[part[b]];
  }
  std::vector<Indicator> parts;
  for (int p = 0; p < used; ++p) {
    Mask in = Mask::Constant(F.atoms(), false);
    for (int b = 0; b < blocks; ++b)
      if (part[b] == p)
        for (int a : F.members(b)) in[a] = true;
    parts.push_back(Indicator{in});
  }
  return FPartition(std::move(parts), F);
}

// Density from the dual feasible set: y <= 0 with E[y|F] = -1 on every block.
inline RandVar randomFeasibleDensity(Rng& rng, const FiniteProbSpace& space,
                                     const SigmaAlgebra& F) {
  std::uniform_real_distribution<double> dist(0.1, 1.0);
  const RandVar w = condWeights(space, F);
  RandVar y(F.atoms());
  for (int b = 0; b < F.blocks(); ++b) {
    const auto& idx = F.members(b);
    Eigen::ArrayXd q(static_cast<Eigen::Index>(idx.size()));
    for (Eigen::Index i = 0; i < q.size(); ++i) q[i] = dist(rng);
    q /= q.sum();
    for (std::size_t i = 0; i < idx.size(); ++i)
      y[idx[i]] = -q[static_cast<Eigen::Index>(i)] / w[idx[i]];
  }
  return y;
}

}  // namespace rca
