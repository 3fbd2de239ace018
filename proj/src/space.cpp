#include "rca/space.hpp"

#include <cmath>

#include "rca/tolerances.hpp"

namespace rca {

FiniteProbSpace::FiniteProbSpace(Eigen::ArrayXd probs) : probs_(std::move(probs)) {
    if (probs_.size() == 0) throw InputError("space needs at least one atom");
    for (int i = 0; i < probs_.size(); ++i) {
        if (!(probs_[i] > 0.0))
            throw InputError("atom " + std::to_string(i) + " has non-positive probability");
    }
    if (std::abs(probs_.sum() - 1.0) > kTolLinear)
        throw InputError("probabilities must sum to 1");
}

SigmaAlgebra::SigmaAlgebra(std::vector<int> atomToBlock) : label_(std::move(atomToBlock)) {
    if (label_.empty()) throw InputError("algebra needs at least one atom");
    int maxBlock = -1;
    for (int b : label_) {
        if (b < 0) throw InputError("negative block label");
        maxBlock = std::max(maxBlock, b);
    }
    blockCount_ = maxBlock + 1;
    members_.resize(blockCount_);
    for (int atom = 0; atom < atoms(); ++atom) members_[label_[atom]].push_back(atom);
    for (int b = 0; b < blockCount_; ++b) {
        if (members_[b].empty())
            throw InputError("block " + std::to_string(b) + " is empty; labels must be contiguous");
    }
}

SigmaAlgebra SigmaAlgebra::trivial(int atoms) {
    return SigmaAlgebra(std::vector<int>(atoms, 0));
}

SigmaAlgebra SigmaAlgebra::finest(int atoms) {
    std::vector<int> label(atoms);
    for (int i = 0; i < atoms; ++i) label[i] = i;
    return SigmaAlgebra(std::move(label));
}

bool SigmaAlgebra::refines(const SigmaAlgebra& coarser) const {
    if (atoms() != coarser.atoms()) return false;
    // Each of our blocks must sit inside a single block of `coarser`.
    for (int b = 0; b < blocks(); ++b) {
        int target = coarser.blockOf(members_[b][0]);
        for (int atom : members_[b])
            if (coarser.blockOf(atom) != target) return false;
    }
    return true;
}

Eigen::ArrayXd blockProbs(const FiniteProbSpace& space, const SigmaAlgebra& F) {
    if (space.atoms() != F.atoms()) throw InputError("algebra does not match space");
    Eigen::ArrayXd out = Eigen::ArrayXd::Zero(F.blocks());
    for (int atom = 0; atom < space.atoms(); ++atom) out[F.blockOf(atom)] += space.prob(atom);
    return out;
}

Eigen::ArrayXd condWeights(const FiniteProbSpace& space, const SigmaAlgebra& F) {
    Eigen::ArrayXd bp = blockProbs(space, F);
    Eigen::ArrayXd out(space.atoms());
    for (int atom = 0; atom < space.atoms(); ++atom)
        out[atom] = space.prob(atom) / bp[F.blockOf(atom)];
    return out;
}

Indicator fullIndicator(int atoms) { return Indicator{Mask::Constant(atoms, true)}; }

Indicator emptyIndicator(int atoms) { return Indicator{Mask::Constant(atoms, false)}; }

Indicator complement(const Indicator& a) { return Indicator{!a.in}; }

Indicator unionOfBlocks(const SigmaAlgebra& F, const std::vector<int>& blockIds) {
    Mask in = Mask::Constant(F.atoms(), false);
    for (int b : blockIds) {
        if (b < 0 || b >= F.blocks()) throw InputError("block id out of range");
        for (int atom : F.members(b)) in[atom] = true;
    }
    return Indicator{in};
}

bool isMeasurable(const RandVar& x, const SigmaAlgebra& F, double tol) {
    if (x.size() != F.atoms()) return false;
    for (int b = 0; b < F.blocks(); ++b) {
        double v = x[F.members(b)[0]];
        for (int atom : F.members(b)) {
            if (std::isnan(x[atom])) return false;
            if (x[atom] == v) continue;  // also covers matching infinities
            if (!(std::abs(x[atom] - v) <= tol)) return false;
        }
    }
    return true;
}

bool isMeasurable(const Indicator& a, const SigmaAlgebra& F) {
    if (a.atoms() != F.atoms()) return false;
    for (int b = 0; b < F.blocks(); ++b) {
        bool v = a.in[F.members(b)[0]];
        for (int atom : F.members(b))
            if (a.in[atom] != v) return false;
    }
    return true;
}

void requireMeasurable(const RandVar& x, const SigmaAlgebra& F, double tol,
                       const std::string& what) {
    if (!isMeasurable(x, F, tol)) throw InputError(what + " is not constant on blocks");
}

void requireMeasurable(const RandVar& x, const SigmaAlgebra& F, const std::string& what) {
    requireMeasurable(x, F, 0.0, what);
}

Eigen::ArrayXd blockSlice(const RandVar& x, const SigmaAlgebra& F, int block) {
  const auto& idx = F.members(block);
  Eigen::ArrayXd out(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) out[static_cast<Eigen::Index>(i)] = x[idx[i]];
  return out;
}

void blockAssign(RandVar& x, const SigmaAlgebra& F, int block, const Eigen::ArrayXd& vals) {
  const auto& idx = F.members(block);
  if (vals.size() != static_cast<Eigen::Index>(idx.size()))
    throw InputError("blockAssign: value count does not match block size");
  for (std::size_t i = 0; i < idx.size(); ++i) x[idx[i]] = vals[static_cast<Eigen::Index>(i)];
}

FPartition::FPartition(std::vector<Indicator> parts, const SigmaAlgebra& F)
    : parts_(std::move(parts)) {
    if (parts_.empty()) throw InputError("partition needs at least one part");
    std::vector<int> hits(F.atoms(), 0);
    for (std::size_t i = 0; i < parts_.size(); ++i) {
        const Indicator& a = parts_[i];
        if (a.atoms() != F.atoms()) throw InputError("partition part has wrong length");
        if (!isMeasurable(a, F))
            throw InputError("partition part " + std::to_string(i) + " is not measurable");
        for (int atom = 0; atom < a.atoms(); ++atom)
            if (a.in[atom]) ++hits[atom];
    }
    for (int atom = 0; atom < F.atoms(); ++atom) {
        if (hits[atom] > 1)
            throw InputError("partition parts overlap at atom " + std::to_string(atom));
        if (hits[atom] == 0)
            throw InputError("partition does not cover atom " + std::to_string(atom));
    }
}

}  // namespace rca
