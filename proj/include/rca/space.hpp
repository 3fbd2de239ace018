#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

#include "rca/errors.hpp"

namespace rca {

// A random variable on a finite space: one (extended-real) value per atom.
// Plain +/-inf entries are allowed; the arithmetic conventions for them live
// in stratified.hpp.
using RandVar = Eigen::ArrayXd;

using Mask = Eigen::Array<bool, Eigen::Dynamic, 1>;

// Finite probability space: atoms carry strictly positive probabilities that
// sum to one. Every atom has positive mass, so equivalence classes of random
// variables are literal vectors and "on A" statements are per-atom statements.
class FiniteProbSpace {
  public:
    explicit FiniteProbSpace(Eigen::ArrayXd probs);

    int atoms() const { return static_cast<int>(probs_.size()); }
    const Eigen::ArrayXd& probs() const { return probs_; }
    double prob(int atom) const { return probs_[atom]; }

  private:
    Eigen::ArrayXd probs_;
};

// A sub-sigma-algebra, represented by its atoms: a partition of the space's
// atoms into contiguous-indexed, nonempty blocks.
class SigmaAlgebra {
  public:
    explicit SigmaAlgebra(std::vector<int> atomToBlock);

    static SigmaAlgebra trivial(int atoms);
    static SigmaAlgebra finest(int atoms);

    int atoms() const { return static_cast<int>(label_.size()); }
    int blocks() const { return blockCount_; }
    int blockOf(int atom) const { return label_[atom]; }
    const std::vector<int>& label() const { return label_; }

    // Atom indices of one block, ascending.
    const std::vector<int>& members(int block) const { return members_[block]; }

    // True when every block of `coarser` is a union of blocks of *this.
    bool refines(const SigmaAlgebra& coarser) const;

  private:
    std::vector<int> label_;
    int blockCount_ = 0;
    std::vector<std::vector<int>> members_;
};

// P(block) per block.
Eigen::ArrayXd blockProbs(const FiniteProbSpace& space, const SigmaAlgebra& F);

// Per-atom conditional weight P(atom) / P(block containing it). These are the
// weights of the conditional pairing E[x*y|F].
Eigen::ArrayXd condWeights(const FiniteProbSpace& space, const SigmaAlgebra& F);

// The (equivalence class of the) indicator of a set of atoms.
struct Indicator {
    Mask in;

    int atoms() const { return static_cast<int>(in.size()); }
    int count() const { return static_cast<int>(in.count()); }
    bool operator[](int atom) const { return in[atom]; }
};

Indicator fullIndicator(int atoms);
Indicator emptyIndicator(int atoms);
Indicator complement(const Indicator& a);

// Indicator of a union of F-blocks (always F-measurable by construction).
Indicator unionOfBlocks(const SigmaAlgebra& F, const std::vector<int>& blockIds);

// Constant on every F-block, up to tol (exact by default).
bool isMeasurable(const RandVar& x, const SigmaAlgebra& F, double tol = 0.0);
bool isMeasurable(const Indicator& a, const SigmaAlgebra& F);
void requireMeasurable(const RandVar& x, const SigmaAlgebra& F, double tol,
                       const std::string& what);
void requireMeasurable(const RandVar& x, const SigmaAlgebra& F, const std::string& what);

// Restriction of a vector to one block's atom coordinates, and its inverse.
Eigen::ArrayXd blockSlice(const RandVar& x, const SigmaAlgebra& F, int block);
void blockAssign(RandVar& x, const SigmaAlgebra& F, int block, const Eigen::ArrayXd& vals);

// An ordered list of pairwise-disjoint F-measurable indicators covering every
// atom: the gluing skeleton for concatenations.
class FPartition {
  public:
    FPartition(std::vector<Indicator> parts, const SigmaAlgebra& F);

    std::size_t size() const { return parts_.size(); }
    const Indicator& part(std::size_t i) const { return parts_[i]; }
    const std::vector<Indicator>& parts() const { return parts_; }

  private:
    std::vector<Indicator> parts_;
};

}  // namespace rca
