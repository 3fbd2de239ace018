#include "rca/bodies.hpp"

#include <cmath>
#include <limits>

#include "rca/errors.hpp"
#include "rca/tolerances.hpp"

namespace rca {

int ConvexBody::blocks() const {
  switch (kind) {
    case BodyKind::Box:
      return static_cast<int>(lower.size());
    case BodyKind::Hull:
      return static_cast<int>(gens.size());
    case BodyKind::BallInf:
      return static_cast<int>(radius.size());
    case BodyKind::Cuts:
      return static_cast<int>(cuts.size());
  }
  return 0;
}

int ConvexBody::blockDim(int b) const {
  switch (kind) {
    case BodyKind::Box:
      return static_cast<int>(lower[b].size());
    case BodyKind::Hull:
      return static_cast<int>(gens[b].rows());
    case BodyKind::BallInf:
      return -1;  // any dimension; the radius applies per atom
    case BodyKind::Cuts:
      return static_cast<int>(cuts[b].cols());
  }
  return 0;
}

ConvexBody boxBody(const SigmaAlgebra& F, const RandVar& lower, const RandVar& upper) {
  if (lower.size() != F.atoms() || upper.size() != F.atoms())
    throw InputError("boxBody: bound length does not match atom count");
  if ((lower > upper).any()) throw InputError("boxBody: lower bound exceeds upper bound");
  ConvexBody body;
  body.kind = BodyKind::Box;
  for (int b = 0; b < F.blocks(); ++b) {
    body.lower.push_back(blockSlice(lower, F, b));
    body.upper.push_back(blockSlice(upper, F, b));
  }
  return body;
}

ConvexBody ballInfBody(const SigmaAlgebra& F, const RandVar& radius) {
  if (radius.size() != F.atoms()) throw InputError("ballInfBody: radius length mismatch");
  if ((radius <= 0).any()) throw InputError("ballInfBody: radius must be strictly positive");
  requireMeasurable(radius, F, "ballInfBody radius");
  ConvexBody body;
  body.kind = BodyKind::BallInf;
  body.radius.resize(F.blocks());
  for (int b = 0; b < F.blocks(); ++b) body.radius[b] = radius[F.members(b).front()];
  return body;
}

ConvexBody hullBody(const SigmaAlgebra& F, const std::vector<RandVar>& generators) {
  if (generators.empty()) throw InputError("hullBody: no generators");
  ConvexBody body;
  body.kind = BodyKind::Hull;
  for (int b = 0; b < F.blocks(); ++b) {
    const auto& idx = F.members(b);
    Eigen::MatrixXd G(idx.size(), generators.size());
    for (std::size_t j = 0; j < generators.size(); ++j) {
      if (generators[j].size() != F.atoms())
        throw InputError("hullBody: generator length mismatch");
      G.col(static_cast<Eigen::Index>(j)) = blockSlice(generators[j], F, b).matrix();
    }
    body.gens.push_back(std::move(G));
  }
  return body;
}

ConvexBody crossPolytopeBody(const SigmaAlgebra& F, const RandVar& scale) {
  if (scale.size() != F.atoms()) throw InputError("crossPolytopeBody: scale length mismatch");
  if ((scale <= 0).any()) throw InputError("crossPolytopeBody: scale must be positive");
  ConvexBody body;
  body.kind = BodyKind::Hull;
  for (int b = 0; b < F.blocks(); ++b) {
    const auto& idx = F.members(b);
    const Eigen::Index d = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(d, 2 * d);
    for (Eigen::Index i = 0; i < d; ++i) {
      G(i, 2 * i) = scale[idx[static_cast<std::size_t>(i)]];
      G(i, 2 * i + 1) = -scale[idx[static_cast<std::size_t>(i)]];
    }
    body.gens.push_back(std::move(G));
  }
  return body;
}

bool memberBlock(const ConvexBody& body, int b, const Eigen::ArrayXd& xb, double t,
                 const Eigen::ArrayXd& wb, double tol) {
  if (t < 0) throw InputError("memberBlock: negative scale");
  if (t == 0.0) return (xb.abs() <= tol).all();
  switch (body.kind) {
    case BodyKind::Box:
      return (xb >= t * body.lower[b] - tol).all() && (xb <= t * body.upper[b] + tol).all();
    case BodyKind::BallInf:
      return (xb.abs() <= t * body.radius[b] + tol).all();
    case BodyKind::Cuts: {
      const Eigen::VectorXd v = body.cuts[b] * xb.matrix();
      return (v.array().abs() <= t + tol).all();
    }
    case BodyKind::Hull: {
      // The solver's stopping threshold lives on the squared-distance scale,
      // so the 1e-9 default would leave the residual far coarser than the
      // membership tolerance and the gauge bisection boundary would jitter.
      // Run it near machine precision instead; the stall guards inside
      // projectHull keep the tighter setting from cycling.
      const HullProjection proj =
          projectHull(t * body.gens[b], xb.matrix(), wb.matrix(), 1e-14);
      return std::sqrt(proj.dist2) <= tol;
    }
  }
  return false;
}

bool member(const FiniteProbSpace& space, const SigmaAlgebra& F, const ConvexBody& body,
            const RandVar& x, double tol) {
  if (body.blocks() != F.blocks()) throw InputError("member: body and algebra disagree");
  const RandVar w = condWeights(space, F);
  for (int b = 0; b < F.blocks(); ++b) {
    if (!memberBlock(body, b, blockSlice(x, F, b), 1.0, blockSlice(w, F, b), tol)) return false;
  }
  return true;
}

bool interiorBlock(const ConvexBody& body, int b, const Eigen::ArrayXd& xb,
                   const Eigen::ArrayXd& wb, double probe) {
  switch (body.kind) {
    case BodyKind::Box:
      return (xb >= body.lower[b] + probe).all() && (xb <= body.upper[b] - probe).all();
    case BodyKind::BallInf:
      return (xb.abs() <= body.radius[b] - probe).all();
    case BodyKind::Cuts: {
      const Eigen::VectorXd v = body.cuts[b] * xb.matrix();
      return (v.array().abs() <= 1.0 - probe).all();
    }
    case BodyKind::Hull: {
      for (Eigen::Index i = 0; i < xb.size(); ++i) {
        for (const double sign : {1.0, -1.0}) {
          Eigen::ArrayXd y = xb;
          y[i] += sign * probe;
          if (!memberBlock(body, b, y, 1.0, wb, kDistanceSnap)) return false;
        }
      }
      return true;
    }
  }
  return false;
}

bool containsZero(const FiniteProbSpace& space, const SigmaAlgebra& F, const ConvexBody& body,
                  double tol) {
  return member(space, F, body, RandVar::Zero(F.atoms()), tol);
}

bool isBalanced(const FiniteProbSpace& space, const SigmaAlgebra& F, const ConvexBody& body,
                double tol) {
  switch (body.kind) {
    case BodyKind::BallInf:
    case BodyKind::Cuts:
      return true;  // defined by symmetric inequalities
    case BodyKind::Box: {
      for (int b = 0; b < F.blocks(); ++b)
        if (((body.lower[b] + body.upper[b]).abs() > tol).any()) return false;
      return true;
    }
    case BodyKind::Hull: {
      // conv(G) is balanced iff every negated generator stays inside.
      const RandVar w = condWeights(space, F);
      for (int b = 0; b < F.blocks(); ++b) {
        const Eigen::ArrayXd wb = blockSlice(w, F, b);
        for (Eigen::Index j = 0; j < body.gens[b].cols(); ++j) {
          if (!memberBlock(body, b, -body.gens[b].col(j).array(), 1.0, wb,
                           std::max(tol, kDistanceSnap)))
            return false;
        }
      }
      return true;
    }
  }
  return false;
}

HullProjection projectHull(const Eigen::MatrixXd& G, const Eigen::VectorXd& x,
                           const Eigen::VectorXd& w, double tol, int cap) {
  const Eigen::Index m = G.cols();
  if (m == 0) throw InputError("projectHull: empty generator set");
  if (G.rows() != x.size() || w.size() != x.size())
    throw InputError("projectHull: dimension mismatch");

  const auto wdot = [&w](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return (a.array() * w.array() * b.array()).sum();
  };

  // Seed with the nearest single generator.
  Eigen::Index seed = 0;
  double best = std::numeric_limits<double>::infinity();
  for (Eigen::Index j = 0; j < m; ++j) {
    const Eigen::VectorXd d = G.col(j) - x;
    const double v = wdot(d, d);
    if (v < best) {
      best = v;
      seed = j;
    }
  }
  std::vector<Eigen::Index> support{seed};
  Eigen::VectorXd lam = Eigen::VectorXd::Ones(1);
  int iters = 0;

  const auto pointOf = [&](const std::vector<Eigen::Index>& S, const Eigen::VectorXd& l) {
    Eigen::VectorXd p = Eigen::VectorXd::Zero(G.rows());
    for (std::size_t k = 0; k < S.size(); ++k) p += l[static_cast<Eigen::Index>(k)] * G.col(S[k]);
    return p;
  };

  for (;;) {
    if (++iters > cap) throw BudgetError("projectHull: iteration cap exceeded");
    const Eigen::VectorXd p = pointOf(support, lam);
    const Eigen::VectorXd r = p - x;
    const double cur = wdot(r, p);
    const double eps = tol * (1.0 + std::abs(cur));
    Eigen::Index enter = -1;
    double low = cur - eps;
    for (Eigen::Index j = 0; j < m; ++j) {
      const double s = wdot(r, G.col(j));
      if (s < low) {
        low = s;
        enter = j;
      }
    }
    bool stalled = (enter < 0);
    if (!stalled) {
      for (const Eigen::Index k : support)
        if (k == enter) stalled = true;  // revisiting: no numerical headroom left
    }
    if (stalled) {
      HullProjection out;
      out.point = p;
      out.lambda = Eigen::VectorXd::Zero(m);
      for (std::size_t k = 0; k < support.size(); ++k)
        out.lambda[support[k]] = lam[static_cast<Eigen::Index>(k)];
      out.dist2 = wdot(r, r);
      out.iterations = iters;
      return out;
    }

    support.push_back(enter);
    lam.conservativeResize(support.size());
    lam[static_cast<Eigen::Index>(support.size()) - 1] = 0.0;

    // Minimize over the affine hull of the support; walk back and drop
    // vertices whenever the unconstrained optimum leaves the simplex.
    bool enterDropped = false;
    for (;;) {
      if (++iters > cap) throw BudgetError("projectHull: iteration cap exceeded");
      const int k = static_cast<int>(support.size());
      Eigen::MatrixXd Gs(G.rows(), k);
      for (int i = 0; i < k; ++i) Gs.col(i) = G.col(support[static_cast<std::size_t>(i)]);
      Eigen::MatrixXd A = Eigen::MatrixXd::Zero(k + 1, k + 1);
      A.topLeftCorner(k, k) = 2.0 * Gs.transpose() * w.asDiagonal() * Gs;
      A.topRightCorner(k, 1).setOnes();
      A.bottomLeftCorner(1, k).setOnes();
      Eigen::VectorXd rhs(k + 1);
      rhs.head(k) = 2.0 * Gs.transpose() * (w.asDiagonal() * x);
      rhs[k] = 1.0;
      const Eigen::VectorXd sol = A.completeOrthogonalDecomposition().solve(rhs);
      Eigen::VectorXd mu = sol.head(k);

      if ((mu.array() >= -1e-12).all()) {
        lam = mu.cwiseMax(0.0);
        lam /= lam.sum();
        break;
      }
      double theta = 1.0;
      int drop = -1;
      for (int i = 0; i < k; ++i) {
        if (mu[i] < 0.0 && lam[i] > mu[i]) {
          const double step = lam[i] / (lam[i] - mu[i]);
          if (step < theta) {
            theta = step;
            drop = i;
          }
        }
      }
      lam = (1.0 - theta) * lam + theta * mu;
      if (drop >= 0) lam[drop] = 0.0;
      // Compact the support, remembering whether the entering vertex survived.
      std::vector<Eigen::Index> keptSupport;
      std::vector<double> keptLam;
      for (int i = 0; i < k; ++i) {
        if (lam[i] > 1e-14) {
          keptSupport.push_back(support[static_cast<std::size_t>(i)]);
          keptLam.push_back(lam[i]);
        } else if (support[static_cast<std::size_t>(i)] == enter) {
          enterDropped = true;
        }
      }
      support = std::move(keptSupport);
      lam.resize(static_cast<Eigen::Index>(keptLam.size()));
      for (std::size_t i = 0; i < keptLam.size(); ++i)
        lam[static_cast<Eigen::Index>(i)] = keptLam[i];
      lam /= lam.sum();
      if (enterDropped) break;  // the new vertex cannot improve the point
    }
    if (enterDropped) {
      const Eigen::VectorXd p2 = pointOf(support, lam);
      const Eigen::VectorXd r2 = p2 - x;
      HullProjection out;
      out.point = p2;
      out.lambda = Eigen::VectorXd::Zero(m);
      for (std::size_t k = 0; k < support.size(); ++k)
        out.lambda[support[k]] = lam[static_cast<Eigen::Index>(k)];
      out.dist2 = wdot(r2, r2);
      out.iterations = iters;
      return out;
    }
  }
}

}  // namespace rca
