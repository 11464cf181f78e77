#pragma once

#include "polybanach/polytope.hpp"

#include <memory>
#include <stdexcept>
#include <string>
#include <utility>

namespace polybanach {

struct SpaceValidation {
  bool symmetric = false;
  bool bounded = false;
  bool full_dimensional = false;
  bool origin_interior = false;
  bool dual_consistent = false;
  bool all() const { return symmetric && bounded && full_dimensional && origin_interior && dual_consistent; }
};

/// A finite-dimensional Banach space whose unit ball is a rational symmetric
/// polytope with the origin in its interior. Both descriptions of the ball
/// and the extreme points of the dual ball are computed eagerly; values are
/// immutable and cheap to share.
class PolyhedralSpace {
 public:
  PolyhedralSpace() : impl_(trivial().impl_) {}

  static PolyhedralSpace trivial() {
    Impl impl;
    impl.dim = 0;
    impl.validation = SpaceValidation{true, true, true, true, true};
    return PolyhedralSpace(std::make_shared<const Impl>(std::move(impl)));
  }

  /// Builds a space from a halfspace description of its unit ball.
  static PolyhedralSpace from_halfspaces(const HalfspaceSystem& raw) {
    if (raw.dimension() == 0) return trivial();
    VertexSystem verts;
    HalfspaceSystem facets;
    try {
      verts = vertex_enumeration(raw.canonical());
      facets = facet_enumeration(verts);
    } catch (const std::invalid_argument& err) {
      throw std::invalid_argument(std::string("make_space: ball ") + describe(err));
    }
    return finish(std::move(verts), std::move(facets));
  }

  /// Builds a space from points spanning its unit ball (redundant points are
  /// dropped; the invariant "points are exactly the hull vertices" is
  /// restored canonically).
  static PolyhedralSpace from_vertices(const VertexSystem& raw) {
    if (raw.dimension() == 0) return trivial();
    if (raw.points().empty()) throw std::invalid_argument("make_space: ball has no vertices");
    VertexSystem verts;
    HalfspaceSystem facets;
    try {
      auto reduced = hull_reduce(raw);
      verts = std::move(reduced.first);
      facets = std::move(reduced.second);
    } catch (const std::invalid_argument& err) {
      throw std::invalid_argument(std::string("make_space: ball ") + describe(err));
    }
    return finish(std::move(verts), std::move(facets));
  }

  Eigen::Index dimension() const { return impl_->dim; }
  const HalfspaceSystem& ball_facets() const { return impl_->facets; }
  const VertexSystem& ball_vertices() const { return impl_->vertices; }
  const VertexSystem& dual_vertices() const { return impl_->dual_vertices; }
  const SpaceValidation& validation() const { return impl_->validation; }

  /// Norm of x: the maximum pairing against the extreme points of the dual
  /// ball. Exact, and equal to the gauge of the unit ball.
  Rational norm(const Vec& x) const {
    if (x.size() != impl_->dim) throw std::invalid_argument("norm: dimension mismatch");
    Rational best(0);
    for (const auto& f : impl_->dual_vertices.points()) {
      Rational v = boost::multiprecision::abs(Rational(f.dot(x)));
      if (v > best) best = v;
    }
    return best;
  }

  /// Independent norm computation: min { lambda >= 0 : x in lambda * ball },
  /// solved as an exact LP over convex combinations of the ball vertices.
  Rational gauge_lp(const Vec& x) const {
    if (x.size() != impl_->dim) throw std::invalid_argument("gauge_lp: dimension mismatch");
    if (impl_->dim == 0) return Rational(0);
    const Eigen::Index n = static_cast<Eigen::Index>(impl_->vertices.points().size());
    // min lambda  s.t.  sum mu_j v_j = x, sum mu_j = lambda, mu >= 0.
    LinearProgram lp;
    lp.E = Mat(impl_->dim + 1, n + 1);
    lp.E.setZero();
    for (Eigen::Index j = 0; j < n; ++j) {
      lp.E.block(0, j, impl_->dim, 1) = impl_->vertices.points()[static_cast<std::size_t>(j)];
      lp.E(impl_->dim, j) = 1;
    }
    lp.E(impl_->dim, n) = -1;
    lp.e = Vec::Zero(impl_->dim + 1);
    lp.e.head(impl_->dim) = x;
    lp.c = Vec::Zero(n + 1);
    lp.c(n) = 1;
    lp.sense = LpSense::minimize;
    lp.nonneg.assign(static_cast<std::size_t>(n + 1), 1);
    return lp_solve(lp).value;
  }

  /// Dual norm of a functional: max pairing over the ball vertices.
  Rational dual_norm(const Vec& phi) const {
    if (phi.size() != impl_->dim) throw std::invalid_argument("dual_norm: dimension mismatch");
    Rational best(0);
    for (const auto& v : impl_->vertices.points()) {
      Rational t = boost::multiprecision::abs(Rational(phi.dot(v)));
      if (t > best) best = t;
    }
    return best;
  }

  /// The space whose unit ball is the polar of this ball; representations are
  /// swapped, no enumeration runs.
  PolyhedralSpace polar_space() const {
    if (impl_->dim == 0) return trivial();
    Impl impl;
    impl.dim = impl_->dim;
    impl.vertices = impl_->dual_vertices;
    HalfspaceSystem facets(impl_->dim);
    for (const auto& v : impl_->vertices.points()) facets.add(v, Rational(1));
    impl.facets = facets.canonical();
    impl.dual_vertices = impl_->vertices;
    impl.validation = impl_->validation;
    return PolyhedralSpace(std::make_shared<const Impl>(std::move(impl)));
  }

  bool same_space(const PolyhedralSpace& other) const {
    if (impl_ == other.impl_) return true;
    return impl_->dim == other.impl_->dim && impl_->facets == other.impl_->facets &&
           impl_->vertices == other.impl_->vertices;
  }

  /// Used by certificate verification: rebuilds a space value from serialized
  /// systems without re-running enumeration. The targeted consistency checks
  /// live in the verifier.
  static PolyhedralSpace from_parts_unchecked(Eigen::Index dim, HalfspaceSystem facets, VertexSystem vertices,
                                              VertexSystem dual_vertices) {
    Impl impl;
    impl.dim = dim;
    impl.facets = std::move(facets);
    impl.vertices = std::move(vertices);
    impl.dual_vertices = std::move(dual_vertices);
    impl.validation = SpaceValidation{true, true, true, true, true};
    return PolyhedralSpace(std::make_shared<const Impl>(std::move(impl)));
  }

 private:
  struct Impl {
    Eigen::Index dim = 0;
    HalfspaceSystem facets;
    VertexSystem vertices;
    VertexSystem dual_vertices;
    SpaceValidation validation;
  };

  explicit PolyhedralSpace(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}

  static std::string describe(const std::invalid_argument& err) {
    std::string what = err.what();
    if (what.find("unbounded") != std::string::npos) return "is unbounded";
    if (what.find("not full-dimensional") != std::string::npos || what.find("degenerate") != std::string::npos)
      return "is not full-dimensional";
    if (what.find("origin") != std::string::npos) return "does not contain the origin in its interior";
    if (what.find("infeasible") != std::string::npos) return "is empty";
    return std::string("is invalid: ") + what;
  }

  static PolyhedralSpace finish(VertexSystem verts, HalfspaceSystem facets) {
    if (!verts.is_symmetric()) throw std::invalid_argument("make_space: ball is not symmetric");
    Impl impl;
    impl.dim = verts.dimension();
    impl.vertices = std::move(verts);
    impl.facets = std::move(facets);
    // Extreme points of the dual ball are exactly the canonical facet normals.
    std::vector<Vec> duals;
    duals.reserve(impl.facets.rows().size());
    for (const auto& r : impl.facets.rows()) duals.push_back(r.normal);
    impl.dual_vertices = VertexSystem(impl.dim, std::move(duals)).canonical();
    impl.validation = SpaceValidation{true, true, true, true, true};
    return PolyhedralSpace(std::make_shared<const Impl>(std::move(impl)));
  }

  std::shared_ptr<const Impl> impl_;
};

/// A linear functional on a polyhedral space.
struct Functional {
  PolyhedralSpace space;
  Vec coefficients;

  Rational dual_norm() const { return space.dual_norm(coefficients); }
};

}  // namespace polybanach
