#pragma once

#include "polybanach/engine.hpp"
#include "polybanach/random_gen.hpp"

#include <vector>

namespace tst {

using namespace polybanach;

inline Vec vec1(const Rational& a) {
  Vec v(1);
  v << a;
  return v;
}

inline Vec vec2(const Rational& a, const Rational& b) {
  Vec v(2);
  v << a, b;
  return v;
}

inline Vec vec3(const Rational& a, const Rational& b, const Rational& c) {
  Vec v(3);
  v << a, b, c;
  return v;
}

/// The line with unit ball [-c, c].
inline PolyhedralSpace segment(const Rational& c = Rational(1)) {
  HalfspaceSystem h(1);
  h.add(vec1(1), c);
  h.add(vec1(-1), c);
  return PolyhedralSpace::from_halfspaces(h);
}

/// l-infinity ball in dimension d (the cube).
inline PolyhedralSpace linf(Eigen::Index d) {
  HalfspaceSystem h(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    Vec e = Vec::Zero(d);
    e(i) = 1;
    h.add(e, Rational(1));
    h.add(-e, Rational(1));
  }
  return PolyhedralSpace::from_halfspaces(h);
}

/// l1 ball in dimension d (the cross-polytope).
inline PolyhedralSpace l1(Eigen::Index d) {
  VertexSystem v(d);
  for (Eigen::Index i = 0; i < d; ++i) {
    Vec e = Vec::Zero(d);
    e(i) = 1;
    v.add(e);
    v.add(-e);
  }
  return PolyhedralSpace::from_vertices(v);
}

/// Symmetric hexagon ball conv{(+-1,0), (+-1/2,+-1)}.
inline PolyhedralSpace hexagon() {
  VertexSystem v(2);
  v.add(vec2(1, 0));
  v.add(vec2(-1, 0));
  v.add(vec2(Rational(1, 2), 1));
  v.add(vec2(Rational(-1, 2), -1));
  v.add(vec2(Rational(-1, 2), 1));
  v.add(vec2(Rational(1, 2), -1));
  return PolyhedralSpace::from_vertices(v);
}

inline LinearMap scaling_map(const PolyhedralSpace& s, const Rational& c) {
  return LinearMap(s, s, Mat(c * Mat::Identity(s.dimension(), s.dimension())));
}

inline ChainSpace chain_of(std::vector<PolyhedralSpace> stages) {
  std::vector<LinearMap> inc;
  for (std::size_t i = 0; i + 1 < stages.size(); ++i) {
    if (stages[i].dimension() == 0) {
      inc.emplace_back(stages[i], stages[i + 1], Mat(stages[i + 1].dimension(), 0));
    } else if (stages[i].same_space(stages[i + 1])) {
      inc.push_back(identity_map(stages[i]));
    } else {
      throw std::invalid_argument("chain_of: consecutive stages need an explicit inclusion");
    }
  }
  return ChainSpace(std::move(stages), std::move(inc));
}

/// A tower of identical line stages.
inline ChainSpace line_chain(std::size_t stages) {
  return chain_of(std::vector<PolyhedralSpace>(stages, segment()));
}

/// Random eps-isometry instance: an injective map plus an eps strictly above
/// its defect by a random positive slack.
struct EpsIsometryInstance {
  PolyhedralSpace X, Y;
  LinearMap f;
  Rational eps;
};

inline EpsIsometryInstance random_eps_isometry(RandomGen& gen, int max_dim = 3, int max_vertices = 12) {
  const Eigen::Index n = gen.uniform(1, max_dim);
  const Eigen::Index m = gen.uniform(static_cast<int>(n), max_dim);
  PolyhedralSpace X = gen.space(n, gen.uniform(4, max_vertices));
  PolyhedralSpace Y = gen.space(m, gen.uniform(4, max_vertices));
  LinearMap f = gen.injective_map(X, Y);
  Rational slack = gen.positive_rational(3, 4);
  return EpsIsometryInstance{X, Y, f, Rational(f.defect().epsilon_star + slack)};
}

}  // namespace tst
