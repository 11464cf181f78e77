#pragma once

#include "polybanach/operators.hpp"

#include <cstdint>
#include <random>

namespace polybanach {

/// Deterministic generators for random test instances. All randomness flows
/// from the caller's seeded engine; coordinates stay small so exact
/// arithmetic stays fast.
class RandomGen {
 public:
  explicit RandomGen(std::uint64_t seed) : rng_(seed) {}

  std::mt19937_64& engine() { return rng_; }

  Rational rational(int max_num = 6, int max_den = 4) {
    std::uniform_int_distribution<int> num(-max_num, max_num);
    std::uniform_int_distribution<int> den(1, max_den);
    return Rational(num(rng_), den(rng_));
  }

  Rational positive_rational(int max_num = 6, int max_den = 4) {
    std::uniform_int_distribution<int> num(1, max_num);
    std::uniform_int_distribution<int> den(1, max_den);
    return Rational(num(rng_), den(rng_));
  }

  Vec vector(Eigen::Index dim, int max_num = 6, int max_den = 4) {
    Vec v(dim);
    for (Eigen::Index i = 0; i < dim; ++i) v(i) = rational(max_num, max_den);
    return v;
  }

  Vec nonzero_vector(Eigen::Index dim, int max_num = 6, int max_den = 4) {
    for (;;) {
      Vec v = vector(dim, max_num, max_den);
      if (!v.isZero()) return v;
    }
  }

  Mat matrix(Eigen::Index rows, Eigen::Index cols, int max_num = 4, int max_den = 3) {
    Mat m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
      for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = rational(max_num, max_den);
    return m;
  }

  /// Random symmetric polyhedral space: a symmetrized cloud of small rational
  /// points, re-drawn until the hull is full-dimensional.
  PolyhedralSpace space(Eigen::Index dim, int target_vertices = 8) {
    if (dim == 0) return PolyhedralSpace::trivial();
    for (;;) {
      VertexSystem pts(dim);
      for (int k = 0; k < (target_vertices + 1) / 2; ++k) {
        Vec p = nonzero_vector(dim);
        pts.add(p);
        pts.add(-p);
      }
      // Spanning pairs keep degenerate draws rare.
      for (Eigen::Index i = 0; i < dim; ++i) {
        Vec e = Vec::Zero(dim);
        e(i) = positive_rational(2, 2);
        pts.add(e);
        pts.add(-e);
      }
      try {
        return PolyhedralSpace::from_vertices(pts);
      } catch (const std::invalid_argument&) {
        continue;
      }
    }
  }

  /// Random injective map between the spaces (redrawn until full rank).
  LinearMap injective_map(const PolyhedralSpace& domain, const PolyhedralSpace& codomain) {
    if (domain.dimension() > codomain.dimension())
      throw std::invalid_argument("injective_map: domain dimension exceeds codomain dimension");
    for (;;) {
      Mat m = matrix(codomain.dimension(), domain.dimension());
      if (rank_of(m) == domain.dimension()) return LinearMap(domain, codomain, m);
    }
  }

  LinearMap bijective_map(const PolyhedralSpace& domain, const PolyhedralSpace& codomain) {
    if (domain.dimension() != codomain.dimension())
      throw std::invalid_argument("bijective_map: dimensions differ");
    return injective_map(domain, codomain);
  }

  /// Random injective map rescaled to operator norm exactly 1.
  LinearMap contraction(const PolyhedralSpace& domain, const PolyhedralSpace& codomain) {
    LinearMap f = injective_map(domain, codomain);
    const Rational n = f.op_norm().value;
    return LinearMap(domain, codomain, Mat(f.matrix() / n));
  }

  /// A point with norm exactly 1.
  Vec unit_vector(const PolyhedralSpace& s) {
    Vec v = nonzero_vector(s.dimension());
    return Vec(v / s.norm(v));
  }

  int uniform(int lo, int hi) {
    std::uniform_int_distribution<int> d(lo, hi);
    return d(rng_);
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace polybanach
