#pragma once

#include "polybanach/space.hpp"

#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <utility>

namespace polybanach {

/// A value with an attaining point on the domain unit sphere.
struct ValueWitness {
  Rational value;
  Vec witness;
};

/// Exact isometry-defect certificate. epsilon_star is the threshold below
/// which no eps works: the map is an eps-isometry (strict sandwich
/// (1+eps)^{-1} < |f(x)| < 1+eps on the unit sphere) exactly when
/// eps > epsilon_star. Maps from the zero-dimensional space are vacuously
/// isometric and carry no witnesses.
struct DefectCertificate {
  std::optional<ValueWitness> sup;  // operator norm
  std::optional<ValueWitness> inf;  // minimal gain over the unit sphere
  Rational epsilon_star;

  bool vacuous() const { return !sup.has_value(); }
};

/// An exact-rational linear map between polyhedral spaces. Immutable; the
/// norm/gain/defect certificates are memoized with compute-once semantics and
/// are safe to request concurrently.
class LinearMap {
 public:
  LinearMap(PolyhedralSpace domain, PolyhedralSpace codomain, Mat matrix)
      : domain_(std::move(domain)),
        codomain_(std::move(codomain)),
        matrix_(std::move(matrix)),
        cache_(std::make_shared<Cache>()) {
    if (matrix_.rows() != codomain_.dimension() || matrix_.cols() != domain_.dimension())
      throw std::invalid_argument("LinearMap: matrix shape does not match the spaces");
  }

  const PolyhedralSpace& domain() const { return domain_; }
  const PolyhedralSpace& codomain() const { return codomain_; }
  const Mat& matrix() const { return matrix_; }

  Vec apply(const Vec& x) const {
    if (x.size() != domain_.dimension()) throw std::invalid_argument("LinearMap::apply: dimension mismatch");
    return matrix_ * x;
  }

  bool injective() const { return rank_of(matrix_) == domain_.dimension(); }
  bool bijective() const { return matrix_.rows() == matrix_.cols() && injective(); }

  /// Operator norm: max over the domain ball vertices of the codomain norm of
  /// the image (exact by convexity), with an attaining vertex.
  const ValueWitness& op_norm() const {
    std::scoped_lock lock(cache_->mutex);
    if (!cache_->op_norm) cache_->op_norm = compute_op_norm();
    return *cache_->op_norm;
  }

  /// Minimal gain: min over the domain unit sphere of the codomain norm of
  /// the image, computed facet by facet as an exact LP. Requires injectivity.
  const ValueWitness& min_gain() const {
    std::scoped_lock lock(cache_->mutex);
    if (!cache_->min_gain) cache_->min_gain = compute_min_gain();
    return *cache_->min_gain;
  }

  const DefectCertificate& defect() const {
    std::scoped_lock lock(cache_->mutex);
    if (!cache_->defect) {
      if (domain_.dimension() == 0) {
        cache_->defect = DefectCertificate{std::nullopt, std::nullopt, Rational(0)};
      } else {
        if (!cache_->op_norm) cache_->op_norm = compute_op_norm();
        if (!cache_->min_gain) cache_->min_gain = compute_min_gain();
        Rational sup = cache_->op_norm->value;
        Rational inv_inf = Rational(1) / cache_->min_gain->value;
        cache_->defect = DefectCertificate{*cache_->op_norm, *cache_->min_gain,
                                           (sup > inv_inf ? sup : inv_inf) - 1};
      }
    }
    return *cache_->defect;
  }

  Rational epsilon_star() const { return defect().epsilon_star; }
  bool exact_isometry() const { return epsilon_star() == 0; }

 private:
  struct Cache {
    std::mutex mutex;
    std::optional<ValueWitness> op_norm;
    std::optional<ValueWitness> min_gain;
    std::optional<DefectCertificate> defect;
  };

  ValueWitness compute_op_norm() const {
    if (domain_.dimension() == 0) return ValueWitness{Rational(0), Vec(0)};
    ValueWitness best{Rational(-1), Vec()};
    for (const auto& v : domain_.ball_vertices().points()) {
      Rational n = codomain_.norm(matrix_ * v);
      if (n > best.value) best = ValueWitness{std::move(n), v};
    }
    return best;
  }

  ValueWitness compute_min_gain() const {
    if (domain_.dimension() == 0) return ValueWitness{Rational(1), Vec(0)};
    if (!injective()) throw std::invalid_argument("min_gain: map is not injective");
    const Eigen::Index n = domain_.dimension();
    const auto& facets = domain_.ball_facets().rows();
    const auto& duals = codomain_.dual_vertices().points();

    std::optional<ValueWitness> best;
    for (std::size_t j = 0; j < facets.size(); ++j) {
      // The sphere is the union of facets and the norm is even, so each
      // +/- facet pair needs one LP; keep the lexicographically positive one.
      if (lex_less(facets[j].normal, Vec::Zero(n))) continue;
      // min t  s.t.  <l_j, x> = 1,  <l_i, x> <= 1,  <w, Mx> <= t  for every
      // dual vertex w (the +/- pairs make the absolute value implicit).
      LinearProgram lp;
      const Eigen::Index rows = static_cast<Eigen::Index>(facets.size()) - 1 + static_cast<Eigen::Index>(duals.size());
      lp.A = Mat::Zero(rows, n + 1);
      lp.b = Vec::Zero(rows);
      Eigen::Index r = 0;
      for (std::size_t i = 0; i < facets.size(); ++i) {
        if (i == j) continue;
        lp.A.block(r, 0, 1, n) = facets[i].normal.transpose();
        lp.b(r) = facets[i].offset;
        ++r;
      }
      for (const auto& w : duals) {
        lp.A.block(r, 0, 1, n) = (matrix_.transpose() * w).transpose();
        lp.A(r, n) = -1;
        ++r;
      }
      lp.E = Mat::Zero(1, n + 1);
      lp.E.block(0, 0, 1, n) = facets[j].normal.transpose();
      lp.e = Vec::Constant(1, facets[j].offset);
      lp.c = Vec::Zero(n + 1);
      lp.c(n) = 1;
      lp.sense = LpSense::minimize;
      LpSolution sol = lp_solve(lp);
      if (!best || sol.value < best->value) best = ValueWitness{sol.value, sol.x.head(n)};
    }
    return *best;
  }

  PolyhedralSpace domain_;
  PolyhedralSpace codomain_;
  Mat matrix_;
  std::shared_ptr<Cache> cache_;
};

inline LinearMap identity_map(const PolyhedralSpace& s) {
  return LinearMap(s, s, Mat::Identity(s.dimension(), s.dimension()));
}

inline LinearMap compose(const LinearMap& g, const LinearMap& f) {
  if (!g.domain().same_space(f.codomain()))
    throw std::invalid_argument("compose: inner spaces do not match");
  return LinearMap(f.domain(), g.codomain(), g.matrix() * f.matrix());
}

inline LinearMap invert(const LinearMap& f) {
  if (f.matrix().rows() != f.matrix().cols()) throw std::invalid_argument("invert: map is not square");
  if (!is_invertible(f.matrix())) throw std::invalid_argument("invert: matrix is singular");
  return LinearMap(f.codomain(), f.domain(), inverse_of(f.matrix()));
}

/// Operator-norm distance between maps with common domain and codomain.
inline Rational map_distance(const LinearMap& f, const LinearMap& g) {
  if (!f.domain().same_space(g.domain()) || !f.codomain().same_space(g.codomain()))
    throw std::invalid_argument("map_distance: spaces do not match");
  return LinearMap(f.domain(), f.codomain(), f.matrix() - g.matrix()).op_norm().value;
}

/// A subspace with its induced norm and the (exactly isometric) inclusion.
struct SubspaceResult {
  PolyhedralSpace space;
  LinearMap inclusion;
};

/// Subspace of S spanned by the given independent basis columns, carrying the
/// induced norm. The inclusion is certified to have defect exactly 0.
inline SubspaceResult subspace(const PolyhedralSpace& s, const Mat& basis) {
  if (basis.rows() != s.dimension()) throw std::invalid_argument("subspace: basis dimension mismatch");
  const Eigen::Index k = basis.cols();
  if (rank_of(basis) != k) throw std::invalid_argument("subspace: basis is not linearly independent");
  if (k == 0) {
    PolyhedralSpace sub = PolyhedralSpace::trivial();
    return SubspaceResult{sub, LinearMap(sub, s, Mat(s.dimension(), 0))};
  }
  HalfspaceSystem induced(k);
  for (const auto& r : s.ball_facets().rows()) induced.add(basis.transpose() * r.normal, r.offset);
  PolyhedralSpace sub = PolyhedralSpace::from_halfspaces(induced);
  LinearMap inclusion(sub, s, basis);
  if (!inclusion.exact_isometry())
    throw std::logic_error("subspace: induced inclusion failed its isometry certificate");
  return SubspaceResult{sub, inclusion};
}

inline LinearMap restrict_to_subspace(const LinearMap& f, const SubspaceResult& sub) {
  if (!sub.inclusion.codomain().same_space(f.domain()))
    throw std::invalid_argument("restrict_to_subspace: subspace does not live in the domain");
  return compose(f, sub.inclusion);
}

/// Recomputes a defect certificate from scratch (fresh caches) and checks the
/// witnesses attain the claimed values on the unit sphere. Test/verify aid.
inline bool defect_certificate_ok(const LinearMap& f, const DefectCertificate& cert, std::string* why = nullptr) {
  auto fail = [&](const char* msg) {
    if (why) *why = msg;
    return false;
  };
  if (f.domain().dimension() == 0) return cert.vacuous() ? cert.epsilon_star == 0 : fail("expected vacuous certificate");
  if (cert.vacuous()) return fail("missing witnesses");
  if (f.domain().norm(cert.sup->witness) != 1) return fail("sup witness not on the unit sphere");
  if (f.domain().norm(cert.inf->witness) != 1) return fail("inf witness not on the unit sphere");
  if (f.codomain().norm(f.matrix() * cert.sup->witness) != cert.sup->value) return fail("sup witness value mismatch");
  if (f.codomain().norm(f.matrix() * cert.inf->witness) != cert.inf->value) return fail("inf witness value mismatch");
  LinearMap fresh(f.domain(), f.codomain(), f.matrix());
  const DefectCertificate& re = fresh.defect();
  if (re.sup->value != cert.sup->value) return fail("sup value not reproduced");
  if (re.inf->value != cert.inf->value) return fail("inf value not reproduced");
  Rational inv = Rational(1) / cert.inf->value;
  Rational expect = (cert.sup->value > inv ? cert.sup->value : inv) - 1;
  if (cert.epsilon_star != expect) return fail("epsilon_star mismatch");
  return true;
}

}  // namespace polybanach
