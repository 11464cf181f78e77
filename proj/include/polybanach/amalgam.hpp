#pragma once

#include "polybanach/operators.hpp"

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

namespace polybanach {

/// Output of the amalgamation of an eps-isometry f: X -> Y: a space Z with
/// exactly isometric embeddings of X and Y in which the two copies of f's
/// graph are within eps of each other in operator norm.
struct AmalgamCertificate {
  PolyhedralSpace X, Y, Z;
  LinearMap f, i, j;
  Rational epsilon_used;
  Rational bound_achieved;  // op_norm(j o f - i), <= epsilon_used
  DefectCertificate defect_f, defect_i, defect_j;
  // General case only: the corrected norm on X + f[X] in (x, image-coordinate)
  // coordinates, kept for the symbolic quotient-norm cross check.
  std::optional<PolyhedralSpace> inner;
  Mat image_basis;  // columns of f's matrix, the coordinates used by `inner`
};

namespace detail {

inline void require_eps_above_defect(const LinearMap& f, const Rational& eps, const char* op) {
  const Rational star = f.defect().epsilon_star;
  if (!(eps > star))
    throw std::invalid_argument(std::string(op) + ": eps " + rational_to_string(eps) +
                                " must strictly exceed the isometry defect " + rational_to_string(star));
}

}  // namespace detail

/// Amalgamation of a bijective eps-isometry f: X -> Y with dim X = dim Y.
/// Z is X + Y with the norm max{phi_X, phi_Y, eps1*|x|_X, eps1*|y|_Y} where
/// eps1 = eps/(1+eps) and the phi seminorms pair (x, y) against each extreme
/// point x* of the dual ball together with its normalized transport
/// x* o f^{-1} (and symmetrically). Restricting the suprema to the finitely
/// many dual vertices keeps the ball polyhedral; the embeddings stay exactly
/// isometric because dual norms are attained at dual vertices.
inline AmalgamCertificate amalgamate_bijective(const PolyhedralSpace& X, const PolyhedralSpace& Y,
                                               const LinearMap& f, const Rational& eps) {
  if (!f.domain().same_space(X) || !f.codomain().same_space(Y))
    throw std::invalid_argument("amalgamate_bijective: map does not run between the given spaces");
  if (X.dimension() != Y.dimension() || !f.bijective())
    throw std::invalid_argument("amalgamate_bijective: map is not bijective");
  detail::require_eps_above_defect(f, eps, "amalgamate_bijective");

  const Eigen::Index n = X.dimension();
  if (n == 0) {
    PolyhedralSpace Z = PolyhedralSpace::trivial();
    LinearMap i(X, Z, Mat(0, 0)), j(Y, Z, Mat(0, 0));
    return AmalgamCertificate{X, Y, Z, f, i, j, eps, Rational(0), f.defect(), i.defect(), j.defect(),
                              std::nullopt, Mat(0, 0)};
  }

  const Rational eps1 = eps / (1 + eps);
  const Mat& M = f.matrix();
  const Mat Minv = inverse_of(M);

  HalfspaceSystem rows(2 * n);
  auto add_row = [&](const Vec& xpart, const Vec& ypart) {
    Vec r(2 * n);
    r.head(n) = xpart;
    r.tail(n) = ypart;
    rows.add(std::move(r), Rational(1));
  };
  for (const auto& xstar : X.dual_vertices().points()) {
    Vec xbar = Minv.transpose() * xstar;
    Rational nu = Y.dual_norm(xbar);
    add_row(xstar, xbar / nu);
  }
  for (const auto& ystar : Y.dual_vertices().points()) {
    Vec ybar = M.transpose() * ystar;
    Rational mu = X.dual_norm(ybar);
    add_row(ybar / mu, ystar);
  }
  for (const auto& a : X.ball_facets().rows()) add_row(eps1 * a.normal, Vec::Zero(n));
  for (const auto& b : Y.ball_facets().rows()) add_row(Vec::Zero(n), eps1 * b.normal);

  PolyhedralSpace Z = PolyhedralSpace::from_halfspaces(rows);
  Mat mi = Mat::Zero(2 * n, n), mj = Mat::Zero(2 * n, n);
  mi.topRows(n) = Mat::Identity(n, n);
  mj.bottomRows(n) = Mat::Identity(n, n);
  LinearMap i(X, Z, mi), j(Y, Z, mj);
  if (!i.exact_isometry() || !j.exact_isometry())
    throw std::logic_error("amalgamate_bijective: embedding failed its isometry certificate");
  Rational bound = map_distance(compose(j, f), i);
  if (bound > eps) throw std::logic_error("amalgamate_bijective: certificate bound exceeded eps");
  return AmalgamCertificate{X, Y, Z, f, i, j, eps, bound, f.defect(), i.defect(), j.defect(),
                            std::nullopt, Mat(0, 0)};
}

/// Amalgamation of an arbitrary injective eps-isometry f: X -> Y. The
/// bijective construction provides the corrected norm on X + f[X]; the result
/// is X + Y with the infimal-convolution norm glued along f[X], realized as
/// the convex hull of the embedded corrected ball and the embedded ball of Y.
inline AmalgamCertificate amalgamate(const PolyhedralSpace& X, const PolyhedralSpace& Y, const LinearMap& f,
                                     const Rational& eps) {
  if (!f.domain().same_space(X) || !f.codomain().same_space(Y))
    throw std::invalid_argument("amalgamate: map does not run between the given spaces");
  if (!f.injective()) throw std::invalid_argument("amalgamate: map is not injective");
  detail::require_eps_above_defect(f, eps, "amalgamate");

  const Eigen::Index n = X.dimension();
  const Eigen::Index m = Y.dimension();
  if (n == 0) {
    PolyhedralSpace Z = Y;
    LinearMap i(X, Z, Mat(m, 0));
    LinearMap j(Y, Z, Mat::Identity(m, m));
    return AmalgamCertificate{X, Y, Z, f, i, j, eps, Rational(0), f.defect(), i.defect(), j.defect(),
                              std::nullopt, Mat(m, 0)};
  }

  const Mat& M = f.matrix();
  SubspaceResult image = subspace(Y, M);
  LinearMap f0(X, image.space, Mat::Identity(n, n));
  AmalgamCertificate base = amalgamate_bijective(X, image.space, f0, eps);

  std::vector<Vec> points;
  points.reserve(base.Z.ball_vertices().points().size() + Y.ball_vertices().points().size());
  for (const auto& v : base.Z.ball_vertices().points()) {
    Vec p(n + m);
    p.head(n) = v.head(n);
    p.tail(m) = M * v.tail(n);
    points.push_back(std::move(p));
  }
  for (const auto& w : Y.ball_vertices().points()) {
    Vec p = Vec::Zero(n + m);
    p.tail(m) = w;
    points.push_back(std::move(p));
  }
  PolyhedralSpace Z = PolyhedralSpace::from_vertices(VertexSystem(n + m, std::move(points)));

  Mat mi = Mat::Zero(n + m, n), mj = Mat::Zero(n + m, m);
  mi.topRows(n) = Mat::Identity(n, n);
  mj.bottomRows(m) = Mat::Identity(m, m);
  LinearMap i(X, Z, mi), j(Y, Z, mj);
  if (!i.exact_isometry() || !j.exact_isometry())
    throw std::logic_error("amalgamate: embedding failed its isometry certificate");
  Rational bound = map_distance(compose(j, f), i);
  if (bound > eps) throw std::logic_error("amalgamate: certificate bound exceeded eps");
  return AmalgamCertificate{X, Y, Z, f, i, j, eps, bound, f.defect(), i.defect(), j.defect(), base.Z, M};
}

/// Symbolic quotient-norm value at a point of X + Y for a general-case
/// amalgam: inf over v of |(x, v)|' + |y - Mv|_Y, solved as one exact LP.
/// Independent of the hull-based ball; used as a cross-check oracle.
inline Rational quotient_norm_lp(const AmalgamCertificate& cert, const Vec& point) {
  if (!cert.inner) throw std::invalid_argument("quotient_norm_lp: certificate has no inner norm data");
  const Eigen::Index n = cert.X.dimension();
  const Eigen::Index m = cert.Y.dimension();
  if (point.size() != n + m) throw std::invalid_argument("quotient_norm_lp: dimension mismatch");
  const Vec x = point.head(n);
  const Vec y = point.tail(m);
  const auto& inner_rows = cert.inner->ball_facets().rows();
  const auto& y_rows = cert.Y.ball_facets().rows();
  // Variables (v, s, t): minimize s + t.
  const Eigen::Index nv = n + 2;
  LinearProgram lp;
  lp.A = Mat::Zero(static_cast<Eigen::Index>(inner_rows.size() + y_rows.size()), nv);
  lp.b = Vec::Zero(lp.A.rows());
  // Gauge epigraphs: <row, (x, v)> <= s * offset and <row, y - Mv> <= t * offset.
  Eigen::Index r = 0;
  for (const auto& row : inner_rows) {
    lp.A.block(r, 0, 1, n) = row.normal.tail(n).transpose();
    lp.A(r, n) = -row.offset;
    lp.b(r) = -row.normal.head(n).dot(x);
    ++r;
  }
  for (const auto& row : y_rows) {
    lp.A.block(r, 0, 1, n) = -(cert.image_basis.transpose() * row.normal).transpose();
    lp.A(r, n + 1) = -row.offset;
    lp.b(r) = -row.normal.dot(y);
    ++r;
  }
  lp.c = Vec::Zero(nv);
  lp.c(n) = 1;
  lp.c(n + 1) = 1;
  lp.sense = LpSense::minimize;
  return lp_solve(lp).value;
}

/// Output of the l1 pushout W = (X1 (+)_1 Y0) / {(z, -f(z)) : z in X0}.
struct PushoutCertificate {
  PolyhedralSpace X0, X1, Y0, W;
  LinearMap inclusion;  // X0 -> X1, exact isometry
  LinearMap f;          // X0 -> Y0
  LinearMap f_prime;    // X1 -> W, extends f exactly
  LinearMap y_embed;    // Y0 -> W, exact isometry
  DefectCertificate defect_f_prime, defect_y_embed;
};

/// l1 pushout along an exact isometric inclusion X0 -> X1 and an injective
/// non-expansive map f: X0 -> Y0. Coordinates on W are X1's coordinates
/// followed by a complement of f[X0] in Y0 chosen by greedy pivoting on the
/// standard basis. The unit ball is the image of the l1-sum ball under the
/// quotient projection.
///
/// Non-expansiveness (op_norm(f) <= 1) is required: an expansive f makes the
/// canonical copy of Y0 in the quotient strictly flattened, so the isometry
/// certificate for y_embed could not exist. Exact isometries qualify.
inline PushoutCertificate pushout_l1(const PolyhedralSpace& X0, const PolyhedralSpace& X1,
                                     const LinearMap& inclusion, const PolyhedralSpace& Y0,
                                     const LinearMap& f) {
  if (!inclusion.domain().same_space(X0) || !inclusion.codomain().same_space(X1))
    throw std::invalid_argument("pushout_l1: inclusion does not run X0 -> X1");
  if (!f.domain().same_space(X0) || !f.codomain().same_space(Y0))
    throw std::invalid_argument("pushout_l1: map does not run X0 -> Y0");
  if (!inclusion.exact_isometry())
    throw std::invalid_argument("pushout_l1: inclusion is not an exact isometry");
  if (!f.injective()) throw std::invalid_argument("pushout_l1: map is not injective");
  if (X0.dimension() > 0 && f.op_norm().value > 1)
    throw std::invalid_argument("pushout_l1: map must be non-expansive (op_norm <= 1); got op_norm " +
                                rational_to_string(f.op_norm().value));

  const Eigen::Index p = X1.dimension();
  const Eigen::Index q = Y0.dimension();
  const Eigen::Index k = X0.dimension();
  const Mat& U = inclusion.matrix();
  const Mat& F = f.matrix();

  // Complement of f[X0]: standard basis vectors that extend the column space
  // of F, picked greedily in coordinate order.
  Mat candidates = hstack(F, Mat::Identity(q, q));
  std::vector<Eigen::Index> chosen = greedy_independent_columns(candidates);
  Mat N(q, q - k);
  {
    Eigen::Index c = 0;
    for (Eigen::Index idx : chosen)
      if (idx >= k) N.col(c++) = candidates.col(idx);
    if (c != q - k) throw std::logic_error("pushout_l1: complement construction failed");
  }
  Mat S = hstack(N, -F);
  Mat Sinv = inverse_of(S);
  Mat Pc = Sinv.topRows(q - k);
  Mat Pz = Sinv.bottomRows(k);

  const Eigen::Index dw = p + q - k;
  Mat proj = Mat::Zero(dw, p + q);
  proj.block(0, 0, p, p) = Mat::Identity(p, p);
  proj.block(0, p, p, q) = -U * Pz;
  proj.block(p, p, q - k, q) = Pc;

  std::vector<Vec> points;
  points.reserve(X1.ball_vertices().points().size() + Y0.ball_vertices().points().size());
  for (const auto& v : X1.ball_vertices().points()) {
    Vec lift = Vec::Zero(p + q);
    lift.head(p) = v;
    points.push_back(proj * lift);
  }
  for (const auto& w : Y0.ball_vertices().points()) {
    Vec lift = Vec::Zero(p + q);
    lift.tail(q) = w;
    points.push_back(proj * lift);
  }
  PolyhedralSpace W = PolyhedralSpace::from_vertices(VertexSystem(dw, std::move(points)));

  Mat mfp = Mat::Zero(dw, p);
  mfp.topRows(p) = Mat::Identity(p, p);
  Mat mye(dw, q);
  mye.topRows(p) = -U * Pz;
  mye.bottomRows(q - k) = Pc;
  LinearMap f_prime(X1, W, mfp), y_embed(Y0, W, mye);

  if (f_prime.matrix() * U != y_embed.matrix() * F)
    throw std::logic_error("pushout_l1: exact extension identity failed");
  if (!y_embed.exact_isometry()) throw std::logic_error("pushout_l1: y_embed failed its isometry certificate");
  if (f_prime.defect().epsilon_star > f.defect().epsilon_star)
    throw std::logic_error("pushout_l1: f_prime defect exceeds the defect of f");
  return PushoutCertificate{X0, X1, Y0, W, inclusion, f, f_prime, y_embed,
                            f_prime.defect(), y_embed.defect()};
}

/// Output of the isometric extension step: an exact isometry g on the larger
/// domain, a space containing Y0 isometrically, and the certified distance
/// |g restricted to X0 - f| < eps.
struct ExtensionResult {
  PolyhedralSpace Y1;
  LinearMap g;        // X1 -> Y1, exact isometry
  LinearMap y_embed;  // Y0 -> Y1, exact isometry
  Rational distance;  // op_norm(g o inclusion - y_embed o f), < eps
};

/// Extends an eps-isometry f: X0 -> Y0 across an exact isometric inclusion
/// X0 -> X1: first the amalgamation replaces f by the exactly isometric copy
/// i0 of X0 inside the amalgam Z0 (trivially Z0 = Y0 when f is already
/// isometric), then the l1 pushout of X1 and Z0 over X0 glues everything.
/// Gluing along two exact isometries keeps both pushout embeddings exactly
/// isometric, and the distance equals the amalgamation bound.
inline ExtensionResult extend_isometry(const PolyhedralSpace& X0, const PolyhedralSpace& X1,
                                       const LinearMap& inclusion, const PolyhedralSpace& Y0,
                                       const LinearMap& f, const Rational& eps) {
  if (!inclusion.exact_isometry())
    throw std::invalid_argument("extend_isometry: inclusion is not an exact isometry");
  detail::require_eps_above_defect(f, eps, "extend_isometry");

  PolyhedralSpace Z0;
  LinearMap i0 = f, j0 = identity_map(Y0);
  Rational bound(0);
  if (f.defect().epsilon_star == 0) {
    Z0 = Y0;
  } else {
    AmalgamCertificate cert = amalgamate(X0, Y0, f, eps);
    if (!(cert.bound_achieved < eps)) {
      const Rational eps_prime = (f.defect().epsilon_star + eps) / 2;
      cert = amalgamate(X0, Y0, f, eps_prime);
    }
    Z0 = cert.Z;
    i0 = cert.i;
    j0 = cert.j;
    bound = cert.bound_achieved;
  }

  PushoutCertificate po = pushout_l1(X0, X1, inclusion, Z0, i0);
  LinearMap g = po.f_prime;
  if (!g.exact_isometry()) throw std::logic_error("extend_isometry: g failed its isometry certificate");
  LinearMap y_embed = compose(po.y_embed, j0);
  if (!y_embed.exact_isometry())
    throw std::logic_error("extend_isometry: y_embed failed its isometry certificate");
  Rational distance = map_distance(compose(g, inclusion), compose(y_embed, f));
  if (distance != bound) throw std::logic_error("extend_isometry: distance does not match the amalgam bound");
  if (!(distance < eps)) throw std::logic_error("extend_isometry: distance failed the strict bound");
  return ExtensionResult{po.W, g, y_embed, distance};
}

}  // namespace polybanach
