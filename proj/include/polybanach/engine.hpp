#pragma once

#include "polybanach/chain.hpp"

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace polybanach {

/// A strictly decreasing geometric tolerance schedule eps_n = eps0 * ratio^n
/// together with the exact verification of the summability inequality
///   2 eps0 eps1 + eps1 + sum_{n>=1} (eps_n + 2 eps_n eps_{n+1} + eps_{n+1})
///     < target_eps - eps0,
/// evaluated in closed form. tail_bound is the exact value of the series
/// sum_{n>=depth} (eps_n + 2 eps_n eps_{n+1} + eps_{n+1}).
struct EpsilonSchedule {
  Rational target_eps;
  Rational eps0;
  Rational ratio;
  std::size_t depth;
  std::vector<Rational> terms;  // eps_0 .. eps_depth
  Rational budget_lhs;          // left side of the inequality above
  Rational slack;               // (target_eps - eps0) - budget_lhs, > 0
  Rational tail_bound;
};

/// Builds and exactly verifies a geometric schedule; throws with the exact
/// deficit when the budget inequality fails.
inline EpsilonSchedule schedule_make(const Rational& target_eps, const Rational& eps0, const Rational& ratio,
                                     std::size_t depth) {
  if (!(eps0 > 0) || !(eps0 < target_eps))
    throw std::invalid_argument("schedule_make: need 0 < eps0 < target_eps");
  if (!(ratio > 0) || !(ratio < 1)) throw std::invalid_argument("schedule_make: need 0 < ratio < 1");
  const Rational r = ratio;
  // sum_{n>=1} eps_n = eps0 r/(1-r); sum_{n>=1} eps_{n+1} = eps0 r^2/(1-r);
  // sum_{n>=1} 2 eps_n eps_{n+1} = 2 eps0^2 r^3/(1-r^2).
  const Rational lhs = 2 * eps0 * eps0 * r + eps0 * r + eps0 * r / (1 - r) +
                       2 * eps0 * eps0 * r * r * r / (1 - r * r) + eps0 * r * r / (1 - r);
  const Rational room = target_eps - eps0;
  if (!(lhs < room))
    throw std::invalid_argument("schedule_make: budget inequality fails by exact deficit " +
                                rational_to_string(lhs - room) +
                                " (shrink ratio or eps0)");
  EpsilonSchedule s;
  s.target_eps = target_eps;
  s.eps0 = eps0;
  s.ratio = ratio;
  s.depth = depth;
  s.terms.reserve(depth + 1);
  Rational t = eps0;
  for (std::size_t n = 0; n <= depth; ++n) {
    s.terms.push_back(t);
    t *= r;
  }
  s.budget_lhs = lhs;
  s.slack = room - lhs;
  const Rational rN = rational_pow(r, static_cast<long>(depth));
  s.tail_bound = eps0 * (rN + rN * r) / (1 - r) + 2 * eps0 * eps0 * rN * rN * r / (1 - r * r);
  return s;
}

/// Exact value of eps_n + 2 eps_n eps_{n+1} + eps_{n+1}: the per-step drift
/// bound of the back-and-forth.
inline Rational drift_bound(const EpsilonSchedule& s, std::size_t n) {
  const Rational& a = s.terms.at(n);
  const Rational& b = s.terms.at(n + 1);
  return a + 2 * a * b + b;
}

/// Result of the approximate-inverse construction: g is an exact isometry
/// from Y into the (extended) chain top with op_norm(g o f - incl_X) < eps.
struct ApproximateInverseResult {
  LinearMap g;           // Y -> new chain top
  LinearMap incl_x_new;  // X -> new chain top, the exact reference copy of X
  Rational eps_prime;    // defect < eps_prime < eps (midpoint choice)
  Rational delta_prime;  // 0 < delta_prime < delta with (1+delta_prime) eps_prime < eps
  Rational amalgam_bound;
  Rational distance;  // op_norm(g o f - incl_x_new), < eps
  bool trivial_path;  // f was already an exact isometry
};

/// Approximate inverse against a chain: given an eps-isometry f: X -> Y with
/// X isometric in the chain top, produces g: Y -> E with g o f within eps of
/// the inclusion of X. When f is exactly isometric the request is served
/// exactly (distance 0) through a single pushout; otherwise the amalgamation
/// at eps_prime = (defect + eps)/2 provides the corrected copy and the
/// extension oracle glues it above the chain.
inline ApproximateInverseResult approximate_inverse(ChainSpace& chain, const PolyhedralSpace& X,
                                                    const LinearMap& incl_x, const PolyhedralSpace& Y,
                                                    const LinearMap& f, const Rational& eps,
                                                    const Rational& delta) {
  if (!f.domain().same_space(X) || !f.codomain().same_space(Y))
    throw std::invalid_argument("approximate_inverse: map does not run X -> Y");
  if (!(delta > 0)) throw std::invalid_argument("approximate_inverse: delta must be positive");
  detail::require_eps_above_defect(f, eps, "approximate_inverse");

  const Rational star = f.defect().epsilon_star;
  const std::size_t old_top = chain.size() - 1;
  if (star == 0) {
    LinearMap h = gurarii_extend(chain, X, incl_x, Y, f, delta / 2);
    LinearMap incl_new = compose(chain.embedding(old_top, chain.size() - 1), incl_x);
    Rational distance = map_distance(compose(h, f), incl_new);
    if (distance != 0) throw std::logic_error("approximate_inverse: exact service failed");
    return ApproximateInverseResult{h, incl_new, eps / 2, delta / 2, Rational(0), distance, true};
  }

  const Rational eps_prime = (star + eps) / 2;
  Rational delta_prime = (eps / eps_prime - 1) / 2;
  if (delta / 2 < delta_prime) delta_prime = delta / 2;
  if (!((1 + delta_prime) * eps_prime < eps))
    throw std::logic_error("approximate_inverse: (1+delta') eps' < eps bookkeeping failed");

  AmalgamCertificate cert = amalgamate(X, Y, f, eps_prime);
  LinearMap h = gurarii_extend(chain, X, incl_x, cert.Z, cert.i, delta_prime);
  LinearMap g = compose(h, cert.j);
  LinearMap incl_new = compose(chain.embedding(old_top, chain.size() - 1), incl_x);
  if (!g.exact_isometry()) throw std::logic_error("approximate_inverse: g failed its isometry certificate");
  Rational distance = map_distance(compose(g, f), incl_new);
  if (distance != cert.bound_achieved)
    throw std::logic_error("approximate_inverse: distance does not match the amalgam bound");
  if (!(distance < eps)) throw std::logic_error("approximate_inverse: distance failed the strict bound");
  return ApproximateInverseResult{g, incl_new, eps_prime, delta_prime, cert.bound_achieved, distance, false};
}

/// One step of the back-and-forth, recorded abstractly: all maps run between
/// the listed spaces and every certified value is an exact rational.
struct BackAndForthStep {
  PolyhedralSpace X_next, Y_next;
  LinearMap g;       // Y_n -> X_{n+1}
  LinearMap f_next;  // X_{n+1} -> Y_{n+1}
  LinearMap incl_x;  // X_n -> X_{n+1}
  LinearMap incl_y;  // Y_n -> Y_{n+1}
  Rational cond3;    // op_norm(g o f_n - incl_x), <= eps_n
  Rational cond4;    // op_norm(f_next o g - incl_y), <= eps_{n+1}
  Rational g_defect;
  Rational f_next_defect;
  Rational drift;        // op_norm(f_next|X_n - f_n)
  Rational drift_limit;  // eps_n + 2 eps_n eps_{n+1} + eps_{n+1}
};

struct BackAndForthTrace {
  EpsilonSchedule schedule;
  PolyhedralSpace X0, Y0;
  LinearMap f0;
  Rational f0_defect;
  std::vector<BackAndForthStep> steps;
  Rational final_distance;  // op_norm(f_N|X0 - f0), < target_eps
  Rational drift_total;     // sum of per-step drifts
};

namespace detail {

struct Tracked {
  LinearMap into_stage;  // subspace -> chain stage
  std::size_t stage;
};

inline LinearMap lift_to_top(const ChainSpace& chain, const Tracked& t) {
  if (t.stage + 1 == chain.size()) return t.into_stage;
  return compose(chain.embedding_to_top(t.stage), t.into_stage);
}

/// Smallest subspace of the chain top containing all the given blocks of
/// column vectors (greedy independent selection in the given order).
inline SubspaceResult span_in_top(const ChainSpace& chain, const std::vector<Mat>& blocks) {
  const Eigen::Index d = chain.top().dimension();
  Eigen::Index total = 0;
  for (const auto& b : blocks) total += b.cols();
  Mat all(d, total);
  Eigen::Index c = 0;
  for (const auto& b : blocks) {
    if (b.rows() != d) throw std::invalid_argument("span_in_top: block dimension mismatch");
    all.block(0, c, d, b.cols()) = b;
    c += b.cols();
  }
  Mat basis = columns_subset(all, greedy_independent_columns(all));
  return subspace(chain.top(), basis);
}

}  // namespace detail

/// The certified back-and-forth between two chains. The seed is an
/// eps_0-isometry from a subspace X of E's stage 0 into F's stage 0; the
/// induction alternates approximate inverses against the two chains,
/// enlarging domains by the next unconsumed presentation stage on each side.
/// Every step certifies the four induction conditions and the drift bound
/// exactly; the final map is within schedule.target_eps of the seed.
inline BackAndForthTrace back_and_forth(ChainSpace& E, ChainSpace& F, const PolyhedralSpace& X,
                                        const LinearMap& incl0, const LinearMap& f,
                                        const EpsilonSchedule& schedule) {
  if (!incl0.domain().same_space(X) || !incl0.codomain().same_space(E.stage(0)))
    throw std::invalid_argument("back_and_forth: X does not sit in E's stage 0");
  if (!incl0.exact_isometry()) throw std::invalid_argument("back_and_forth: X is not isometric in E's stage 0");
  if (!f.domain().same_space(X) || !f.codomain().same_space(F.stage(0)))
    throw std::invalid_argument("back_and_forth: seed map does not run X -> F stage 0");
  if (schedule.terms.empty()) throw std::invalid_argument("back_and_forth: empty schedule");

  BackAndForthTrace trace{schedule,
                          X,
                          PolyhedralSpace::trivial(),
                          f,
                          f.defect().epsilon_star,
                          {},
                          Rational(0),
                          Rational(0)};

  // Y0 = f[X] with the induced norm; the seed factors exactly through it.
  SubspaceResult y0 = subspace(F.stage(0), f.matrix());
  LinearMap f_n(X, y0.space, Mat::Identity(X.dimension(), X.dimension()));
  trace.Y0 = y0.space;
  trace.f0 = f_n;
  trace.f0_defect = f_n.defect().epsilon_star;
  if (!(trace.f0_defect < schedule.terms[0]))
    throw std::invalid_argument("back_and_forth: seed defect " + rational_to_string(trace.f0_defect) +
                                " is not below eps_0 = " + rational_to_string(schedule.terms[0]));

  detail::Tracked trX{compose(E.embedding(0, 0), incl0), 0};
  detail::Tracked trY{y0.inclusion, 0};
  PolyhedralSpace X_n = X, Y_n = y0.space;
  std::size_t consumed_E = 1, consumed_F = 1;
  const std::size_t pres_E = E.presentation_size(), pres_F = F.presentation_size();

  LinearMap incl_x_total = identity_map(X_n);  // X0 -> X_n composed
  LinearMap incl_y_total = identity_map(Y_n);

  const std::size_t depth = schedule.depth;
  for (std::size_t n = 0; n < depth; ++n) {
    const Rational& eps_n = schedule.terms.at(n);
    const Rational& eps_n1 = schedule.terms.at(n + 1);

    // Backward: g approximately inverts f_n against E.
    ApproximateInverseResult back =
        approximate_inverse(E, X_n, detail::lift_to_top(E, trX), Y_n, f_n, eps_n, eps_n1);
    trX = detail::Tracked{back.incl_x_new, E.size() - 1};

    if (consumed_E >= pres_E)
      throw std::invalid_argument("back_and_forth: chain E exhausted before depth (needs stage " +
                                  std::to_string(consumed_E) + ")");
    SubspaceResult xn1 = detail::span_in_top(
        E, {detail::lift_to_top(E, trX).matrix(), back.g.matrix(), E.embedding_to_top(consumed_E).matrix()});
    ++consumed_E;
    LinearMap g_n(Y_n, xn1.space, solve_exact(xn1.inclusion.matrix(), back.g.matrix()));
    LinearMap incl_x(X_n, xn1.space, solve_exact(xn1.inclusion.matrix(), detail::lift_to_top(E, trX).matrix()));
    if (!incl_x.exact_isometry()) throw std::logic_error("back_and_forth: X_n inclusion lost isometry");
    Rational cond3 = map_distance(compose(g_n, f_n), incl_x);
    if (cond3 != back.distance) throw std::logic_error("back_and_forth: condition (3) value changed under rebase");
    Rational g_defect = g_n.defect().epsilon_star;
    if (!(g_defect < eps_n1)) throw std::logic_error("back_and_forth: condition (2) failed");
    trX = detail::Tracked{xn1.inclusion, E.size() - 1};

    // Forward: f_{n+1} approximately inverts g_n against F.
    ApproximateInverseResult forth =
        approximate_inverse(F, Y_n, detail::lift_to_top(F, trY), xn1.space, g_n, eps_n1, eps_n1);
    trY = detail::Tracked{forth.incl_x_new, F.size() - 1};

    if (consumed_F >= pres_F)
      throw std::invalid_argument("back_and_forth: chain F exhausted before depth (needs stage " +
                                  std::to_string(consumed_F) + ")");
    SubspaceResult yn1 = detail::span_in_top(
        F, {detail::lift_to_top(F, trY).matrix(), forth.g.matrix(), F.embedding_to_top(consumed_F).matrix()});
    ++consumed_F;
    LinearMap f_next(xn1.space, yn1.space, solve_exact(yn1.inclusion.matrix(), forth.g.matrix()));
    LinearMap incl_y(Y_n, yn1.space, solve_exact(yn1.inclusion.matrix(), detail::lift_to_top(F, trY).matrix()));
    if (!incl_y.exact_isometry()) throw std::logic_error("back_and_forth: Y_n inclusion lost isometry");
    Rational cond4 = map_distance(compose(f_next, g_n), incl_y);
    if (cond4 != forth.distance) throw std::logic_error("back_and_forth: condition (4) value changed under rebase");
    Rational f_next_defect = f_next.defect().epsilon_star;
    if (!(f_next_defect < eps_n1)) throw std::logic_error("back_and_forth: condition (1) failed");
    trY = detail::Tracked{yn1.inclusion, F.size() - 1};

    Rational drift = map_distance(compose(f_next, incl_x), compose(incl_y, f_n));
    Rational limit = drift_bound(schedule, n);
    if (!(drift <= limit)) throw std::logic_error("back_and_forth: drift bound failed at step " + std::to_string(n));

    trace.steps.push_back(BackAndForthStep{xn1.space, yn1.space, g_n, f_next, incl_x, incl_y, cond3, cond4,
                                           g_defect, f_next_defect, drift, limit});
    trace.drift_total += drift;

    incl_x_total = compose(incl_x, incl_x_total);
    incl_y_total = compose(incl_y, incl_y_total);
    X_n = xn1.space;
    Y_n = yn1.space;
    f_n = f_next;
  }

  trace.final_distance = map_distance(compose(f_n, incl_x_total), compose(incl_y_total, trace.f0));
  if (!(trace.final_distance <= trace.drift_total))
    throw std::logic_error("back_and_forth: telescoping inequality failed");
  if (!(trace.final_distance < schedule.target_eps))
    throw std::logic_error("back_and_forth: final distance failed the target bound");
  return trace;
}

/// One step of the universal embedding: f_next extends the previous map up to
/// a certified drift < 2 * 2^-n, with defect threshold halving each step.
struct EmbedStep {
  PolyhedralSpace X_next;
  LinearMap f_next;   // X_{n+1} -> G stage recorded in `g_stage`
  LinearMap incl_x;   // X_n -> X_{n+1}
  LinearMap incl_g;   // previous G stage -> this G stage (exact isometry)
  std::size_t g_stage;
  Rational threshold;      // 2^-(n+1), exact defect bound for f_next
  Rational f_next_defect;  // actual defect (0: the oracle serves exactly)
  Rational step_distance;  // |g restricted to X_n - f_n|, < 2^-n
  Rational drift;          // |f_next restricted to X_n - f_n| in the new top
  Rational drift_limit;    // (1 + 2^-(n+1)) * 2^-n, itself <= 2 * 2^-n
};

struct EmbedTrace {
  PolyhedralSpace X0;
  std::vector<EmbedStep> steps;
};

/// Embeds the chain presentation of a space into the extension chain G:
/// f_0 = 0 on the zero-dimensional stage, and each step extends isometrically
/// through the pushout and re-glues into G with tolerance 2^-(n+1). When the
/// presented chain is shorter than the requested depth its top stage repeats
/// (the stationary presentation of a finite-dimensional space).
inline EmbedTrace embed_universal(const ChainSpace& X_chain, ChainSpace& G, std::size_t depth) {
  if (X_chain.stage(0).dimension() != 0)
    throw std::invalid_argument("embed_universal: stage 0 of the presented chain must be zero-dimensional");

  EmbedTrace trace{X_chain.stage(0), {}};
  PolyhedralSpace X_n = X_chain.stage(0);
  std::size_t f_stage = G.size() - 1;
  LinearMap f_n(X_n, G.stage(f_stage), Mat(G.stage(f_stage).dimension(), 0));

  for (std::size_t n = 0; n < depth; ++n) {
    const Rational tol = pow2_inv(static_cast<long>(n));
    const Rational tol_next = pow2_inv(static_cast<long>(n) + 1);

    PolyhedralSpace X_next;
    LinearMap incl_x = identity_map(X_n);
    if (n + 1 < X_chain.size()) {
      X_next = X_chain.stage(n + 1);
      incl_x = X_chain.inclusion(n);
    } else {
      X_next = X_n;  // stationary tail of a finite-dimensional presentation
    }

    // Y = image of f_n with the induced norm; f_n factors through it exactly.
    SubspaceResult y = subspace(G.stage(f_stage), f_n.matrix());
    LinearMap f_hat(X_n, y.space, Mat::Identity(X_n.dimension(), X_n.dimension()));
    LinearMap incl_y_top = compose(G.embedding_to_top(f_stage), y.inclusion);

    ExtensionResult ext = extend_isometry(X_n, X_next, incl_x, y.space, f_hat, tol);
    LinearMap h = gurarii_extend(G, y.space, incl_y_top, ext.Y1, ext.y_embed, tol_next);
    LinearMap f_next = compose(h, ext.g);
    Rational f_next_defect = f_next.defect().epsilon_star;
    if (!(f_next_defect <= tol_next)) throw std::logic_error("embed_universal: defect threshold failed");

    LinearMap incl_g = G.embedding(f_stage, G.size() - 1);
    LinearMap f_n_lifted = compose(incl_g, f_n);
    Rational drift = map_distance(compose(f_next, incl_x), f_n_lifted);
    if (drift != ext.distance) throw std::logic_error("embed_universal: drift does not match the extension distance");
    const Rational limit = (1 + tol_next) * tol;
    if (!(drift < limit) || !(limit <= 2 * tol)) throw std::logic_error("embed_universal: drift bound failed");

    f_stage = G.size() - 1;
    trace.steps.push_back(
        EmbedStep{X_next, f_next, incl_x, incl_g, f_stage, tol_next, f_next_defect, ext.distance, drift, limit});
    X_n = X_next;
    f_n = f_next;
  }
  return trace;
}

}  // namespace polybanach
