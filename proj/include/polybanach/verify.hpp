#pragma once

#include "polybanach/json_io.hpp"

#include <string>
#include <vector>

namespace polybanach {

struct CheckResult {
  std::string name;
  bool pass;
  std::string detail;
};

struct VerifyReport {
  std::vector<CheckResult> checks;
  bool all_pass() const {
    for (const auto& c : checks)
      if (!c.pass) return false;
    return true;
  }
  void add(std::string name, bool pass, std::string detail = "") {
    checks.push_back(CheckResult{std::move(name), pass, std::move(detail)});
  }
};

namespace detail {

/// Consistency of a deserialized space, from its own data only: vertices are
/// genuine (feasible and tight on enough independent rows), every facet is
/// supported, the systems are symmetric, and the dual vertices are exactly
/// the canonical facet normals.
inline void check_space(VerifyReport& rep, const std::string& label, const PolyhedralSpace& s) {
  if (s.dimension() == 0) {
    rep.add(label + ": zero-dimensional space",
            s.ball_vertices().points().empty() && s.ball_facets().rows().empty());
    return;
  }
  bool verts_ok = !s.ball_vertices().points().empty();
  for (const auto& v : s.ball_vertices().points())
    if (!vertex_certified(s.ball_facets(), v)) verts_ok = false;
  rep.add(label + ": vertices certified against facets", verts_ok);

  bool facets_supported = true;
  for (const auto& r : s.ball_facets().rows()) {
    bool tight = false;
    for (const auto& v : s.ball_vertices().points())
      if (r.normal.dot(v) == r.offset) {
        tight = true;
        break;
      }
    if (!tight) facets_supported = false;
  }
  rep.add(label + ": facets supported by vertices", facets_supported);
  rep.add(label + ": ball symmetric",
          s.ball_vertices().canonical().is_symmetric() && s.ball_facets().canonical().is_symmetric());

  VertexSystem expected_duals(s.dimension());
  for (const auto& r : s.ball_facets().rows()) expected_duals.add(r.normal);
  rep.add(label + ": dual vertices equal canonical facet normals",
          expected_duals.canonical() == s.dual_vertices().canonical());
}

inline void check_exact_isometry(VerifyReport& rep, const std::string& label, const LinearMap& m) {
  LinearMap fresh(m.domain(), m.codomain(), m.matrix());
  rep.add(label, fresh.epsilon_star() == 0,
          "recomputed defect " + rational_to_string(fresh.defect().epsilon_star));
}

}  // namespace detail

/// Re-derives an amalgamation certificate from its serialized witnesses: the
/// spaces are checked internally, the defects of i and j are recomputed by
/// the kernel (vertex maxima and facet LPs), the seed defect and the bound
/// are recomputed and compared with the claimed exact values.
inline VerifyReport verify_amalgam_certificate(const ParsedAmalgamCertificate& c) {
  VerifyReport rep;
  detail::check_space(rep, "space X", c.X);
  detail::check_space(rep, "space Y", c.Y);
  detail::check_space(rep, "space Z", c.Z);
  LinearMap f(c.X, c.Y, c.f), i(c.X, c.Z, c.i), j(c.Y, c.Z, c.j);
  Rational defect_f = c.X.dimension() > 0 ? f.defect().epsilon_star : Rational(0);
  rep.add("defect(f) matches claim", defect_f == c.defect_f,
          "recomputed " + rational_to_string(defect_f) + ", claimed " + rational_to_string(c.defect_f));
  rep.add("eps exceeds defect(f)", c.epsilon_used > defect_f);
  detail::check_exact_isometry(rep, "i is an exact isometry", i);
  detail::check_exact_isometry(rep, "j is an exact isometry", j);
  Rational bound = map_distance(compose(j, f), i);
  rep.add("bound_achieved matches recomputation", bound == c.bound_achieved,
          "recomputed " + rational_to_string(bound) + ", claimed " + rational_to_string(c.bound_achieved));
  rep.add("bound_achieved <= eps", bound <= c.epsilon_used);
  rep.add("dim Z = dim X + dim Y", c.Z.dimension() == c.X.dimension() + c.Y.dimension());
  return rep;
}

/// Re-checks a back-and-forth trace: the schedule's closed-form budget, each
/// step's four induction values, the drift rows, every inclusion's isometry
/// certificate, and the final telescoped distance. Constructions never
/// re-run; only kernel recomputations on the serialized data.
inline VerifyReport verify_back_and_forth_trace(const BackAndForthTrace& t) {
  VerifyReport rep;
  const EpsilonSchedule& s = t.schedule;
  {
    bool terms_ok = s.terms.size() == s.depth + 1 && !s.terms.empty();
    Rational expect = s.eps0;
    for (std::size_t n = 0; terms_ok && n < s.terms.size(); ++n) {
      if (s.terms[n] != expect || !(s.terms[n] > 0)) terms_ok = false;
      expect *= s.ratio;
    }
    rep.add("schedule: terms are the declared geometric sequence", terms_ok);
    EpsilonSchedule re = schedule_make(s.target_eps, s.eps0, s.ratio, s.depth);
    rep.add("schedule: budget closed form matches", re.budget_lhs == s.budget_lhs && re.slack == s.slack);
    rep.add("schedule: budget inequality holds", s.budget_lhs < s.target_eps - s.eps0);
    rep.add("schedule: tail bound matches", re.tail_bound == s.tail_bound);
  }
  detail::check_space(rep, "X0", t.X0);
  detail::check_space(rep, "Y0", t.Y0);
  {
    Rational d = t.X0.dimension() > 0 ? t.f0.defect().epsilon_star : Rational(0);
    rep.add("seed defect matches claim", d == t.f0_defect);
    rep.add("seed defect below eps_0", d < s.terms.at(0));
  }

  LinearMap f_n = t.f0;
  LinearMap incl_x_total = identity_map(t.X0);
  LinearMap incl_y_total = identity_map(t.Y0);
  Rational drift_sum(0);
  for (std::size_t n = 0; n < t.steps.size(); ++n) {
    const auto& st = t.steps[n];
    const std::string tag = "step " + std::to_string(n);
    detail::check_space(rep, tag + ": X_next", st.X_next);
    detail::check_space(rep, tag + ": Y_next", st.Y_next);
    detail::check_exact_isometry(rep, tag + ": X inclusion is an exact isometry", st.incl_x);
    detail::check_exact_isometry(rep, tag + ": Y inclusion is an exact isometry", st.incl_y);
    Rational gd = st.g.defect().epsilon_star;
    rep.add(tag + ": condition (2) defect matches and is below eps_{n+1}",
            gd == st.g_defect && gd < s.terms.at(n + 1));
    Rational fd = st.f_next.defect().epsilon_star;
    rep.add(tag + ": condition (1) defect matches and is below eps_{n+1}",
            fd == st.f_next_defect && fd < s.terms.at(n + 1));
    Rational c3 = map_distance(compose(st.g, f_n), st.incl_x);
    rep.add(tag + ": condition (3) value matches and is within eps_n",
            c3 == st.cond3 && c3 <= s.terms.at(n),
            "recomputed " + rational_to_string(c3));
    Rational c4 = map_distance(compose(st.f_next, st.g), st.incl_y);
    rep.add(tag + ": condition (4) value matches and is within eps_{n+1}",
            c4 == st.cond4 && c4 <= s.terms.at(n + 1));
    Rational dr = map_distance(compose(st.f_next, st.incl_x), compose(st.incl_y, f_n));
    Rational limit = drift_bound(s, n);
    rep.add(tag + ": drift matches and respects the step bound",
            dr == st.drift && limit == st.drift_limit && dr <= limit,
            "recomputed " + rational_to_string(dr) + " <= " + rational_to_string(limit));
    drift_sum += dr;
    incl_x_total = compose(st.incl_x, incl_x_total);
    incl_y_total = compose(st.incl_y, incl_y_total);
    f_n = st.f_next;
  }
  rep.add("drift total matches", drift_sum == t.drift_total);
  Rational fin = map_distance(compose(f_n, incl_x_total), compose(incl_y_total, t.f0));
  rep.add("final distance matches recomputation", fin == t.final_distance,
          "recomputed " + rational_to_string(fin));
  rep.add("final distance telescopes below the drift total", fin <= drift_sum);
  rep.add("final distance below target", fin < s.target_eps);
  return rep;
}

/// Re-checks a universal-embedding trace: per-step thresholds 2^-(n+1),
/// recomputed defects, recomputed drifts against (1 + 2^-(n+1)) 2^-n, and the
/// exactness of every chain inclusion.
inline VerifyReport verify_embed_trace(const EmbedTrace& t) {
  VerifyReport rep;
  rep.add("X0 is zero-dimensional", t.X0.dimension() == 0);
  LinearMap f_n(t.X0, t.steps.empty() ? PolyhedralSpace::trivial() : t.steps.front().incl_g.domain(),
                Mat(t.steps.empty() ? 0 : t.steps.front().incl_g.domain().dimension(), 0));
  for (std::size_t n = 0; n < t.steps.size(); ++n) {
    const auto& st = t.steps[n];
    const std::string tag = "step " + std::to_string(n);
    const Rational tol = pow2_inv(static_cast<long>(n));
    const Rational tol_next = pow2_inv(static_cast<long>(n) + 1);
    detail::check_space(rep, tag + ": X_next", st.X_next);
    detail::check_space(rep, tag + ": G stage", st.f_next.codomain());
    detail::check_exact_isometry(rep, tag + ": X inclusion is an exact isometry", st.incl_x);
    detail::check_exact_isometry(rep, tag + ": G inclusion is an exact isometry", st.incl_g);
    rep.add(tag + ": threshold is 2^-(n+1)", st.threshold == tol_next);
    Rational fd = st.X_next.dimension() > 0 ? st.f_next.defect().epsilon_star : Rational(0);
    rep.add(tag + ": defect matches and is within the threshold",
            fd == st.f_next_defect && fd <= tol_next,
            "recomputed " + rational_to_string(fd));
    rep.add(tag + ": step distance below 2^-n", st.step_distance < tol);
    Rational dr = map_distance(compose(st.f_next, st.incl_x), compose(st.incl_g, f_n));
    Rational limit = (1 + tol_next) * tol;
    rep.add(tag + ": drift matches and respects the step bound",
            dr == st.drift && st.drift_limit == limit && dr < limit && limit <= 2 * tol,
            "recomputed " + rational_to_string(dr));
    f_n = st.f_next;
  }
  return rep;
}

/// Dispatch on the "kind" field of a serialized artifact.
inline VerifyReport verify_json(const Json& j) {
  const std::string kind = j.is_object() ? j.value("kind", "") : "";
  if (kind == "amalgam_certificate") return verify_amalgam_certificate(amalgam_certificate_from_json(j));
  if (kind == "back_and_forth_trace") return verify_back_and_forth_trace(back_and_forth_trace_from_json(j));
  if (kind == "embed_trace") return verify_embed_trace(embed_trace_from_json(j));
  throw ParseError("verify: unsupported artifact kind '" + kind + "'");
}

}  // namespace polybanach
