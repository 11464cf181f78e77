#pragma once

#include "polybanach/linalg.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace polybanach {

enum class LpSense { maximize, minimize };

/// max/min c.x  subject to  A x <= b  and  E x = e.
/// Variables are free unless flagged in `nonneg` (empty means all free).
struct LinearProgram {
  Mat A;
  Vec b;
  Mat E;
  Vec e;
  Vec c;
  LpSense sense = LpSense::maximize;
  std::vector<std::uint8_t> nonneg;

  Eigen::Index num_vars() const { return c.size(); }
  bool var_nonneg(Eigen::Index j) const {
    return !nonneg.empty() && nonneg[static_cast<std::size_t>(j)] != 0;
  }
};

class LpInfeasible : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class LpUnbounded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Optimal point plus exact dual multipliers. Sign convention: for a maximize
/// program dual_ineq >= 0, for minimize dual_ineq <= 0; in both cases the
/// stationarity condition A^T dual_ineq + E^T dual_eq = c holds on free
/// variables and the dual objective b.dual_ineq + e.dual_eq equals `value`.
struct LpSolution {
  Rational value;
  Vec x;
  Vec dual_ineq;
  Vec dual_eq;
};

/// Exact optimality certificate: primal feasibility, dual sign and
/// stationarity, complementary slackness, and equality of both objectives.
inline bool lp_certificate_ok(const LinearProgram& p, const LpSolution& s, std::string* why = nullptr) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  const Eigen::Index n = p.num_vars();
  if (s.x.size() != n || s.dual_ineq.size() != p.A.rows() || s.dual_eq.size() != p.E.rows())
    return fail("certificate shape mismatch");
  // Primal feasibility.
  Vec ax = p.A.rows() > 0 ? Vec(p.A * s.x) : Vec(0);
  for (Eigen::Index i = 0; i < p.A.rows(); ++i)
    if (ax(i) > p.b(i)) return fail("primal infeasible on inequality row " + std::to_string(i));
  if (p.E.rows() > 0 && p.E * s.x != p.e) return fail("primal infeasible on equality rows");
  for (Eigen::Index j = 0; j < n; ++j)
    if (p.var_nonneg(j) && s.x(j) < 0) return fail("primal sign violation");
  // Dual sign.
  for (Eigen::Index i = 0; i < p.A.rows(); ++i) {
    if (p.sense == LpSense::maximize && s.dual_ineq(i) < 0) return fail("dual sign violation");
    if (p.sense == LpSense::minimize && s.dual_ineq(i) > 0) return fail("dual sign violation");
  }
  // Stationarity and complementary slackness on variables.
  Vec red = p.c;
  if (p.A.rows() > 0) red -= p.A.transpose() * s.dual_ineq;
  if (p.E.rows() > 0) red -= p.E.transpose() * s.dual_eq;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (!p.var_nonneg(j)) {
      if (red(j) != 0) return fail("stationarity violated on free variable " + std::to_string(j));
    } else {
      if (p.sense == LpSense::maximize && red(j) > 0) return fail("dual infeasible on variable " + std::to_string(j));
      if (p.sense == LpSense::minimize && red(j) < 0) return fail("dual infeasible on variable " + std::to_string(j));
      if (red(j) != 0 && s.x(j) != 0) return fail("complementary slackness violated on variable " + std::to_string(j));
    }
  }
  // Complementary slackness on rows.
  for (Eigen::Index i = 0; i < p.A.rows(); ++i)
    if (s.dual_ineq(i) != 0 && ax(i) != p.b(i)) return fail("complementary slackness violated on row " + std::to_string(i));
  // Objective values.
  if (p.c.dot(s.x) != s.value) return fail("primal objective mismatch");
  Rational dual_value = s.dual_ineq.size() > 0 ? p.b.dot(s.dual_ineq) : Rational(0);
  if (s.dual_eq.size() > 0) dual_value += p.e.dot(s.dual_eq);
  if (dual_value != s.value) return fail("dual objective mismatch");
  return true;
}

namespace detail {

// Two-phase tableau simplex on the standardized program. Bland's smallest
// index rule for entering and leaving variables; no cycling, fully
// deterministic. All arithmetic exact.
class SimplexTableau {
 public:
  explicit SimplexTableau(const LinearProgram& p) : p_(p) {
    build();
  }

  LpSolution solve() {
    // Phase 1: minimize the sum of artificials.
    std::vector<Rational> cost(static_cast<std::size_t>(total_cols_), Rational(0));
    for (Eigen::Index r = 0; r < m_; ++r) cost[static_cast<std::size_t>(art_col_[r])] = 1;
    run_phase(cost, /*allow_artificials=*/true);
    if (objective_value(cost) != 0)
      throw LpInfeasible("linear program infeasible");
    pivot_out_artificials();
    // Phase 2: the real objective (internally minimized).
    std::vector<Rational> cost2(static_cast<std::size_t>(total_cols_), Rational(0));
    for (Eigen::Index j = 0; j < p_.num_vars(); ++j) {
      Rational cj = p_.sense == LpSense::maximize ? Rational(-p_.c(j)) : Rational(p_.c(j));
      cost2[static_cast<std::size_t>(plus_col_[j])] = cj;
      if (minus_col_[j] >= 0) cost2[static_cast<std::size_t>(minus_col_[j])] = -cj;
    }
    run_phase(cost2, /*allow_artificials=*/false);
    return extract(cost2);
  }

 private:
  void build() {
    const Eigen::Index n = p_.num_vars();
    mi_ = p_.A.rows();
    me_ = p_.E.rows();
    m_ = mi_ + me_;
    plus_col_.resize(n);
    minus_col_.resize(n);
    Eigen::Index col = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      plus_col_[j] = col++;
      minus_col_[j] = p_.var_nonneg(j) ? -1 : col++;
    }
    slack_col_.resize(mi_);
    for (Eigen::Index i = 0; i < mi_; ++i) slack_col_[i] = col++;
    art_col_.resize(m_);
    for (Eigen::Index r = 0; r < m_; ++r) art_col_[r] = col++;
    total_cols_ = col;

    tab_.assign(static_cast<std::size_t>(m_),
                std::vector<Rational>(static_cast<std::size_t>(total_cols_), Rational(0)));
    rhs_.assign(static_cast<std::size_t>(m_), Rational(0));
    row_sign_.assign(static_cast<std::size_t>(m_), Rational(1));
    basis_.resize(static_cast<std::size_t>(m_));

    for (Eigen::Index r = 0; r < m_; ++r) {
      const bool ineq = r < mi_;
      Rational rhs = ineq ? p_.b(r) : p_.e(r - mi_);
      Rational sign = rhs < 0 ? Rational(-1) : Rational(1);
      row_sign_[static_cast<std::size_t>(r)] = sign;
      auto& row = tab_[static_cast<std::size_t>(r)];
      for (Eigen::Index j = 0; j < n; ++j) {
        Rational a = ineq ? p_.A(r, j) : p_.E(r - mi_, j);
        if (a == 0) continue;
        row[static_cast<std::size_t>(plus_col_[j])] = sign * a;
        if (minus_col_[j] >= 0) row[static_cast<std::size_t>(minus_col_[j])] = -sign * a;
      }
      if (ineq) row[static_cast<std::size_t>(slack_col_[r])] = sign;
      row[static_cast<std::size_t>(art_col_[r])] = 1;
      rhs_[static_cast<std::size_t>(r)] = sign * rhs;
      basis_[static_cast<std::size_t>(r)] = art_col_[r];
    }
  }

  Eigen::Index art_start() const { return art_col_.empty() ? total_cols_ : art_col_[0]; }

  std::vector<Rational> reduced_costs(const std::vector<Rational>& cost) const {
    std::vector<Rational> red = cost;
    for (Eigen::Index r = 0; r < m_; ++r) {
      const Rational cb = cost[static_cast<std::size_t>(basis_[static_cast<std::size_t>(r)])];
      if (cb == 0) continue;
      const auto& row = tab_[static_cast<std::size_t>(r)];
      for (Eigen::Index j = 0; j < total_cols_; ++j)
        if (row[static_cast<std::size_t>(j)] != 0) red[static_cast<std::size_t>(j)] -= cb * row[static_cast<std::size_t>(j)];
    }
    return red;
  }

  Rational objective_value(const std::vector<Rational>& cost) const {
    Rational v(0);
    for (Eigen::Index r = 0; r < m_; ++r)
      v += cost[static_cast<std::size_t>(basis_[static_cast<std::size_t>(r)])] * rhs_[static_cast<std::size_t>(r)];
    return v;
  }

  void run_phase(const std::vector<Rational>& cost, bool allow_artificials) {
    red_ = reduced_costs(cost);
    for (;;) {
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < total_cols_; ++j) {
        if (!allow_artificials && j >= art_start()) break;
        if (red_[static_cast<std::size_t>(j)] < 0) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return;
      Eigen::Index leave = -1;
      Rational best_ratio(0);
      for (Eigen::Index r = 0; r < m_; ++r) {
        const Rational& a = tab_[static_cast<std::size_t>(r)][static_cast<std::size_t>(enter)];
        if (a <= 0) continue;
        Rational ratio = rhs_[static_cast<std::size_t>(r)] / a;
        if (leave < 0 || ratio < best_ratio ||
            (ratio == best_ratio && basis_[static_cast<std::size_t>(r)] < basis_[static_cast<std::size_t>(leave)])) {
          leave = r;
          best_ratio = ratio;
        }
      }
      if (leave < 0) throw LpUnbounded("linear program unbounded");
      pivot(leave, enter);
    }
  }

  void pivot(Eigen::Index r, Eigen::Index s) {
    auto& prow = tab_[static_cast<std::size_t>(r)];
    const Rational piv = prow[static_cast<std::size_t>(s)];
    for (auto& v : prow) v /= piv;
    rhs_[static_cast<std::size_t>(r)] /= piv;
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (i == r) continue;
      auto& row = tab_[static_cast<std::size_t>(i)];
      const Rational f = row[static_cast<std::size_t>(s)];
      if (f == 0) continue;
      for (Eigen::Index j = 0; j < total_cols_; ++j)
        if (prow[static_cast<std::size_t>(j)] != 0) row[static_cast<std::size_t>(j)] -= f * prow[static_cast<std::size_t>(j)];
      rhs_[static_cast<std::size_t>(i)] -= f * rhs_[static_cast<std::size_t>(r)];
    }
    const Rational fobj = red_[static_cast<std::size_t>(s)];
    if (fobj != 0) {
      for (Eigen::Index j = 0; j < total_cols_; ++j)
        if (prow[static_cast<std::size_t>(j)] != 0) red_[static_cast<std::size_t>(j)] -= fobj * prow[static_cast<std::size_t>(j)];
    }
    basis_[static_cast<std::size_t>(r)] = s;
  }

  void pivot_out_artificials() {
    for (Eigen::Index r = 0; r < m_; ++r) {
      if (basis_[static_cast<std::size_t>(r)] < art_start()) continue;
      // Basic artificial sits at value 0 here; pivot it out on any
      // non-artificial column, or leave the (redundant) row inert.
      for (Eigen::Index j = 0; j < art_start(); ++j) {
        if (tab_[static_cast<std::size_t>(r)][static_cast<std::size_t>(j)] != 0) {
          pivot(r, j);
          break;
        }
      }
    }
  }

  LpSolution extract(const std::vector<Rational>& cost) {
    LpSolution sol;
    std::vector<Rational> z(static_cast<std::size_t>(total_cols_), Rational(0));
    for (Eigen::Index r = 0; r < m_; ++r)
      z[static_cast<std::size_t>(basis_[static_cast<std::size_t>(r)])] = rhs_[static_cast<std::size_t>(r)];
    const Eigen::Index n = p_.num_vars();
    sol.x = Vec::Zero(n);
    for (Eigen::Index j = 0; j < n; ++j) {
      sol.x(j) = z[static_cast<std::size_t>(plus_col_[j])];
      if (minus_col_[j] >= 0) sol.x(j) -= z[static_cast<std::size_t>(minus_col_[j])];
    }
    sol.value = p_.c.size() > 0 ? Rational(p_.c.dot(sol.x)) : Rational(0);
    // The reduced cost of the artificial of row r is -y_r for the internal
    // minimization; undo the internal row scaling and sense flip.
    red_ = reduced_costs(cost);
    sol.dual_ineq = Vec::Zero(mi_);
    sol.dual_eq = Vec::Zero(me_);
    for (Eigen::Index r = 0; r < m_; ++r) {
      Rational y = -red_[static_cast<std::size_t>(art_col_[r])] * row_sign_[static_cast<std::size_t>(r)];
      if (p_.sense == LpSense::maximize) y = -y;
      if (r < mi_)
        sol.dual_ineq(r) = y;
      else
        sol.dual_eq(r - mi_) = y;
    }
    return sol;
  }

  const LinearProgram& p_;
  Eigen::Index mi_ = 0, me_ = 0, m_ = 0, total_cols_ = 0;
  std::vector<Eigen::Index> plus_col_, minus_col_, slack_col_, art_col_;
  std::vector<std::vector<Rational>> tab_;
  std::vector<Rational> rhs_, red_;
  std::vector<Rational> row_sign_;
  std::vector<Eigen::Index> basis_;
};

inline LpSolution lp_solve_direct(const LinearProgram& p) {
  const Eigen::Index n = p.num_vars();
  if (n == 0) {
    for (Eigen::Index i = 0; i < p.b.size(); ++i)
      if (p.b(i) < 0) throw LpInfeasible("linear program infeasible");
    for (Eigen::Index i = 0; i < p.e.size(); ++i)
      if (p.e(i) != 0) throw LpInfeasible("linear program infeasible");
    return LpSolution{Rational(0), Vec(0), Vec::Zero(p.A.rows()), Vec::Zero(p.E.rows())};
  }
  SimplexTableau tab(p);
  LpSolution sol = tab.solve();
  std::string why;
  if (!lp_certificate_ok(p, sol, &why)) throw std::logic_error("lp_solve internal certificate failure: " + why);
  return sol;
}

// Dual of a maximize program; rows of the dual correspond to primal variables.
inline LinearProgram build_dual_of_max(const LinearProgram& p) {
  const Eigen::Index n = p.num_vars();
  const Eigen::Index mi = p.A.rows();
  const Eigen::Index me = p.E.rows();
  std::vector<Eigen::Index> eq_rows, ineq_rows;
  for (Eigen::Index j = 0; j < n; ++j)
    (p.var_nonneg(j) ? ineq_rows : eq_rows).push_back(j);
  LinearProgram d;
  d.sense = LpSense::minimize;
  d.c = Vec(mi + me);
  if (mi > 0) d.c.head(mi) = p.b;
  if (me > 0) d.c.tail(me) = p.e;
  d.nonneg.assign(static_cast<std::size_t>(mi + me), 0);
  for (Eigen::Index i = 0; i < mi; ++i) d.nonneg[static_cast<std::size_t>(i)] = 1;
  d.E = Mat(static_cast<Eigen::Index>(eq_rows.size()), mi + me);
  d.e = Vec(static_cast<Eigen::Index>(eq_rows.size()));
  for (std::size_t k = 0; k < eq_rows.size(); ++k) {
    const Eigen::Index j = eq_rows[k];
    for (Eigen::Index i = 0; i < mi; ++i) d.E(static_cast<Eigen::Index>(k), i) = p.A(i, j);
    for (Eigen::Index l = 0; l < me; ++l) d.E(static_cast<Eigen::Index>(k), mi + l) = p.E(l, j);
    d.e(static_cast<Eigen::Index>(k)) = p.c(j);
  }
  d.A = Mat(static_cast<Eigen::Index>(ineq_rows.size()), mi + me);
  d.b = Vec(static_cast<Eigen::Index>(ineq_rows.size()));
  for (std::size_t k = 0; k < ineq_rows.size(); ++k) {
    const Eigen::Index j = ineq_rows[k];
    for (Eigen::Index i = 0; i < mi; ++i) d.A(static_cast<Eigen::Index>(k), i) = -p.A(i, j);
    for (Eigen::Index l = 0; l < me; ++l) d.A(static_cast<Eigen::Index>(k), mi + l) = -p.E(l, j);
    d.b(static_cast<Eigen::Index>(k)) = -p.c(j);
  }
  return d;
}

inline LpSolution lp_solve_via_dual(const LinearProgram& p) {
  // p must be a maximize program here.
  LinearProgram d = build_dual_of_max(p);
  LpSolution ds;
  try {
    ds = lp_solve_direct(d);
  } catch (const LpUnbounded&) {
    throw LpInfeasible("linear program infeasible");
  }
  const Eigen::Index n = p.num_vars();
  const Eigen::Index mi = p.A.rows();
  LpSolution sol;
  sol.x = Vec::Zero(n);
  Eigen::Index eq_k = 0, ineq_k = 0;
  for (Eigen::Index j = 0; j < n; ++j) {
    if (p.var_nonneg(j))
      sol.x(j) = -ds.dual_ineq(ineq_k++);
    else
      sol.x(j) = ds.dual_eq(eq_k++);
  }
  sol.value = p.c.dot(sol.x);
  sol.dual_ineq = ds.x.head(mi);
  sol.dual_eq = ds.x.tail(p.E.rows());
  std::string why;
  if (!lp_certificate_ok(p, sol, &why))
    throw std::logic_error("lp_solve dual-route certificate failure: " + why);
  return sol;
}

}  // namespace detail

/// Exact LP solve. Throws LpInfeasible / LpUnbounded; otherwise the returned
/// solution carries a verified optimality certificate.
inline LpSolution lp_solve(const LinearProgram& p) {
  if (p.A.rows() != p.b.size() || p.E.rows() != p.e.size() ||
      (p.A.rows() > 0 && p.A.cols() != p.num_vars()) ||
      (p.E.rows() > 0 && p.E.cols() != p.num_vars()))
    throw std::invalid_argument("lp_solve: inconsistent program shape");

  const bool minimize = p.sense == LpSense::minimize;
  LinearProgram q = p;
  if (minimize) {
    q.sense = LpSense::maximize;
    q.c = -p.c;
  }
  const Eigen::Index rows = q.A.rows() + q.E.rows();
  Eigen::Index width = 0;
  for (Eigen::Index j = 0; j < q.num_vars(); ++j) width += q.var_nonneg(j) ? 1 : 2;
  LpSolution sol;
  if (q.num_vars() > 0 && rows > 3 * width + 8 && rows > 16) {
    try {
      sol = detail::lp_solve_via_dual(q);
    } catch (const LpInfeasible&) {
      // The dual can be infeasible both when q is unbounded and when q is
      // infeasible; disambiguate by solving directly.
      sol = detail::lp_solve_direct(q);
    }
  } else {
    sol = detail::lp_solve_direct(q);
  }
  if (minimize) {
    sol.value = -sol.value;
    sol.dual_ineq = -sol.dual_ineq;
    sol.dual_eq = -sol.dual_eq;
    std::string why;
    if (!lp_certificate_ok(p, sol, &why)) throw std::logic_error("lp_solve certificate failure: " + why);
  }
  return sol;
}

}  // namespace polybanach
