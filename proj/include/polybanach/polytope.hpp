#pragma once

#include "polybanach/lp.hpp"

#include <algorithm>
#include <cstdint>
#include <cstdlib>
#include <iostream>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace polybanach {

/// One halfspace {x : <normal, x> <= offset}.
struct Halfspace {
  Vec normal;
  Rational offset;
};

/// A finite list of halfspaces in a fixed dimension. Rows are arbitrary until
/// canonicalized; polytope-level invariants (bounded, full-dimensional,
/// origin interior) are checked by the enumeration routines.
class HalfspaceSystem {
 public:
  HalfspaceSystem() = default;
  explicit HalfspaceSystem(Eigen::Index dimension) : dim_(dimension) {}
  HalfspaceSystem(Eigen::Index dimension, std::vector<Halfspace> rows)
      : dim_(dimension), rows_(std::move(rows)) {
    for (const auto& r : rows_)
      if (r.normal.size() != dim_) throw std::invalid_argument("halfspace dimension mismatch");
  }

  Eigen::Index dimension() const { return dim_; }
  const std::vector<Halfspace>& rows() const { return rows_; }
  void add(Vec normal, Rational offset) {
    if (normal.size() != dim_) throw std::invalid_argument("halfspace dimension mismatch");
    rows_.push_back({std::move(normal), std::move(offset)});
  }

  bool contains(const Vec& x) const {
    for (const auto& r : rows_)
      if (r.normal.dot(x) > r.offset) return false;
    return true;
  }

  /// Scales every row to a canonical representative (offset 1 when the offset
  /// is positive, -1 when negative, leading coefficient of absolute value 1
  /// when zero), deduplicates and sorts.
  HalfspaceSystem canonical() const {
    std::vector<Halfspace> out;
    out.reserve(rows_.size());
    for (const auto& r : rows_) {
      Vec n = r.normal;
      Rational off = r.offset;
      if (n.isZero()) {
        if (off < 0) throw std::invalid_argument("halfspace system contains an infeasible constant row");
        continue;  // trivially satisfied
      }
      if (off != 0) {
        Rational s = boost::multiprecision::abs(off);
        n /= s;
        off = off > 0 ? Rational(1) : Rational(-1);
      } else {
        Rational lead(0);
        for (Eigen::Index i = 0; i < n.size(); ++i)
          if (n(i) != 0) {
            lead = boost::multiprecision::abs(n(i));
            break;
          }
        n /= lead;
      }
      out.push_back({std::move(n), std::move(off)});
    }
    std::sort(out.begin(), out.end(), [](const Halfspace& a, const Halfspace& b) {
      if (a.offset != b.offset) return a.offset < b.offset;
      return lex_less(a.normal, b.normal);
    });
    out.erase(std::unique(out.begin(), out.end(),
                          [](const Halfspace& a, const Halfspace& b) {
                            return a.offset == b.offset && a.normal == b.normal;
                          }),
              out.end());
    return HalfspaceSystem(dim_, std::move(out));
  }

  bool operator==(const HalfspaceSystem& other) const {
    if (dim_ != other.dim_ || rows_.size() != other.rows_.size()) return false;
    for (std::size_t i = 0; i < rows_.size(); ++i)
      if (rows_[i].offset != other.rows_[i].offset || rows_[i].normal != other.rows_[i].normal) return false;
    return true;
  }

  /// True when the row set is closed under negation of the halfspace, i.e.
  /// the described set satisfies P = -P. Assumes canonical form (sorted).
  bool is_symmetric() const {
    auto less = [](const Halfspace& a, const Halfspace& b) {
      if (a.offset != b.offset) return a.offset < b.offset;
      return lex_less(a.normal, b.normal);
    };
    for (const auto& r : rows_) {
      Halfspace neg{-r.normal, r.offset};
      auto it = std::lower_bound(rows_.begin(), rows_.end(), neg, less);
      if (it == rows_.end() || it->offset != neg.offset || it->normal != neg.normal) return false;
    }
    return true;
  }

 private:
  Eigen::Index dim_ = 0;
  std::vector<Halfspace> rows_;
};

/// A finite list of points in a fixed dimension; canonical form is the
/// deduplicated lexicographically sorted list.
class VertexSystem {
 public:
  VertexSystem() = default;
  explicit VertexSystem(Eigen::Index dimension) : dim_(dimension) {}
  VertexSystem(Eigen::Index dimension, std::vector<Vec> points)
      : dim_(dimension), points_(std::move(points)) {
    for (const auto& p : points_)
      if (p.size() != dim_) throw std::invalid_argument("vertex dimension mismatch");
  }

  Eigen::Index dimension() const { return dim_; }
  const std::vector<Vec>& points() const { return points_; }
  void add(Vec p) {
    if (p.size() != dim_) throw std::invalid_argument("vertex dimension mismatch");
    points_.push_back(std::move(p));
  }

  VertexSystem canonical() const {
    std::vector<Vec> out = points_;
    std::sort(out.begin(), out.end(), [](const Vec& a, const Vec& b) { return lex_less(a, b); });
    out.erase(std::unique(out.begin(), out.end(), [](const Vec& a, const Vec& b) { return a == b; }), out.end());
    return VertexSystem(dim_, std::move(out));
  }

  bool operator==(const VertexSystem& other) const {
    if (dim_ != other.dim_ || points_.size() != other.points_.size()) return false;
    for (std::size_t i = 0; i < points_.size(); ++i)
      if (points_[i] != other.points_[i]) return false;
    return true;
  }

  /// True when the point set is closed under negation. Assumes canonical
  /// form (sorted).
  bool is_symmetric() const {
    for (const auto& p : points_) {
      Vec neg = -p;
      auto it = std::lower_bound(points_.begin(), points_.end(), neg,
                                 [](const Vec& a, const Vec& b) { return lex_less(a, b); });
      if (it == points_.end() || *it != neg) return false;
    }
    return true;
  }

 private:
  Eigen::Index dim_ = 0;
  std::vector<Vec> points_;
};

namespace detail {

// Double-description working state. Tight-row sets live in one contiguous
// bitset array (W words per vertex) so the adjacency scan, which dominates
// the run time, streams through memory with plain word operations.
struct DDState {
  std::size_t W = 1;
  std::vector<Vec> points;
  std::vector<std::uint64_t> active;

  std::uint64_t* act(std::size_t i) { return active.data() + i * W; }
  const std::uint64_t* act(std::size_t i) const { return active.data() + i * W; }
  static void set_bit(std::uint64_t* a, std::size_t bit) { a[bit >> 6] |= std::uint64_t{1} << (bit & 63); }

  std::size_t size() const { return points.size(); }

  void push(Vec p, const std::uint64_t* a) {
    points.push_back(std::move(p));
    active.insert(active.end(), a, a + W);
  }
};

// Row-to-vertex incidence, rebuilt per insertion: dominance of a candidate
// tight set reduces to an AND chain over per-row vertex bitsets.
struct ColumnIncidence {
  std::size_t WV = 1;
  std::vector<std::uint64_t> cols;  // rows * WV words

  ColumnIncidence(const DDState& st, std::size_t total_rows) {
    WV = (st.size() + 63) / 64;
    cols.assign(total_rows * WV, 0);
    for (std::size_t i = 0; i < st.size(); ++i) {
      const std::uint64_t* a = st.act(i);
      for (std::size_t w = 0; w < st.W; ++w) {
        std::uint64_t bits = a[w];
        while (bits) {
          const std::size_t r = (w << 6) + static_cast<std::size_t>(__builtin_ctzll(bits));
          cols[r * WV + (i >> 6)] |= std::uint64_t{1} << (i & 63);
          bits &= bits - 1;
        }
      }
    }
  }

  // True when some vertex besides iu and iw is tight on every row of `s`.
  bool dominated(const std::uint64_t* s, std::size_t nwords, std::size_t nverts, std::size_t iu, std::size_t iw,
                 std::vector<std::uint64_t>& acc) const {
    acc.assign(WV, ~std::uint64_t{0});
    if (nverts & 63) acc[WV - 1] = (std::uint64_t{1} << (nverts & 63)) - 1;
    for (std::size_t w = 0; w < nwords; ++w) {
      std::uint64_t bits = s[w];
      while (bits) {
        const std::size_t r = (w << 6) + static_cast<std::size_t>(__builtin_ctzll(bits));
        const std::uint64_t* col = cols.data() + r * WV;
        for (std::size_t v = 0; v < WV; ++v) acc[v] &= col[v];
        bits &= bits - 1;
      }
    }
    acc[iu >> 6] &= ~(std::uint64_t{1} << (iu & 63));
    acc[iw >> 6] &= ~(std::uint64_t{1} << (iw & 63));
    for (std::size_t v = 0; v < WV; ++v)
      if (acc[v]) return true;
    return false;
  }
};

}  // namespace detail

namespace detail {

/// Coordinate bounds for a symmetric canonical system, without any LP: d
/// independent normals a_j with |<a_j, x>| <= 1 (the negated rows exist by
/// symmetry) confine the polytope to a parallelepiped with explicit corner
/// bounds. Throws when the normals do not span (the symmetric set is then
/// genuinely unbounded).
inline std::pair<Vec, Vec> symmetric_box(const HalfspaceSystem& canon) {
  const Eigen::Index d = canon.dimension();
  for (const auto& r : canon.rows()) {
    // A symmetric pair with non-positive offset empties or flattens the set.
    if (r.offset < 0) throw std::invalid_argument("vertex_enumeration: system is infeasible (empty polytope)");
    if (r.offset == 0) throw std::invalid_argument("vertex_enumeration: polytope is not full-dimensional");
  }
  Mat normals(d, static_cast<Eigen::Index>(canon.rows().size()));
  for (std::size_t i = 0; i < canon.rows().size(); ++i)
    normals.col(static_cast<Eigen::Index>(i)) = canon.rows()[i].normal;
  std::vector<Eigen::Index> chosen = greedy_independent_columns(normals);
  if (static_cast<Eigen::Index>(chosen.size()) < d)
    throw std::invalid_argument("vertex_enumeration: system is unbounded");
  Mat A(d, d);
  Vec off(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    A.row(j) = normals.col(chosen[static_cast<std::size_t>(j)]).transpose();
    off(j) = canon.rows()[static_cast<std::size_t>(chosen[static_cast<std::size_t>(j)])].offset;
    if (off(j) <= 0) throw std::invalid_argument("vertex_enumeration: system is infeasible (empty polytope)");
  }
  Mat Ainv = inverse_of(A);
  Vec hi(d), lo(d);
  for (Eigen::Index k = 0; k < d; ++k) {
    Rational bound(0);
    for (Eigen::Index j = 0; j < d; ++j) bound += boost::multiprecision::abs(Rational(Ainv(k, j) * off(j)));
    hi(k) = bound + 1;
    lo(k) = -bound - 1;
  }
  return {lo, hi};
}

/// Coordinate ranges over the full system by exact LPs; detects empty and
/// unbounded inputs along the way.
inline std::pair<Vec, Vec> lp_box(const HalfspaceSystem& sys) {
  const Eigen::Index d = sys.dimension();
  Vec lo(d), hi(d);
  LinearProgram lp;
  lp.A = Mat(static_cast<Eigen::Index>(sys.rows().size()), d);
  lp.b = Vec(static_cast<Eigen::Index>(sys.rows().size()));
  for (std::size_t i = 0; i < sys.rows().size(); ++i) {
    lp.A.row(static_cast<Eigen::Index>(i)) = sys.rows()[i].normal.transpose();
    lp.b(static_cast<Eigen::Index>(i)) = sys.rows()[i].offset;
  }
  lp.c = Vec::Zero(d);
  for (Eigen::Index k = 0; k < d; ++k) {
    lp.c.setZero();
    lp.c(k) = 1;
    lp.sense = LpSense::maximize;
    Rational top, bot;
    try {
      top = lp_solve(lp).value;
      lp.sense = LpSense::minimize;
      bot = lp_solve(lp).value;
    } catch (const LpInfeasible&) {
      throw std::invalid_argument("vertex_enumeration: system is infeasible (empty polytope)");
    } catch (const LpUnbounded&) {
      throw std::invalid_argument("vertex_enumeration: system is unbounded");
    }
    if (top == bot) throw std::invalid_argument("vertex_enumeration: polytope is not full-dimensional");
    lo(k) = bot - 1;  // strict enlargement keeps box rows slack at true vertices
    hi(k) = top + 1;
  }
  return {lo, hi};
}

}  // namespace detail

/// Enumerates the vertices of the polytope described by `sys`.
///
/// Double-description style incremental insertion: a strictly larger bounding
/// box seeds the vertex set (for symmetric systems the box comes from d
/// independent rows with no LP; otherwise from exact range LPs, which also
/// detect empty and unbounded inputs), and the rows are inserted one at a
/// time, sparsest normals first. Adjacency of vertices across a new
/// hyperplane uses the combinatorial test on tight-row bitsets. Throws
/// std::invalid_argument on empty, unbounded or lower-dimensional input.
inline VertexSystem vertex_enumeration(const HalfspaceSystem& sys) {
  const Eigen::Index d = sys.dimension();
  if (d == 0) return VertexSystem(0);
  if (d > 12) throw std::invalid_argument("vertex_enumeration: dimension beyond desk scale");

  const HalfspaceSystem canon = sys.canonical();
  auto [lo, hi] = canon.is_symmetric() ? detail::symmetric_box(canon) : detail::lp_box(canon);

  // Extended row list: box rows first, then the input rows ordered sparsest
  // normal first (axis-aligned cuts keep the intermediate vertex sets small).
  struct Row {
    Vec normal;
    Rational offset;
  };
  std::vector<Row> rows;
  rows.reserve(2 * static_cast<std::size_t>(d) + canon.rows().size());
  for (Eigen::Index k = 0; k < d; ++k) {
    Vec n = Vec::Zero(d);
    n(k) = 1;
    rows.push_back({n, hi(k)});
    rows.push_back({-n, -lo(k)});
  }
  {
    std::vector<std::size_t> order(canon.rows().size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::vector<int> nnz(order.size(), 0);
    for (std::size_t i = 0; i < order.size(); ++i)
      for (Eigen::Index c = 0; c < d; ++c)
        if (canon.rows()[i].normal(c) != 0) ++nnz[i];
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return nnz[a] < nnz[b]; });
    for (std::size_t i : order) rows.push_back({canon.rows()[i].normal, canon.rows()[i].offset});
  }

  // Box corners.
  const std::size_t total_rows = rows.size();
  detail::DDState state;
  state.W = (total_rows + 63) / 64;
  {
    const std::size_t corners = std::size_t{1} << static_cast<std::size_t>(d);
    std::vector<std::uint64_t> a(state.W);
    for (std::size_t mask = 0; mask < corners; ++mask) {
      Vec p(d);
      std::fill(a.begin(), a.end(), 0);
      for (Eigen::Index k = 0; k < d; ++k) {
        const bool high = (mask >> static_cast<std::size_t>(k)) & 1;
        p(k) = high ? hi(k) : lo(k);
        detail::DDState::set_bit(a.data(), static_cast<std::size_t>(2 * k) + (high ? 0 : 1));
      }
      state.push(std::move(p), a.data());
    }
  }

  const bool dd_stats = std::getenv("POLYBANACH_DD_STATS") != nullptr;
  std::vector<Rational> slack;
  std::vector<std::uint64_t> common(state.W);
  for (std::size_t k = 2 * static_cast<std::size_t>(d); k < rows.size(); ++k) {
    if (dd_stats)
      std::cerr << "[dd] row " << k << "/" << rows.size() << " |V|=" << state.size() << std::endl;
    const auto& row = rows[k];
    slack.assign(state.size(), Rational(0));
    std::vector<std::size_t> plus, zero, minus;
    for (std::size_t i = 0; i < state.size(); ++i) {
      slack[i] = row.offset - row.normal.dot(state.points[i]);
      if (slack[i] > 0)
        plus.push_back(i);
      else if (slack[i] == 0)
        zero.push_back(i);
      else
        minus.push_back(i);
    }
    if (minus.empty()) {
      for (std::size_t i : zero) detail::DDState::set_bit(state.act(i), k);
      continue;
    }
    if (plus.empty() && zero.empty())
      throw std::logic_error("vertex_enumeration: insertion emptied a feasible polytope");

    std::map<std::vector<Rational>, std::pair<Vec, std::vector<std::uint64_t>>> fresh;
    const std::size_t min_tight = static_cast<std::size_t>(d) - 1;
    const detail::ColumnIncidence incidence(state, total_rows);
    std::vector<std::uint64_t> acc;
    for (std::size_t iu : plus) {
      const std::uint64_t* au = state.act(iu);
      for (std::size_t iw : minus) {
        const std::uint64_t* aw = state.act(iw);
        std::size_t tight = 0;
        for (std::size_t w = 0; w < state.W; ++w) {
          common[w] = au[w] & aw[w];
          tight += static_cast<std::size_t>(__builtin_popcountll(common[w]));
        }
        if (tight < min_tight) continue;
        if (incidence.dominated(common.data(), state.W, state.size(), iu, iw, acc)) continue;
        const Rational t = slack[iu] / (slack[iu] - slack[iw]);
        Vec x = state.points[iu] + t * (state.points[iw] - state.points[iu]);
        std::vector<std::uint64_t> a(common);
        detail::DDState::set_bit(a.data(), k);
        std::vector<Rational> key(x.data(), x.data() + x.size());
        auto it = fresh.find(key);
        if (it == fresh.end()) {
          fresh.emplace(std::move(key), std::make_pair(std::move(x), std::move(a)));
        } else {
          for (std::size_t w = 0; w < state.W; ++w) it->second.second[w] |= a[w];
        }
      }
    }

    detail::DDState next;
    next.W = state.W;
    next.points.reserve(plus.size() + zero.size() + fresh.size());
    next.active.reserve((plus.size() + zero.size() + fresh.size()) * state.W);
    for (std::size_t i : plus) next.push(std::move(state.points[i]), state.act(i));
    for (std::size_t i : zero) {
      detail::DDState::set_bit(state.act(i), k);
      next.push(std::move(state.points[i]), state.act(i));
    }
    for (auto& [key, pv] : fresh) next.push(std::move(pv.first), pv.second.data());
    state = std::move(next);
    if (state.size() > 200000) throw std::invalid_argument("vertex_enumeration: vertex count beyond desk scale");
  }

  VertexSystem out = VertexSystem(d, std::move(state.points)).canonical();

  // Full-dimensionality: the vertex differences must span.
  if (out.points().empty()) throw std::logic_error("vertex_enumeration: no vertices for nonempty polytope");
  Mat diffs(d, static_cast<Eigen::Index>(out.points().size()) - 1);
  for (std::size_t i = 1; i < out.points().size(); ++i)
    diffs.col(static_cast<Eigen::Index>(i - 1)) = out.points()[i] - out.points()[0];
  if (rank_of(diffs) < d) throw std::invalid_argument("vertex_enumeration: polytope is not full-dimensional");
  return out;
}

/// Facets of conv(points) for a full-dimensional hull with the origin in its
/// interior, via the polar polytope: the vertices of {y : <p,y> <= 1 for all
/// p} are exactly the canonical facet normals. Throws on degenerate input.
inline HalfspaceSystem facet_enumeration(const VertexSystem& input) {
  const Eigen::Index d = input.dimension();
  if (d == 0) return HalfspaceSystem(0);
  VertexSystem pts = input.canonical();
  if (pts.points().empty()) throw std::invalid_argument("facet_enumeration: no points");
  Mat diffs(d, static_cast<Eigen::Index>(pts.points().size()) - 1);
  for (std::size_t i = 1; i < pts.points().size(); ++i)
    diffs.col(static_cast<Eigen::Index>(i - 1)) = pts.points()[i] - pts.points()[0];
  if (rank_of(diffs) < d)
    throw std::invalid_argument("facet_enumeration: hull is degenerate (not full-dimensional)");

  HalfspaceSystem polar(d);
  for (const auto& p : pts.points()) polar.add(p, Rational(1));
  VertexSystem polar_verts;
  try {
    polar_verts = vertex_enumeration(polar);
  } catch (const std::invalid_argument& err) {
    if (std::string(err.what()).find("unbounded") != std::string::npos)
      throw std::invalid_argument("facet_enumeration: origin is not interior to the hull");
    throw;
  }
  HalfspaceSystem out(d);
  for (const auto& u : polar_verts.points()) out.add(u, Rational(1));
  return out.canonical();
}

/// Canonical vertex set of conv(points): redundant points are dropped by a
/// facet-enumeration round trip. Also returns the facet system.
inline std::pair<VertexSystem, HalfspaceSystem> hull_reduce(const VertexSystem& pts) {
  HalfspaceSystem facets = facet_enumeration(pts);
  VertexSystem verts = vertex_enumeration(facets);
  return {std::move(verts), std::move(facets)};
}

inline VertexSystem hull_vertices(const VertexSystem& pts) { return hull_reduce(pts).first; }

/// Polar dual of a symmetric polytope given by halfspaces, again as
/// halfspaces. The facets of the polar are the pairings with the vertices of
/// the primal. Errors on asymmetric input.
inline HalfspaceSystem polar_dual(const HalfspaceSystem& sys) {
  if (sys.dimension() == 0) return HalfspaceSystem(0);
  HalfspaceSystem canon = sys.canonical();
  if (!canon.is_symmetric()) throw std::invalid_argument("polar_dual: halfspace system is not symmetric");
  VertexSystem verts = vertex_enumeration(canon);
  HalfspaceSystem out(sys.dimension());
  for (const auto& v : verts.points()) out.add(v, Rational(1));
  return out.canonical();
}

/// Polar dual of a symmetric polytope given by vertices, again as vertices:
/// the canonically scaled facet normals.
inline VertexSystem polar_dual(const VertexSystem& pts) {
  if (pts.dimension() == 0) return VertexSystem(0);
  VertexSystem canon = pts.canonical();
  if (!canon.is_symmetric()) throw std::invalid_argument("polar_dual: vertex system is not symmetric");
  HalfspaceSystem facets = facet_enumeration(canon);
  std::vector<Vec> out;
  out.reserve(facets.rows().size());
  for (const auto& r : facets.rows()) out.push_back(r.normal);
  return VertexSystem(pts.dimension(), std::move(out)).canonical();
}

/// Membership of x in conv(points), decided by an exact feasibility LP over
/// convex-combination weights.
inline bool in_hull(const VertexSystem& pts, const Vec& x) {
  const Eigen::Index d = pts.dimension();
  if (x.size() != d) throw std::invalid_argument("in_hull: dimension mismatch");
  const Eigen::Index n = static_cast<Eigen::Index>(pts.points().size());
  if (n == 0) return false;
  LinearProgram lp;
  lp.E = Mat(d + 1, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    lp.E.block(0, j, d, 1) = pts.points()[static_cast<std::size_t>(j)];
    lp.E(d, j) = 1;
  }
  lp.e = Vec(d + 1);
  lp.e.head(d) = x;
  lp.e(d) = 1;
  lp.c = Vec::Zero(n);
  lp.nonneg.assign(static_cast<std::size_t>(n), 1);
  try {
    lp_solve(lp);
    return true;
  } catch (const LpInfeasible&) {
    return false;
  }
}

/// True when the vertex has at least `dim` linearly independent tight rows in
/// the system and satisfies every row; used by certificate verification.
inline bool vertex_certified(const HalfspaceSystem& sys, const Vec& v) {
  std::vector<Eigen::Index> tight;
  for (std::size_t i = 0; i < sys.rows().size(); ++i) {
    const Rational lhs = sys.rows()[i].normal.dot(v);
    if (lhs > sys.rows()[i].offset) return false;
    if (lhs == sys.rows()[i].offset) tight.push_back(static_cast<Eigen::Index>(i));
  }
  if (static_cast<Eigen::Index>(tight.size()) < sys.dimension()) return false;
  Mat normals(sys.dimension(), static_cast<Eigen::Index>(tight.size()));
  for (std::size_t k = 0; k < tight.size(); ++k)
    normals.col(static_cast<Eigen::Index>(k)) = sys.rows()[static_cast<std::size_t>(tight[k])].normal;
  return rank_of(normals) == sys.dimension();
}

}  // namespace polybanach
