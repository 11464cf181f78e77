#pragma once

#include "polybanach/engine.hpp"

#include <json.hpp>

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace polybanach {

using Json = nlohmann::ordered_json;

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline Json json_rational(const Rational& q) { return rational_to_string(q); }

inline Rational rational_from_json(const Json& j) {
  if (!j.is_string()) throw ParseError("rationals must be encoded as strings like \"p/q\"");
  try {
    return parse_rational(j.get<std::string>());
  } catch (const std::invalid_argument& err) {
    throw ParseError(err.what());
  }
}

inline Json json_vector(const Vec& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(json_rational(v(i)));
  return out;
}

inline Vec vector_from_json(const Json& j, Eigen::Index expected = -1) {
  if (!j.is_array()) throw ParseError("expected an array of rationals");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = rational_from_json(j[i]);
  if (expected >= 0 && v.size() != expected) throw ParseError("vector has the wrong length");
  return v;
}

inline Json json_matrix(const Mat& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(json_rational(m(r, c)));
    out.push_back(std::move(row));
  }
  return out;
}

inline Mat matrix_from_json(const Json& j, Eigen::Index rows = -1, Eigen::Index cols = -1) {
  if (!j.is_array()) throw ParseError("expected a matrix (array of arrays)");
  const Eigen::Index r = static_cast<Eigen::Index>(j.size());
  if (rows >= 0 && r != rows) throw ParseError("matrix has the wrong number of rows");
  Eigen::Index c = cols;
  if (r > 0) {
    if (!j[0].is_array()) throw ParseError("expected a matrix (array of arrays)");
    if (c < 0) c = static_cast<Eigen::Index>(j[0].size());
  } else if (c < 0) {
    c = 0;
  }
  Mat m(r, c);
  for (Eigen::Index i = 0; i < r; ++i) {
    if (static_cast<Eigen::Index>(j[static_cast<std::size_t>(i)].size()) != c)
      throw ParseError("matrix rows have inconsistent lengths");
    for (Eigen::Index k = 0; k < c; ++k)
      m(i, k) = rational_from_json(j[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)]);
  }
  return m;
}

// ---------------------------------------------------------------------------
// Spaces

/// Inline space serialization used in traces and certificates: all three
/// systems are stored so a verifier never re-runs enumeration.
inline Json json_space_inline(const PolyhedralSpace& s) {
  Json facets = Json::array();
  for (const auto& r : s.ball_facets().rows()) {
    Vec row(s.dimension() + 1);
    row.head(s.dimension()) = r.normal;
    row(s.dimension()) = r.offset;
    facets.push_back(json_vector(row));
  }
  Json verts = Json::array();
  for (const auto& p : s.ball_vertices().points()) verts.push_back(json_vector(p));
  Json duals = Json::array();
  for (const auto& p : s.dual_vertices().points()) duals.push_back(json_vector(p));
  return Json{{"dimension", s.dimension()},
              {"facets", std::move(facets)},
              {"vertices", std::move(verts)},
              {"dual_vertices", std::move(duals)}};
}

inline PolyhedralSpace space_from_json_inline(const Json& j) {
  if (!j.is_object() || !j.contains("dimension")) throw ParseError("malformed space object");
  const Eigen::Index d = j.at("dimension").get<Eigen::Index>();
  if (d < 0) throw ParseError("negative dimension");
  HalfspaceSystem facets(d);
  for (const auto& row : j.at("facets")) {
    Vec v = vector_from_json(row, d + 1);
    facets.add(v.head(d), v(d));
  }
  VertexSystem verts(d), duals(d);
  for (const auto& p : j.at("vertices")) verts.add(vector_from_json(p, d));
  for (const auto& p : j.at("dual_vertices")) duals.add(vector_from_json(p, d));
  return PolyhedralSpace::from_parts_unchecked(d, std::move(facets), std::move(verts), std::move(duals));
}

/// Standalone space file: a single representation, re-validated on load.
struct SpaceFile {
  std::string name;
  PolyhedralSpace space;
};

inline Json space_file_to_json(const std::string& name, const PolyhedralSpace& s,
                               const std::string& representation = "vertices") {
  Json data = Json::array();
  if (representation == "vertices") {
    for (const auto& p : s.ball_vertices().points()) data.push_back(json_vector(p));
  } else if (representation == "facets") {
    for (const auto& r : s.ball_facets().rows()) {
      Vec row(s.dimension() + 1);
      row.head(s.dimension()) = r.normal;
      row(s.dimension()) = r.offset;
      data.push_back(json_vector(row));
    }
  } else {
    throw std::invalid_argument("space_file_to_json: representation must be \"vertices\" or \"facets\"");
  }
  return Json{{"kind", "space"},
              {"name", name},
              {"dimension", s.dimension()},
              {"representation", representation},
              {"data", std::move(data)}};
}

inline SpaceFile space_file_from_json(const Json& j) {
  if (!j.is_object() || j.value("kind", "") != "space") throw ParseError("not a space file");
  const std::string name = j.value("name", "");
  const Eigen::Index d = j.at("dimension").get<Eigen::Index>();
  if (d < 0) throw ParseError("negative dimension");
  const std::string rep = j.at("representation").get<std::string>();
  const auto& data = j.at("data");
  if (!data.is_array()) throw ParseError("space data must be an array");
  if (rep == "vertices") {
    VertexSystem verts(d);
    for (const auto& p : data) verts.add(vector_from_json(p, d));
    if (d == 0) return SpaceFile{name, PolyhedralSpace::trivial()};
    return SpaceFile{name, PolyhedralSpace::from_vertices(verts)};
  }
  if (rep == "facets") {
    HalfspaceSystem rows(d);
    for (const auto& row : data) {
      Vec v = vector_from_json(row, d + 1);
      rows.add(v.head(d), v(d));
    }
    if (d == 0) return SpaceFile{name, PolyhedralSpace::trivial()};
    return SpaceFile{name, PolyhedralSpace::from_halfspaces(rows)};
  }
  throw ParseError("representation must be \"vertices\" or \"facets\"");
}

// ---------------------------------------------------------------------------
// Maps

struct MapFile {
  std::string name;
  std::string domain;
  std::string codomain;
  Mat matrix;
};

inline Json map_file_to_json(const MapFile& m) {
  return Json{{"kind", "map"},
              {"name", m.name},
              {"domain", m.domain},
              {"codomain", m.codomain},
              {"matrix", json_matrix(m.matrix)}};
}

inline MapFile map_file_from_json(const Json& j) {
  if (!j.is_object() || j.value("kind", "") != "map") throw ParseError("not a map file");
  MapFile m;
  m.name = j.value("name", "");
  m.domain = j.value("domain", "");
  m.codomain = j.value("codomain", "");
  m.matrix = matrix_from_json(j.at("matrix"));
  return m;
}

// ---------------------------------------------------------------------------
// Chains (an index object; the CLI stores stages in sibling files)

inline Json chain_index_to_json(const std::string& name, const std::vector<std::string>& stage_files,
                                const ChainSpace& chain) {
  Json incl = Json::array();
  for (std::size_t i = 0; i + 1 < chain.size(); ++i) incl.push_back(json_matrix(chain.inclusion(i).matrix()));
  return Json{{"kind", "chain"}, {"name", name}, {"stages", stage_files}, {"inclusions", std::move(incl)}};
}

// ---------------------------------------------------------------------------
// Certificates and traces

inline Json amalgam_certificate_to_json(const AmalgamCertificate& c) {
  Json j{{"kind", "amalgam_certificate"},
         {"X", json_space_inline(c.X)},
         {"Y", json_space_inline(c.Y)},
         {"Z", json_space_inline(c.Z)},
         {"f", json_matrix(c.f.matrix())},
         {"i", json_matrix(c.i.matrix())},
         {"j", json_matrix(c.j.matrix())},
         {"epsilon_used", json_rational(c.epsilon_used)},
         {"bound_achieved", json_rational(c.bound_achieved)},
         {"defect_f", json_rational(c.defect_f.epsilon_star)}};
  if (c.inner) {
    j["inner"] = json_space_inline(*c.inner);
    j["image_basis"] = json_matrix(c.image_basis);
  }
  return j;
}

struct ParsedAmalgamCertificate {
  PolyhedralSpace X, Y, Z;
  Mat f, i, j;
  Rational epsilon_used, bound_achieved, defect_f;
};

inline ParsedAmalgamCertificate amalgam_certificate_from_json(const Json& j) {
  if (!j.is_object() || j.value("kind", "") != "amalgam_certificate") throw ParseError("not an amalgam certificate");
  ParsedAmalgamCertificate c{space_from_json_inline(j.at("X")),
                             space_from_json_inline(j.at("Y")),
                             space_from_json_inline(j.at("Z")),
                             matrix_from_json(j.at("f")),
                             matrix_from_json(j.at("i")),
                             matrix_from_json(j.at("j")),
                             rational_from_json(j.at("epsilon_used")),
                             rational_from_json(j.at("bound_achieved")),
                             rational_from_json(j.at("defect_f"))};
  return c;
}

inline Json schedule_to_json(const EpsilonSchedule& s) {
  Json terms = Json::array();
  for (const auto& t : s.terms) terms.push_back(json_rational(t));
  return Json{{"target_eps", json_rational(s.target_eps)},
              {"eps0", json_rational(s.eps0)},
              {"ratio", json_rational(s.ratio)},
              {"depth", s.depth},
              {"terms", std::move(terms)},
              {"budget_lhs", json_rational(s.budget_lhs)},
              {"slack", json_rational(s.slack)},
              {"tail_bound", json_rational(s.tail_bound)}};
}

inline EpsilonSchedule schedule_from_json(const Json& j) {
  EpsilonSchedule s;
  s.target_eps = rational_from_json(j.at("target_eps"));
  s.eps0 = rational_from_json(j.at("eps0"));
  s.ratio = rational_from_json(j.at("ratio"));
  s.depth = j.at("depth").get<std::size_t>();
  for (const auto& t : j.at("terms")) s.terms.push_back(rational_from_json(t));
  s.budget_lhs = rational_from_json(j.at("budget_lhs"));
  s.slack = rational_from_json(j.at("slack"));
  s.tail_bound = rational_from_json(j.at("tail_bound"));
  return s;
}

inline Json back_and_forth_trace_to_json(const BackAndForthTrace& t) {
  Json steps = Json::array();
  for (const auto& s : t.steps) {
    steps.push_back(Json{{"X_next", json_space_inline(s.X_next)},
                         {"Y_next", json_space_inline(s.Y_next)},
                         {"g", json_matrix(s.g.matrix())},
                         {"f_next", json_matrix(s.f_next.matrix())},
                         {"incl_x", json_matrix(s.incl_x.matrix())},
                         {"incl_y", json_matrix(s.incl_y.matrix())},
                         {"cond3", json_rational(s.cond3)},
                         {"cond4", json_rational(s.cond4)},
                         {"g_defect", json_rational(s.g_defect)},
                         {"f_next_defect", json_rational(s.f_next_defect)},
                         {"drift", json_rational(s.drift)},
                         {"drift_limit", json_rational(s.drift_limit)}});
  }
  return Json{{"kind", "back_and_forth_trace"},
              {"schedule", schedule_to_json(t.schedule)},
              {"X0", json_space_inline(t.X0)},
              {"Y0", json_space_inline(t.Y0)},
              {"f0", json_matrix(t.f0.matrix())},
              {"f0_defect", json_rational(t.f0_defect)},
              {"steps", std::move(steps)},
              {"final_distance", json_rational(t.final_distance)},
              {"drift_total", json_rational(t.drift_total)}};
}

inline BackAndForthTrace back_and_forth_trace_from_json(const Json& j) {
  if (!j.is_object() || j.value("kind", "") != "back_and_forth_trace")
    throw ParseError("not a back-and-forth trace");
  EpsilonSchedule sched = schedule_from_json(j.at("schedule"));
  PolyhedralSpace X0 = space_from_json_inline(j.at("X0"));
  PolyhedralSpace Y0 = space_from_json_inline(j.at("Y0"));
  LinearMap f0(X0, Y0, matrix_from_json(j.at("f0"), Y0.dimension(), X0.dimension()));
  BackAndForthTrace t{std::move(sched),
                      X0,
                      Y0,
                      f0,
                      rational_from_json(j.at("f0_defect")),
                      {},
                      rational_from_json(j.at("final_distance")),
                      rational_from_json(j.at("drift_total"))};
  PolyhedralSpace Xp = X0, Yp = Y0;
  for (const auto& sj : j.at("steps")) {
    PolyhedralSpace Xn = space_from_json_inline(sj.at("X_next"));
    PolyhedralSpace Yn = space_from_json_inline(sj.at("Y_next"));
    BackAndForthStep step{
        Xn,
        Yn,
        LinearMap(Yp, Xn, matrix_from_json(sj.at("g"), Xn.dimension(), Yp.dimension())),
        LinearMap(Xn, Yn, matrix_from_json(sj.at("f_next"), Yn.dimension(), Xn.dimension())),
        LinearMap(Xp, Xn, matrix_from_json(sj.at("incl_x"), Xn.dimension(), Xp.dimension())),
        LinearMap(Yp, Yn, matrix_from_json(sj.at("incl_y"), Yn.dimension(), Yp.dimension())),
        rational_from_json(sj.at("cond3")),
        rational_from_json(sj.at("cond4")),
        rational_from_json(sj.at("g_defect")),
        rational_from_json(sj.at("f_next_defect")),
        rational_from_json(sj.at("drift")),
        rational_from_json(sj.at("drift_limit"))};
    t.steps.push_back(std::move(step));
    Xp = Xn;
    Yp = Yn;
  }
  return t;
}

inline Json embed_trace_to_json(const EmbedTrace& t) {
  Json steps = Json::array();
  for (const auto& s : t.steps) {
    steps.push_back(Json{{"X_next", json_space_inline(s.X_next)},
                         {"G_stage", json_space_inline(s.f_next.codomain())},
                         {"G_prev", json_space_inline(s.incl_g.domain())},
                         {"f_next", json_matrix(s.f_next.matrix())},
                         {"incl_x", json_matrix(s.incl_x.matrix())},
                         {"incl_g", json_matrix(s.incl_g.matrix())},
                         {"threshold", json_rational(s.threshold)},
                         {"f_next_defect", json_rational(s.f_next_defect)},
                         {"step_distance", json_rational(s.step_distance)},
                         {"drift", json_rational(s.drift)},
                         {"drift_limit", json_rational(s.drift_limit)}});
  }
  return Json{{"kind", "embed_trace"}, {"X0", json_space_inline(t.X0)}, {"steps", std::move(steps)}};
}

inline EmbedTrace embed_trace_from_json(const Json& j) {
  if (!j.is_object() || j.value("kind", "") != "embed_trace") throw ParseError("not an embedding trace");
  EmbedTrace t{space_from_json_inline(j.at("X0")), {}};
  PolyhedralSpace Xp = t.X0;
  std::size_t idx = 0;
  for (const auto& sj : j.at("steps")) {
    PolyhedralSpace Xn = space_from_json_inline(sj.at("X_next"));
    PolyhedralSpace Gs = space_from_json_inline(sj.at("G_stage"));
    PolyhedralSpace Gp = space_from_json_inline(sj.at("G_prev"));
    EmbedStep step{Xn,
                   LinearMap(Xn, Gs, matrix_from_json(sj.at("f_next"), Gs.dimension(), Xn.dimension())),
                   LinearMap(Xp, Xn, matrix_from_json(sj.at("incl_x"), Xn.dimension(), Xp.dimension())),
                   LinearMap(Gp, Gs, matrix_from_json(sj.at("incl_g"), Gs.dimension(), Gp.dimension())),
                   idx,
                   rational_from_json(sj.at("threshold")),
                   rational_from_json(sj.at("f_next_defect")),
                   rational_from_json(sj.at("step_distance")),
                   rational_from_json(sj.at("drift")),
                   rational_from_json(sj.at("drift_limit"))};
    t.steps.push_back(std::move(step));
    Xp = Xn;
    ++idx;
  }
  return t;
}

// ---------------------------------------------------------------------------
// File helpers

inline Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& err) {
    // Translate the byte offset into line/column for the error message.
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i + 1 < err.byte && i < text.size(); ++i) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    throw ParseError(path + ": parse error at line " + std::to_string(line) + ", column " + std::to_string(col));
  }
}

inline void save_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << j.dump(2) << "\n";
}

/// FNV-1a 64-bit hash of a file's bytes, as fixed-width hex. Used to pin
/// report inputs; not cryptographic.
inline std::string file_content_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path);
  std::uint64_t h = 1469598103934665603ull;
  char c;
  while (in.get(c)) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ull;
  }
  std::ostringstream os;
  os << "fnv64:" << std::hex << h;
  return os.str();
}

}  // namespace polybanach
