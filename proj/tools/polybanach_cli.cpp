// polybanach command-line front end: validate space files, run the
// amalgamation / back-and-forth / universal-embedding constructions, verify
// emitted certificates from their witnesses, and render 2-d unit balls.
//
// Exit codes: 0 all certificates pass, 1 certificate failure, 2 input or
// parse error.

#include "polybanach/json_io.hpp"
#include "polybanach/random_gen.hpp"
#include "polybanach/svg.hpp"
#include "polybanach/verify.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace polybanach;

namespace {

class CertificateFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ReportBuilder {
  Json j = Json::object();
  std::chrono::steady_clock::time_point start = std::chrono::steady_clock::now();
  bool failed = false;

  explicit ReportBuilder(const std::string& command) {
    j["command"] = command;
    j["inputs"] = Json::object();
  }
  void input(const std::string& path) { j["inputs"][path] = file_content_hash(path); }
  void checks(const VerifyReport& rep) {
    Json arr = Json::array();
    for (const auto& c : rep.checks) {
      Json e{{"name", c.name}, {"pass", c.pass}};
      if (!c.detail.empty()) e["detail"] = c.detail;
      arr.push_back(std::move(e));
    }
    j["checks"] = std::move(arr);
    if (!rep.all_pass()) failed = true;
  }
  int finish() {
    j["status"] = failed ? "fail" : "pass";
    j["elapsed_ms"] =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start).count();
    std::cout << j.dump(2) << std::endl;
    return failed ? 1 : 0;
  }
};

Rational parse_rational_flag(const std::string& text, const char* flag) {
  try {
    return parse_rational(text);
  } catch (const std::invalid_argument& err) {
    throw ParseError(std::string(flag) + ": " + err.what());
  }
}

SpaceFile load_space(const std::string& path) {
  return space_file_from_json(load_json_file(path));
}

MapFile load_map(const std::string& path) { return map_file_from_json(load_json_file(path)); }

ChainSpace load_chain(const std::string& dir) {
  const Json idx = load_json_file((fs::path(dir) / "index.json").string());
  if (!idx.is_object() || idx.value("kind", "") != "chain")
    throw ParseError(dir + "/index.json is not a chain index");
  std::vector<PolyhedralSpace> stages;
  std::vector<std::string> names;
  for (const auto& f : idx.at("stages")) {
    SpaceFile sf = load_space((fs::path(dir) / f.get<std::string>()).string());
    stages.push_back(sf.space);
    names.push_back(sf.name);
  }
  std::vector<LinearMap> inclusions;
  const auto& incl = idx.at("inclusions");
  if (incl.size() + 1 != stages.size()) throw ParseError(dir + ": chain needs one inclusion per stage pair");
  for (std::size_t i = 0; i < incl.size(); ++i)
    inclusions.emplace_back(stages[i], stages[i + 1],
                            matrix_from_json(incl[i], stages[i + 1].dimension(), stages[i].dimension()));
  return ChainSpace(std::move(stages), std::move(inclusions));
}

int cmd_space_validate(const std::string& path) {
  ReportBuilder rep("space-validate");
  rep.input(path);
  const Json j = load_json_file(path);
  VerifyReport checks;
  try {
    SpaceFile sf = space_file_from_json(j);
    checks.add("parses to a polyhedral space", true);
    checks.add("ball symmetric", sf.space.validation().symmetric);
    checks.add("ball bounded", sf.space.validation().bounded);
    checks.add("ball full-dimensional", sf.space.validation().full_dimensional);
    checks.add("origin interior", sf.space.validation().origin_interior);
    checks.add("dual vertices consistent", sf.space.validation().dual_consistent);
    rep.j["results"] = Json{{"name", sf.name},
                            {"dimension", sf.space.dimension()},
                            {"facets", sf.space.ball_facets().rows().size()},
                            {"vertices", sf.space.ball_vertices().points().size()},
                            {"dual_vertices", sf.space.dual_vertices().points().size()}};
  } catch (const ParseError&) {
    throw;
  } catch (const std::invalid_argument& err) {
    checks.add(err.what(), false);
  }
  rep.checks(checks);
  return rep.finish();
}

int cmd_gen_space(Eigen::Index dim, int vertices, std::uint64_t seed, const std::string& name,
                  const std::string& out) {
  ReportBuilder rep("gen-space");
  RandomGen gen(seed);
  PolyhedralSpace s = gen.space(dim, vertices);
  save_json_file(out, space_file_to_json(name, s));
  rep.j["results"] = Json{{"name", name},
                          {"dimension", s.dimension()},
                          {"vertices", s.ball_vertices().points().size()},
                          {"facets", s.ball_facets().rows().size()},
                          {"out", out}};
  return rep.finish();
}

int cmd_amalgamate(const std::string& xpath, const std::string& ypath, const std::string& fpath,
                   const std::string& eps_text, const std::string& outdir) {
  ReportBuilder rep("amalgamate");
  rep.input(xpath);
  rep.input(ypath);
  rep.input(fpath);
  const Rational eps = parse_rational_flag(eps_text, "--eps");
  SpaceFile X = load_space(xpath);
  SpaceFile Y = load_space(ypath);
  MapFile mf = load_map(fpath);
  if (mf.matrix.rows() != Y.space.dimension() || mf.matrix.cols() != X.space.dimension())
    throw ParseError("map matrix shape does not match the spaces");
  if (!mf.domain.empty() && !X.name.empty() && mf.domain != X.name)
    throw ParseError("map domain name '" + mf.domain + "' does not match space '" + X.name + "'");
  if (!mf.codomain.empty() && !Y.name.empty() && mf.codomain != Y.name)
    throw ParseError("map codomain name '" + mf.codomain + "' does not match space '" + Y.name + "'");
  LinearMap f(X.space, Y.space, mf.matrix);

  AmalgamCertificate cert = amalgamate(X.space, Y.space, f, eps);

  fs::create_directories(outdir);
  save_json_file((fs::path(outdir) / "Z.json").string(), space_file_to_json("Z", cert.Z));
  save_json_file((fs::path(outdir) / "i.json").string(),
                 map_file_to_json(MapFile{"i", X.name, "Z", cert.i.matrix()}));
  save_json_file((fs::path(outdir) / "j.json").string(),
                 map_file_to_json(MapFile{"j", Y.name, "Z", cert.j.matrix()}));
  const Json cert_json = amalgam_certificate_to_json(cert);
  save_json_file((fs::path(outdir) / "certificate.json").string(), cert_json);

  rep.j["results"] = Json{{"epsilon_used", json_rational(cert.epsilon_used)},
                          {"epsilon_star_f", json_rational(cert.defect_f.epsilon_star)},
                          {"bound_achieved", json_rational(cert.bound_achieved)},
                          {"dim_Z", cert.Z.dimension()},
                          {"out", outdir}};
  rep.checks(verify_amalgam_certificate(amalgam_certificate_from_json(cert_json)));
  return rep.finish();
}

int cmd_back_and_forth(const std::string& edir, const std::string& fdir, const std::string& fpath,
                       const std::string& target_text, const std::string& eps0_text, const std::string& ratio_text,
                       std::size_t depth, const std::string& outdir) {
  ReportBuilder rep("back-and-forth");
  rep.input(fpath);
  const Rational target = parse_rational_flag(target_text, "--target-eps");
  const Rational ratio = parse_rational_flag(ratio_text, "--ratio");
  const Rational eps0 = eps0_text.empty() ? Rational(target / 10) : parse_rational_flag(eps0_text, "--eps0");

  ChainSpace E = load_chain(edir);
  ChainSpace F = load_chain(fdir);
  MapFile mf = load_map(fpath);
  // The seed map runs from E's full stage 0 into F's stage 0.
  const PolyhedralSpace& X = E.stage(0);
  if (mf.matrix.rows() != F.stage(0).dimension() || mf.matrix.cols() != X.dimension())
    throw ParseError("seed map shape does not match the chains' stage-0 spaces");
  LinearMap f(X, F.stage(0), mf.matrix);

  EpsilonSchedule schedule = schedule_make(target, eps0, ratio, depth);
  BackAndForthTrace trace = back_and_forth(E, F, X, identity_map(X), f, schedule);

  fs::create_directories(outdir);
  const Json tj = back_and_forth_trace_to_json(trace);
  save_json_file((fs::path(outdir) / "trace.json").string(), tj);

  Json steps = Json::array();
  for (std::size_t n = 0; n < trace.steps.size(); ++n)
    steps.push_back(Json{{"n", n},
                         {"drift", json_rational(trace.steps[n].drift)},
                         {"drift_limit", json_rational(trace.steps[n].drift_limit)}});
  rep.j["results"] = Json{{"schedule", schedule_to_json(schedule)},
                          {"steps", std::move(steps)},
                          {"final_distance", json_rational(trace.final_distance)},
                          {"target_eps", json_rational(target)},
                          {"out", outdir}};
  rep.checks(verify_back_and_forth_trace(back_and_forth_trace_from_json(tj)));
  return rep.finish();
}

int cmd_embed(const std::string& xdir, const std::string& gdir, std::size_t depth, const std::string& outdir) {
  ReportBuilder rep("embed");
  ChainSpace X = load_chain(xdir);
  ChainSpace G = load_chain(gdir);
  EmbedTrace trace = embed_universal(X, G, depth);

  fs::create_directories(outdir);
  const Json tj = embed_trace_to_json(trace);
  save_json_file((fs::path(outdir) / "trace.json").string(), tj);

  Json steps = Json::array();
  for (std::size_t n = 0; n < trace.steps.size(); ++n)
    steps.push_back(Json{{"n", n},
                         {"threshold", json_rational(trace.steps[n].threshold)},
                         {"defect", json_rational(trace.steps[n].f_next_defect)},
                         {"drift", json_rational(trace.steps[n].drift)},
                         {"drift_limit", json_rational(trace.steps[n].drift_limit)}});
  rep.j["results"] = Json{{"steps", std::move(steps)}, {"out", outdir}};
  rep.checks(verify_embed_trace(embed_trace_from_json(tj)));
  return rep.finish();
}

int cmd_verify(const std::string& path) {
  ReportBuilder rep("verify");
  rep.input(path);
  const Json j = load_json_file(path);
  VerifyReport checks = verify_json(j);
  rep.j["results"] = Json{{"kind", j.value("kind", "")}, {"checks_total", checks.checks.size()}};
  rep.checks(checks);
  return rep.finish();
}

int cmd_render(const std::string& path, const std::string& out) {
  ReportBuilder rep("render");
  rep.input(path);
  SpaceFile sf = load_space(path);
  std::string svg;
  try {
    svg = render_ball_svg(sf.space);
  } catch (const std::invalid_argument& err) {
    throw ParseError(err.what());
  }
  std::ofstream os(out);
  if (!os) throw std::runtime_error("cannot write " + out);
  os << svg;
  rep.j["results"] = Json{{"out", out},
                          {"polygon_points", sf.space.ball_vertices().points().size()},
                          {"facet_labels", sf.space.ball_facets().rows().size()}};
  return rep.finish();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Exact polyhedral Banach spaces: certified amalgamation, back-and-forth and embedding"};
  app.require_subcommand(1);

  std::string space_path, xpath, ypath, map_path, out = "out";
  std::string eps_text, target_text, eps0_text, ratio_text = "1/4";
  std::string edir, fdir, name = "space";
  std::size_t depth = 6;
  Eigen::Index dim = 2;
  int vertices = 8;
  std::uint64_t seed = 1;

  auto* validate = app.add_subcommand("space-validate", "Check a space file's invariants");
  validate->add_option("space", space_path)->required();

  auto* gen = app.add_subcommand("gen-space", "Generate a random symmetric space file");
  gen->add_option("--dim", dim);
  gen->add_option("--vertices", vertices);
  gen->add_option("--seed", seed);
  gen->add_option("--name", name);
  gen->add_option("--out", out)->required();

  auto* amal = app.add_subcommand("amalgamate", "Amalgamate an eps-isometry into a common space");
  amal->add_option("X", xpath)->required();
  amal->add_option("Y", ypath)->required();
  amal->add_option("map", map_path)->required();
  amal->add_option("--eps", eps_text)->required();
  amal->add_option("--out", out);

  auto* baf = app.add_subcommand("back-and-forth", "Run the certified back-and-forth between two chains");
  baf->add_option("chainE", edir)->required();
  baf->add_option("chainF", fdir)->required();
  baf->add_option("map", map_path)->required();
  baf->add_option("--target-eps", target_text)->required();
  baf->add_option("--eps0", eps0_text);
  baf->add_option("--ratio", ratio_text);
  baf->add_option("--depth", depth);
  baf->add_option("--out", out);

  auto* embed = app.add_subcommand("embed", "Embed a presented chain into an extension chain");
  embed->add_option("chainX", edir)->required();
  embed->add_option("chainG", fdir)->required();
  embed->add_option("--depth", depth);
  embed->add_option("--out", out);

  auto* verify = app.add_subcommand("verify", "Re-check a certificate or trace from its witnesses");
  verify->add_option("artifact", space_path)->required();

  auto* render = app.add_subcommand("render", "Render a 2-dimensional unit ball as SVG");
  render->add_option("space", space_path)->required();
  render->add_option("--out", out)->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (validate->parsed()) return cmd_space_validate(space_path);
    if (gen->parsed()) return cmd_gen_space(dim, vertices, seed, name, out);
    if (amal->parsed()) return cmd_amalgamate(xpath, ypath, map_path, eps_text, out);
    if (baf->parsed()) return cmd_back_and_forth(edir, fdir, map_path, target_text, eps0_text, ratio_text, depth, out);
    if (embed->parsed()) return cmd_embed(edir, fdir, depth, out);
    if (verify->parsed()) return cmd_verify(space_path);
    if (render->parsed()) return cmd_render(space_path, out);
  } catch (const ParseError& err) {
    std::cerr << "input error: " << err.what() << "\n";
    return 2;
  } catch (const CertificateFailure& err) {
    std::cerr << "certificate failure: " << err.what() << "\n";
    return 1;
  } catch (const LpInfeasible& err) {
    std::cerr << "input error: " << err.what() << "\n";
    return 2;
  } catch (const LpUnbounded& err) {
    std::cerr << "input error: " << err.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& err) {
    std::cerr << "input error: " << err.what() << "\n";
    return 2;
  } catch (const std::logic_error& err) {
    std::cerr << "certificate failure: " << err.what() << "\n";
    return 1;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
  return 2;
}
