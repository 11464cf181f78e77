// Acceptance suite: every criterion runs at its stated size and tolerance
// (all tolerances are exact rational comparisons, zero slack anywhere) and
// prints one PASS/FAIL line. The full suite is expected to take a few
// minutes; sizes are chosen to keep exact arithmetic fast.

#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "polybanach/json_io.hpp"
#include "polybanach/verify.hpp"

#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <regex>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;
using namespace polybanach;
using tst::vec1;
using tst::vec2;

namespace {

struct Criterion {
  std::string label;
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && pass) {
      pass = false;
      detail = what;
    }
  }
  ~Criterion() {
    std::cout << "ACCEPTANCE " << label << ": " << (pass ? "PASS" : "FAIL");
    if (!pass) std::cout << "  [" << detail << "]";
    std::cout << std::endl;
  }
};

struct RunResult {
  int exit_code;
  std::string output;
};

RunResult run_cli(const std::string& args) {
  const std::string cmd = std::string(POLYBANACH_CLI_PATH) + " " + args + " 2>&1";
  std::array<char, 4096> buf{};
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  REQUIRE(pipe != nullptr);
  while (std::size_t n = fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
  return RunResult{WEXITSTATUS(pclose(pipe)), out};
}

}  // namespace

TEST_CASE("criterion 1: amalgamation certificates on 200 random instances") {
  Criterion crit{"1 (amalgamation certificate suite, 200 random instances)"};
  RandomGen gen(0xA1);
  for (int iter = 0; iter < 200; ++iter) {
    auto inst = tst::random_eps_isometry(gen, 3, 12);
    AmalgamCertificate cert = amalgamate(inst.X, inst.Y, inst.f, inst.eps);
    // Zero tolerance: defects recomputed from scratch, bound recomputed.
    LinearMap i(cert.X, cert.Z, cert.i.matrix());
    LinearMap j(cert.Y, cert.Z, cert.j.matrix());
    crit.require(i.defect().epsilon_star == 0, "defect(i) != 0 at iteration " + std::to_string(iter));
    crit.require(j.defect().epsilon_star == 0, "defect(j) != 0 at iteration " + std::to_string(iter));
    Rational bound = map_distance(compose(j, inst.f), i);
    crit.require(bound == cert.bound_achieved, "bound mismatch at iteration " + std::to_string(iter));
    crit.require(bound <= inst.eps, "bound above eps at iteration " + std::to_string(iter));
    if (!crit.pass) break;
  }
  CHECK(crit.pass);
}

TEST_CASE("criterion 2: worked 1-dimensional example, exact values") {
  Criterion crit{"2 (worked example: f = (3/2) id, eps = 3/5)"};
  // Independent hand expansion before trusting the pipeline. The transported
  // functional of x* = 1 under f^{-1} is 2/3 with dual norm 2/3, so both
  // pairing rows reduce to |x + y| and the cutoff rows carry eps1:
  //   |j f - i| at x = 1 is max{|-1 + 3/2|, eps1, (3/2) eps1}.
  const Rational eps(3, 5);
  const Rational eps1 = eps / (1 + eps);
  crit.require(eps1 == Rational(3, 8), "eps1 != 3/8");
  const Rational by_hand =
      std::max({boost::multiprecision::abs(Rational(-1 + Rational(3, 2))), eps1, Rational(3, 2) * eps1});
  crit.require(by_hand == Rational(9, 16), "hand expansion != 9/16");

  PolyhedralSpace line = tst::segment();
  LinearMap f = tst::scaling_map(line, Rational(3, 2));
  AmalgamCertificate cert = amalgamate_bijective(line, line, f, eps);
  crit.require(cert.bound_achieved == Rational(9, 16), "pipeline bound != 9/16");
  AmalgamCertificate general = amalgamate(line, line, f, eps);
  crit.require(general.bound_achieved == Rational(9, 16), "general-route bound != 9/16");
  CHECK(crit.pass);
}

TEST_CASE("criterion 3: hull-based norm equals the symbolic infimum on 50 amalgams") {
  Criterion crit{"3 (quotient consistency, 50 random general amalgams x 20 points)"};
  RandomGen gen(0xA3);
  for (int iter = 0; iter < 50; ++iter) {
    const Eigen::Index n = gen.uniform(1, 2);
    const Eigen::Index m = gen.uniform(static_cast<int>(n), 3);
    PolyhedralSpace X = gen.space(n, 8), Y = gen.space(m, 8);
    LinearMap f = gen.injective_map(X, Y);
    Rational eps = f.defect().epsilon_star + gen.positive_rational(3, 3);
    AmalgamCertificate cert = amalgamate(X, Y, f, eps);
    crit.require(cert.inner.has_value(), "missing inner norm data");
    for (int k = 0; k < 20 && crit.pass; ++k) {
      Vec p = gen.vector(n + m);
      crit.require(cert.Z.norm(p) == quotient_norm_lp(cert, p),
                   "norm mismatch at iteration " + std::to_string(iter));
    }
    if (!crit.pass) break;
  }
  CHECK(crit.pass);
}

TEST_CASE("criterion 4: pushout and extension suites on 100 random instances") {
  Criterion crit{"4 (pushout certificates + isometric extensions, 100 instances each)"};
  RandomGen gen(0xA4);
  for (int iter = 0; iter < 100; ++iter) {
    const Eigen::Index k = gen.uniform(1, 2);
    const Eigen::Index p = gen.uniform(static_cast<int>(k), 3);
    const Eigen::Index q = gen.uniform(static_cast<int>(k), 2);
    PolyhedralSpace X1 = gen.space(p, 8), Y0 = gen.space(q, 8);
    Mat basis(p, k);
    do {
      basis = gen.matrix(p, k);
    } while (rank_of(basis) != k);
    auto x0 = subspace(X1, basis);
    LinearMap f = gen.contraction(x0.space, Y0);
    PushoutCertificate po = pushout_l1(x0.space, X1, x0.inclusion, Y0, f);
    crit.require(po.W.dimension() == p + q - k, "dimension formula failed at " + std::to_string(iter));
    crit.require(po.f_prime.matrix() * x0.inclusion.matrix() == po.y_embed.matrix() * f.matrix(),
                 "extension equation failed at " + std::to_string(iter));
    crit.require(LinearMap(Y0, po.W, po.y_embed.matrix()).defect().epsilon_star == 0,
                 "y_embed defect != 0 at " + std::to_string(iter));
    if (!crit.pass) break;
  }
  RandomGen gen2(0xA5);
  for (int iter = 0; iter < 100 && crit.pass; ++iter) {
    const Eigen::Index k = gen2.uniform(1, 2);
    const Eigen::Index p = gen2.uniform(static_cast<int>(k), 2);
    PolyhedralSpace X1 = gen2.space(p, 6);
    PolyhedralSpace Y0 = gen2.space(gen2.uniform(static_cast<int>(k), 2), 6);
    Mat basis(p, k);
    do {
      basis = gen2.matrix(p, k);
    } while (rank_of(basis) != k);
    auto x0 = subspace(X1, basis);
    LinearMap f = gen2.injective_map(x0.space, Y0);
    Rational eps = f.defect().epsilon_star + gen2.positive_rational(2, 2);
    ExtensionResult ext = extend_isometry(x0.space, X1, x0.inclusion, Y0, f, eps);
    crit.require(LinearMap(X1, ext.Y1, ext.g.matrix()).defect().epsilon_star == 0,
                 "g not an exact isometry at " + std::to_string(iter));
    crit.require(ext.distance < eps, "distance not below eps at " + std::to_string(iter));
    crit.require(map_distance(compose(ext.g, x0.inclusion), compose(ext.y_embed, f)) == ext.distance,
                 "distance witness mismatch at " + std::to_string(iter));
  }
  CHECK(crit.pass);
}

TEST_CASE("criterion 5: approximate inverses on 100 random instances") {
  Criterion crit{"5 (approximate-inverse contract, 100 random instances)"};
  RandomGen gen(0xA6);
  for (int iter = 0; iter < 100; ++iter) {
    const Eigen::Index n = gen.uniform(1, 2);
    PolyhedralSpace stage0 = gen.space(n, 8);
    ChainSpace chain = tst::chain_of({stage0});
    PolyhedralSpace Y = gen.space(gen.uniform(static_cast<int>(n), 2), 8);
    LinearMap f = gen.injective_map(stage0, Y);
    // Mix in exact isometries to exercise the trivial branch.
    if (iter % 10 == 0) {
      f = identity_map(stage0);
      Y = stage0;
    }
    Rational eps = f.defect().epsilon_star + gen.positive_rational(2, 2);
    Rational delta = gen.positive_rational(3, 3);
    auto res = approximate_inverse(chain, stage0, identity_map(stage0), Y, f, eps, delta);
    crit.require(map_distance(compose(res.g, f), res.incl_x_new) < eps,
                 "g o f misses the inclusion at " + std::to_string(iter));
    crit.require(res.g.defect().epsilon_star <= res.delta_prime && res.delta_prime < delta,
                 "delta bookkeeping failed at " + std::to_string(iter));
    crit.require((1 + res.delta_prime) * res.eps_prime < eps,
                 "(1+delta') eps' < eps failed at " + std::to_string(iter));
    if (!crit.pass) break;
  }
  CHECK(crit.pass);
}

TEST_CASE("criterion 6: back-and-forth at depth 4") {
  Criterion crit{"6 (back-and-forth: drift rows, final bound, identity seed, budget)"};
  // Exact budget verification via closed forms.
  EpsilonSchedule sched = schedule_make(Rational(3, 5), Rational(51, 100), Rational(1, 20), 4);
  crit.require(sched.budget_lhs < sched.target_eps - sched.eps0, "budget inequality not verified");

  ChainSpace E = tst::line_chain(6);
  ChainSpace F = tst::line_chain(6);
  PolyhedralSpace line = E.stage(0);
  LinearMap f = tst::scaling_map(line, Rational(3, 2));
  BackAndForthTrace trace = back_and_forth(E, F, line, identity_map(line), f, sched);
  crit.require(trace.steps.size() == 4, "depth not reached");
  for (std::size_t n = 0; n < trace.steps.size(); ++n) {
    crit.require(trace.steps[n].drift <= trace.steps[n].drift_limit,
                 "drift row failed at step " + std::to_string(n));
    crit.require(trace.steps[n].drift_limit == drift_bound(sched, n),
                 "drift limit mismatch at step " + std::to_string(n));
  }
  crit.require(trace.final_distance < Rational(3, 5), "final distance not below target");

  ChainSpace E2 = tst::line_chain(6);
  ChainSpace F2 = tst::line_chain(6);
  EpsilonSchedule sched2 = schedule_make(Rational(1, 10), Rational(1, 100), Rational(1, 4), 4);
  BackAndForthTrace idtrace = back_and_forth(E2, F2, line, identity_map(line), identity_map(line), sched2);
  crit.require(idtrace.final_distance == 0, "identity seed distance not exactly 0");
  CHECK(crit.pass);
}

TEST_CASE("criterion 7: universal embedding at depth 4") {
  Criterion crit{"7 (universal embedding: thresholds and drifts per step)"};
  ChainSpace X = tst::chain_of({PolyhedralSpace::trivial(), tst::l1(2)});
  ChainSpace G = tst::line_chain(1);
  EmbedTrace trace = embed_universal(X, G, 4);
  crit.require(trace.steps.size() == 4, "depth not reached");
  for (std::size_t n = 0; n < trace.steps.size(); ++n) {
    const auto& st = trace.steps[n];
    crit.require(st.f_next_defect <= pow2_inv(static_cast<long>(n) + 1),
                 "defect threshold failed at step " + std::to_string(n));
    crit.require(st.drift < 2 * pow2_inv(static_cast<long>(n)),
                 "drift bound failed at step " + std::to_string(n));
  }
  CHECK(crit.pass);
}

TEST_CASE("criterion 8: kernel regression on 500 random polytopes") {
  Criterion crit{"8 (kernel: polar involution, H/V round trip, LP duality, 500 polytopes)"};
  RandomGen gen(0xA8);
  for (int iter = 0; iter < 500; ++iter) {
    const Eigen::Index d = gen.uniform(2, 4);
    PolyhedralSpace s = gen.space(d, gen.uniform(4, 8));
    const HalfspaceSystem& facets = s.ball_facets();
    const VertexSystem& verts = s.ball_vertices();
    crit.require(polar_dual(polar_dual(facets)) == facets.canonical(),
                 "polar involution failed at " + std::to_string(iter));
    crit.require(vertex_enumeration(facets) == verts.canonical(),
                 "H->V round trip failed at " + std::to_string(iter));
    crit.require(facet_enumeration(verts) == facets.canonical(),
                 "V->H round trip failed at " + std::to_string(iter));
    LinearProgram lp;
    lp.A = Mat(static_cast<Eigen::Index>(facets.rows().size()), d);
    lp.b = Vec(static_cast<Eigen::Index>(facets.rows().size()));
    for (std::size_t i = 0; i < facets.rows().size(); ++i) {
      lp.A.row(static_cast<Eigen::Index>(i)) = facets.rows()[i].normal.transpose();
      lp.b(static_cast<Eigen::Index>(i)) = facets.rows()[i].offset;
    }
    lp.c = gen.nonzero_vector(d);
    LpSolution sol = lp_solve(lp);
    std::string why;
    crit.require(lp_certificate_ok(lp, sol, &why), "LP certificate failed at " + std::to_string(iter) + ": " + why);
    if (!crit.pass) break;
  }
  CHECK(crit.pass);
}

TEST_CASE("criterion 9: CLI determinism and tamper detection") {
  Criterion crit{"9 (CLI: byte-identical reruns, tampered trace rejected)"};
  const fs::path tmp = fs::temp_directory_path() / ("polybanach_acc_" + std::to_string(::getpid()));
  fs::create_directories(tmp);
  save_json_file((tmp / "X.json").string(), space_file_to_json("X", tst::segment()));
  save_json_file((tmp / "Y.json").string(), space_file_to_json("Y", tst::segment()));
  save_json_file((tmp / "f.json").string(), map_file_to_json(MapFile{"f", "X", "Y", Mat(vec1(Rational(3, 2)))}));

  const std::string args = "amalgamate " + (tmp / "X.json").string() + " " + (tmp / "Y.json").string() + " " +
                           (tmp / "f.json").string() + " --eps 3/5 --out " + (tmp / "out").string();
  RunResult a = run_cli(args);
  RunResult b = run_cli(args);
  auto strip = [](std::string s) {
    return std::regex_replace(s, std::regex("\"elapsed_ms\": [0-9]+"), "\"elapsed_ms\": X");
  };
  crit.require(a.exit_code == 0 && b.exit_code == 0, "amalgamate run failed");
  crit.require(strip(a.output) == strip(b.output), "reports differ across reruns");

  std::ifstream c1((tmp / "out" / "certificate.json").string()), c2((tmp / "out" / "certificate.json").string());
  RunResult fresh = run_cli("verify " + (tmp / "out" / "certificate.json").string());
  crit.require(fresh.exit_code == 0, "fresh certificate failed verification");

  Json cert = load_json_file((tmp / "out" / "certificate.json").string());
  cert["bound_achieved"] = "5/9";
  save_json_file((tmp / "tampered.json").string(), cert);
  RunResult tampered = run_cli("verify " + (tmp / "tampered.json").string());
  crit.require(tampered.exit_code == 1, "tampered certificate accepted");
  fs::remove_all(tmp);
  CHECK(crit.pass);
}
