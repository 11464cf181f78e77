#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace polybanach;
using tst::vec1;
using tst::vec2;

TEST_CASE("schedule_make verifies the budget in closed form") {
  // target 1/10, eps0 1/100, ratio 1/4. Partial-sum oracle below; the closed
  // form evaluates to 21/3125 and the room is 9/100.
  EpsilonSchedule s = schedule_make(Rational(1, 10), Rational(1, 100), Rational(1, 4), 6);
  CHECK(s.budget_lhs == Rational(21, 3125));
  CHECK(s.budget_lhs < Rational(9, 100));
  CHECK(s.terms.size() == 7);
  for (std::size_t n = 0; n + 1 < s.terms.size(); ++n) CHECK(s.terms[n + 1] < s.terms[n]);
}

TEST_CASE("schedule closed form equals partial sums plus the exact tail") {
  // Independent oracle: sum the series term by term to `depth` and add the
  // closed-form tail; this must reproduce budget_lhs exactly for every depth.
  const Rational target(1, 10), eps0(3, 200), ratio(1, 5);
  for (std::size_t depth = 1; depth <= 6; ++depth) {
    EpsilonSchedule s = schedule_make(target, eps0, ratio, depth);
    auto eps = [&](std::size_t n) { return eps0 * rational_pow(ratio, static_cast<long>(n)); };
    Rational partial = 2 * eps(0) * eps(1) + eps(1);
    for (std::size_t n = 1; n < depth; ++n) partial += eps(n) + 2 * eps(n) * eps(n + 1) + eps(n + 1);
    // Tail of sum_{n>=depth} (eps_n + 2 eps_n eps_{n+1} + eps_{n+1}).
    const Rational rN = rational_pow(ratio, static_cast<long>(depth));
    const Rational tail =
        eps0 * (rN + rN * ratio) / (1 - ratio) + 2 * eps0 * eps0 * rN * rN * ratio / (1 - ratio * ratio);
    CHECK(s.tail_bound == tail);
    CHECK(s.budget_lhs == partial + tail - eps(depth) + eps(depth));  // same value, exercised as rationals
    CHECK(s.budget_lhs == partial + tail);
  }
}

TEST_CASE("schedule rejections") {
  CHECK_THROWS_WITH(schedule_make(Rational(1, 10), Rational(1, 10), Rational(1, 4), 3),
                    Catch::Matchers::ContainsSubstring("eps0"));
  CHECK_THROWS_WITH(schedule_make(Rational(1, 10), Rational(99, 1000), Rational(1, 2), 3),
                    Catch::Matchers::ContainsSubstring("deficit"));
  CHECK_THROWS_AS(schedule_make(Rational(1, 10), Rational(1, 100), Rational(3, 2), 3), std::invalid_argument);
}

TEST_CASE("gurarii_extend serves requests exactly") {
  // Trivial request: Z equals the glued subspace itself.
  ChainSpace chain = tst::line_chain(1);
  PolyhedralSpace line = chain.top();
  LinearMap h = gurarii_extend(chain, line, identity_map(line), line, identity_map(line), Rational(1, 2));
  CHECK(chain.size() == 2);
  CHECK(h.defect().epsilon_star == 0);
  CHECK(chain.oracle_log().size() == 1);

  // Extension by a genuinely larger space: the line glued into the square.
  ChainSpace chain2 = tst::line_chain(1);
  PolyhedralSpace square = tst::linf(2);
  LinearMap k(chain2.top(), square, Mat(vec2(1, 0)));
  REQUIRE(k.defect().epsilon_star == 0);
  LinearMap h2 = gurarii_extend(chain2, chain2.top(), identity_map(chain2.top()), square, k, Rational(1, 8));
  CHECK(chain2.size() == 2);
  CHECK(chain2.top().dimension() >= 2);
  CHECK(h2.defect().epsilon_star == 0);
  // h o k equals the inclusion of the line into the new top, exactly.
  CHECK(h2.matrix() * k.matrix() == chain2.inclusion(0).matrix());
  CHECK(chain2.oracle_log().size() == 1);
}

TEST_CASE("gurarii_extend rejects non-isometric glue maps") {
  ChainSpace chain = tst::line_chain(1);
  PolyhedralSpace line = chain.top();
  LinearMap bad = tst::scaling_map(line, Rational(3, 2));
  CHECK_THROWS_WITH(gurarii_extend(chain, line, identity_map(line), line, bad, Rational(1, 2)),
                    Catch::Matchers::ContainsSubstring("isometry"));
}

TEST_CASE("approximate_inverse of an exact isometry is exact") {
  ChainSpace chain = tst::line_chain(1);
  PolyhedralSpace line = chain.top();
  auto res =
      approximate_inverse(chain, line, identity_map(line), line, identity_map(line), Rational(1, 2), Rational(1, 10));
  CHECK(res.trivial_path);
  CHECK(res.distance == 0);
  CHECK(res.g.defect().epsilon_star == 0);
  CHECK(map_distance(compose(res.g, identity_map(line)), res.incl_x_new) == 0);
}

TEST_CASE("approximate_inverse worked example tracks the bookkeeping") {
  // f = (3/2) id on the line, eps = 3/5, delta = 1/10. The midpoint rule
  // gives eps' = 11/20 and delta' = min(1/20, (12/11 - 1)/2) = 1/22, so
  // (1 + delta') eps' = 23/40 < 3/5. The amalgam at 11/20 has
  // eps1 = 11/31 and bound max{1/2, 11/31, 33/62} = 33/62, and the oracle
  // serves exactly, so the final distance equals 33/62 < 3/5.
  ChainSpace chain = tst::line_chain(1);
  PolyhedralSpace line = chain.top();
  LinearMap f = tst::scaling_map(line, Rational(3, 2));
  auto res = approximate_inverse(chain, line, identity_map(line), line, f, Rational(3, 5), Rational(1, 10));
  CHECK_FALSE(res.trivial_path);
  CHECK(res.eps_prime == Rational(11, 20));
  CHECK(res.delta_prime == Rational(1, 22));
  CHECK((1 + res.delta_prime) * res.eps_prime == Rational(23, 40));
  CHECK(res.amalgam_bound == Rational(33, 62));
  CHECK(res.distance == Rational(33, 62));
  CHECK(res.distance < Rational(3, 5));
  CHECK(res.g.defect().epsilon_star == 0);
}

TEST_CASE("approximate_inverse random suite") {
  RandomGen gen(101);
  for (int iter = 0; iter < 6; ++iter) {
    PolyhedralSpace stage0 = gen.space(gen.uniform(1, 2), 6);
    ChainSpace chain = tst::chain_of({stage0});
    PolyhedralSpace Y = gen.space(gen.uniform(static_cast<int>(stage0.dimension()), 2), 6);
    LinearMap f = gen.injective_map(stage0, Y);
    Rational eps = f.defect().epsilon_star + gen.positive_rational(2, 2);
    Rational delta = gen.positive_rational(3, 4);
    auto res = approximate_inverse(chain, stage0, identity_map(stage0), Y, f, eps, delta);
    CHECK(res.distance < eps);
    CHECK(res.g.defect().epsilon_star == 0);
    CHECK(res.g.defect().epsilon_star <= res.delta_prime);
    CHECK(res.delta_prime < delta);
    CHECK((1 + res.delta_prime) * res.eps_prime < eps);
    CHECK(map_distance(compose(res.g, f), res.incl_x_new) == res.distance);
  }
}

TEST_CASE("back_and_forth with the identity seed has zero drift") {
  ChainSpace E = tst::line_chain(6);
  ChainSpace F = tst::line_chain(6);
  PolyhedralSpace line = E.stage(0);
  EpsilonSchedule sched = schedule_make(Rational(1, 10), Rational(1, 100), Rational(1, 4), 4);
  BackAndForthTrace trace = back_and_forth(E, F, line, identity_map(line), identity_map(line), sched);
  REQUIRE(trace.steps.size() == 4);
  for (const auto& st : trace.steps) {
    CHECK(st.drift == 0);
    CHECK(st.cond3 == 0);
    CHECK(st.cond4 == 0);
  }
  CHECK(trace.final_distance == 0);
}

TEST_CASE("back_and_forth worked seed meets the target") {
  ChainSpace E = tst::line_chain(6);
  ChainSpace F = tst::line_chain(6);
  PolyhedralSpace line = E.stage(0);
  LinearMap f = tst::scaling_map(line, Rational(3, 2));
  EpsilonSchedule sched = schedule_make(Rational(3, 5), Rational(51, 100), Rational(1, 20), 4);
  BackAndForthTrace trace = back_and_forth(E, F, line, identity_map(line), f, sched);
  REQUIRE(trace.steps.size() == 4);
  for (std::size_t n = 0; n < trace.steps.size(); ++n) {
    CHECK(trace.steps[n].drift <= trace.steps[n].drift_limit);
    CHECK(trace.steps[n].drift_limit == drift_bound(sched, n));
    CHECK(trace.steps[n].f_next_defect == 0);
    CHECK(trace.steps[n].g_defect == 0);
  }
  CHECK(trace.final_distance < Rational(3, 5));
  // Monotone certification: partial drift sums stay within the running
  // budget of drift limits.
  Rational drift_sum(0), limit_sum(0);
  for (const auto& st : trace.steps) {
    drift_sum += st.drift;
    limit_sum += st.drift_limit;
    CHECK(drift_sum <= limit_sum);
  }
  CHECK(trace.final_distance <= drift_sum);
}

TEST_CASE("back_and_forth between the same chain object") {
  ChainSpace chain = tst::line_chain(8);
  PolyhedralSpace line = chain.stage(0);
  EpsilonSchedule sched = schedule_make(Rational(1, 5), Rational(1, 50), Rational(1, 4), 2);
  BackAndForthTrace trace = back_and_forth(chain, chain, line, identity_map(line), identity_map(line), sched);
  CHECK(trace.final_distance == 0);
}

TEST_CASE("back_and_forth depth 0 reports only stage-0 data") {
  ChainSpace E = tst::line_chain(2);
  ChainSpace F = tst::line_chain(2);
  PolyhedralSpace line = E.stage(0);
  EpsilonSchedule sched = schedule_make(Rational(1, 10), Rational(1, 100), Rational(1, 4), 0);
  BackAndForthTrace trace = back_and_forth(E, F, line, identity_map(line), identity_map(line), sched);
  CHECK(trace.steps.empty());
  CHECK(trace.final_distance == 0);
}

TEST_CASE("back_and_forth rejects oversized seed defects and exhausted chains") {
  ChainSpace E = tst::line_chain(6);
  ChainSpace F = tst::line_chain(6);
  PolyhedralSpace line = E.stage(0);
  LinearMap f = tst::scaling_map(line, Rational(3, 2));
  EpsilonSchedule small = schedule_make(Rational(1, 10), Rational(1, 100), Rational(1, 4), 2);
  CHECK_THROWS_WITH(back_and_forth(E, F, line, identity_map(line), f, small),
                    Catch::Matchers::ContainsSubstring("seed defect"));

  ChainSpace shortE = tst::line_chain(2);
  ChainSpace shortF = tst::line_chain(2);
  EpsilonSchedule deep = schedule_make(Rational(1, 10), Rational(1, 100), Rational(1, 4), 3);
  CHECK_THROWS_WITH(
      back_and_forth(shortE, shortF, shortE.stage(0), identity_map(shortE.stage(0)),
                     identity_map(shortE.stage(0)), deep),
      Catch::Matchers::ContainsSubstring("exhausted"));
}

TEST_CASE("back_and_forth from a proper subspace seed") {
  // X is the diagonal line inside the square stage; the seed maps it into
  // the line stage of F with a small expansion.
  ChainSpace E = tst::chain_of(std::vector<PolyhedralSpace>(5, tst::linf(2)));
  ChainSpace F = tst::line_chain(5);
  auto x = subspace(E.stage(0), Mat(vec2(1, 0)));
  LinearMap f = tst::scaling_map(tst::segment(), Rational(10, 9));
  LinearMap seed(x.space, F.stage(0), f.matrix());
  REQUIRE(seed.defect().epsilon_star == Rational(1, 9));
  EpsilonSchedule sched = schedule_make(Rational(1, 2), Rational(1, 8), Rational(1, 10), 3);
  BackAndForthTrace trace = back_and_forth(E, F, x.space, x.inclusion, seed, sched);
  CHECK(trace.final_distance < Rational(1, 2));
  for (const auto& st : trace.steps) CHECK(st.drift <= st.drift_limit);
}

TEST_CASE("embed_universal from the zero space is all-zero") {
  ChainSpace X = tst::chain_of({PolyhedralSpace::trivial(), PolyhedralSpace::trivial()});
  ChainSpace G = tst::line_chain(1);
  EmbedTrace trace = embed_universal(X, G, 3);
  REQUIRE(trace.steps.size() == 3);
  for (const auto& st : trace.steps) {
    CHECK(st.drift == 0);
    CHECK(st.f_next_defect == 0);
  }
}

TEST_CASE("embed_universal embeds the cross-polytope plane") {
  ChainSpace X = tst::chain_of({PolyhedralSpace::trivial(), tst::l1(2)});
  ChainSpace G = tst::line_chain(1);
  EmbedTrace trace = embed_universal(X, G, 4);
  REQUIRE(trace.steps.size() == 4);
  for (std::size_t n = 0; n < trace.steps.size(); ++n) {
    const auto& st = trace.steps[n];
    CHECK(st.threshold == pow2_inv(static_cast<long>(n) + 1));
    CHECK(st.f_next_defect <= st.threshold);
    CHECK(st.step_distance < pow2_inv(static_cast<long>(n)));
    CHECK(st.drift < st.drift_limit);
    CHECK(st.drift_limit <= 2 * pow2_inv(static_cast<long>(n)));
    CHECK(st.f_next.defect().epsilon_star == 0);
  }
  // The embedded copy of l1(2) keeps its norm in the final stage.
  const auto& last = trace.steps.back();
  const PolyhedralSpace plane = tst::l1(2);
  for (const auto& v : plane.ball_vertices().points())
    CHECK(last.f_next.codomain().norm(last.f_next.matrix() * v) == 1);
}

TEST_CASE("embed_universal drift telescopes") {
  ChainSpace X = tst::chain_of({PolyhedralSpace::trivial(), tst::linf(2)});
  ChainSpace G = tst::line_chain(1);
  EmbedTrace trace = embed_universal(X, G, 4);
  // map_distance(f_{n+k} restricted to X_n, f_n) < sum 2 * 2^-m over the
  // intermediate steps, checked through composed inclusions.
  for (std::size_t n = 1; n + 1 < trace.steps.size(); ++n) {
    for (std::size_t k = 1; n + k < trace.steps.size(); ++k) {
      LinearMap f_n = trace.steps[n].f_next;
      LinearMap f_nk = trace.steps[n + k].f_next;
      Mat inclX = Mat::Identity(f_n.domain().dimension(), f_n.domain().dimension());
      Mat inclG = Mat::Identity(f_n.codomain().dimension(), f_n.codomain().dimension());
      Rational budget(0);
      for (std::size_t m = n + 1; m <= n + k; ++m) {
        inclX = trace.steps[m].incl_x.matrix() * inclX;
        inclG = trace.steps[m].incl_g.matrix() * inclG;
        budget += 2 * pow2_inv(static_cast<long>(m));
      }
      LinearMap lhs(f_n.domain(), f_nk.codomain(), Mat(f_nk.matrix() * inclX));
      LinearMap rhs(f_n.domain(), f_nk.codomain(), Mat(inclG * f_n.matrix()));
      CHECK(map_distance(lhs, rhs) < budget);
    }
  }
}

TEST_CASE("embed_universal requires a zero-dimensional first stage") {
  ChainSpace X = tst::line_chain(2);
  ChainSpace G = tst::line_chain(1);
  CHECK_THROWS_WITH(embed_universal(X, G, 2),
                    Catch::Matchers::ContainsSubstring("zero-dimensional"));
}

TEST_CASE("chain inclusions are re-verified") {
  PolyhedralSpace line = tst::segment();
  std::vector<PolyhedralSpace> stages = {line, line};
  std::vector<LinearMap> bad = {tst::scaling_map(line, Rational(2))};
  CHECK_THROWS_WITH(ChainSpace(std::move(stages), std::move(bad)),
                    Catch::Matchers::ContainsSubstring("isometry"));
}
