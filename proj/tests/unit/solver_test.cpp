#include <cmath>
#include <stdexcept>
#include <vector>

#include <doctest.h>

#include "../support/oracles.hpp"
#include "mareq/market.hpp"
#include "mareq/objective.hpp"
#include "mareq/solver.hpp"

using namespace mareq;
namespace ts = testsupport;

namespace {

// Two disjoint copies of the parallel-arc instance; the blocks must not
// interact and each should land on the single-copy equilibrium.
NetworkProblem two_copies() {
  NetworkProblem p;
  p.nodes = 4;
  p.arcs = {{0, 1, ScalarFn::affine(1, 1)},
            {0, 1, ScalarFn::affine(2, 1)},
            {2, 3, ScalarFn::affine(1, 1)},
            {2, 3, ScalarFn::affine(2, 1)}};
  p.pairs = {{0, 1, {{0}, {1}}, {{ScalarFn::affine(10, -1), 10.0}}},
             {2, 3, {{2}, {3}}, {{ScalarFn::affine(10, -1), 10.0}}}};
  return p;
}

// Walk a trace and check every accepted step made at least its promised
// Armijo decrease relative to the previous row's objective.
void check_descent(const std::vector<TraceRow>& trace, const SolverConfig& cfg) {
  bool have_prev = false;
  double prev = 0;
  for (const auto& r : trace) {
    if (r.event == TraceRow::Event::step) {
      REQUIRE(have_prev);
      CHECK(r.objective - prev <=
            -cfg.beta * r.step * r.gap + 1e-12 * (1 + std::abs(prev)));
      CHECK(r.step > 0);
      CHECK(r.gap >= 0);
    }
    prev = r.objective;
    have_prev = true;
  }
}

}  // namespace

TEST_SUITE("solver") {

TEST_CASE("armijo accepts the first sufficient power") {
  SolverConfig cfg;
  // cold-start ray of the parallel-arc instance: d(t) = -81 t + 81 t^2
  int trials = 0;
  double t = armijo_step([](double t) { return -81 * t + 81 * t * t; }, 40.5,
                         cfg, &trials);
  CHECK(t == 0.5);
  CHECK(trials == 2);
  // already sufficient at t = 1
  t = armijo_step([](double t) { return -t; }, 1.0, cfg, &trials);
  CHECK(t == 1.0);
  CHECK(trials == 1);
  CHECK_THROWS_AS(armijo_step([](double) { return 1.0; }, 1.0, cfg),
                  SolveError);
}

TEST_CASE("both methods reach the parallel-arc equilibrium") {
  auto prob = ts::tiny_parallel();
  SolverConfig cfg;
  cfg.accuracy = 1e-6;
  for (auto method : {Method::pl, Method::cpl}) {
    auto res = method == Method::pl ? solve_pl(prob, cfg) : solve_cpl(prob, cfg);
    CHECK(res.status == SolveStatus::converged);
    CHECK(res.delta <= 1e-6);
    CHECK(res.point.path_flow[0] == doctest::Approx(ts::kTinyX1).epsilon(1e-3));
    CHECK(res.point.path_flow[1] == doctest::Approx(ts::kTinyX2).epsilon(1e-3));
    CHECK(res.point.demand[0] == doctest::Approx(ts::kTinyY).epsilon(1e-3));
    CHECK(res.objective == doctest::Approx(ts::kTinyObjective).epsilon(1e-6));
    CHECK(is_feasible(prob, res.point, 1e-10));
    auto rep = check_equilibrium(prob, res.point, 1e-2, EquilibriumForm::kkt);
    CHECK(rep.passed);
  }
}

TEST_CASE("a zero gap certifies the equilibrium without iterating") {
  // h(0) == g(0): the zero point already clears the market
  NetworkProblem p;
  p.nodes = 2;
  p.arcs = {{0, 1, ScalarFn::affine(1, 1)}};
  p.pairs = {{0, 1, {{0}}, {{ScalarFn::affine(1, -1), 1.0}}}};
  for (auto method : {Method::pl, Method::cpl}) {
    auto res = method == Method::pl ? solve_pl(p, SolverConfig{})
                                    : solve_cpl(p, SolverConfig{});
    CHECK(res.status == SolveStatus::converged);
    CHECK(res.block_iters == 0);
    CHECK(res.delta == 0.0);
    CHECK(res.point.path_flow[0] == 0.0);
    // gap soundness: delta at the tolerance implies the check passes
    auto rep = verify_equilibrium(to_market(p), flatten(p, res.point), 1e-8);
    CHECK(rep.equilibrium);
  }
}

TEST_CASE("start point is the projection of zero") {
  auto prob = ts::tiny_parallel();
  SolverConfig cfg;
  cfg.accuracy = 50.0;  // above the cold-start gap of 40.5
  auto res = solve_pl(prob, cfg);
  CHECK(res.status == SolveStatus::converged);
  CHECK(res.block_iters == 0);
  CHECK(res.point.path_flow == std::vector<double>{0, 0});
  CHECK(res.point.demand == std::vector<double>{0});
  CHECK(res.delta == doctest::Approx(40.5));
}

TEST_CASE("budget exhaustion reports an exact residual gap") {
  auto prob = ts::tiny_parallel();
  SolverConfig cfg;
  cfg.keep_trace = true;
  cfg.max_block_iters = 0;
  auto res = solve_pl(prob, cfg);
  CHECK(res.status == SolveStatus::budget_exhausted);
  CHECK(res.block_iters == 0);
  CHECK(res.delta == doctest::Approx(40.5));
  REQUIRE(!res.trace.empty());
  CHECK(res.trace.front().event == TraceRow::Event::measure);
  CHECK(res.trace.front().block_iters == 0);
  CHECK(res.trace.front().objective == 0.0);

  cfg.max_block_iters = 3;
  auto rc = solve_cpl(prob, cfg);
  CHECK(rc.status == SolveStatus::budget_exhausted);
  CHECK(rc.block_iters == 3);
  CHECK(rc.delta > 0);
}

TEST_CASE("full-sweep accounting charges every block per round") {
  auto prob = two_copies();
  SolverConfig cfg;
  cfg.accuracy = 1e-3;
  cfg.keep_trace = true;
  auto res = solve_pl(prob, cfg);
  CHECK(res.status == SolveStatus::converged);
  long long prev_count = 0;
  for (const auto& r : res.trace)
    if (r.event == TraceRow::Event::step) {
      CHECK(r.block == -1);
      CHECK(r.block_iters == prev_count + 2);  // two blocks per round
      CHECK(r.exact);
      prev_count = r.block_iters;
    }
  CHECK(prev_count == res.block_iters);
  check_descent(res.trace, cfg);
  // the blocks decompose: each copy lands on its own equilibrium
  for (int b : {0, 1}) {
    CHECK(res.point.path_flow[2 * b] == doctest::Approx(ts::kTinyX1).epsilon(1e-2));
    CHECK(res.point.path_flow[2 * b + 1] == doctest::Approx(ts::kTinyX2).epsilon(1e-2));
    CHECK(res.point.demand[b] == doctest::Approx(ts::kTinyY).epsilon(1e-2));
  }
}

TEST_CASE("cyclic accounting charges only line-search events") {
  auto prob = two_copies();
  SolverConfig cfg;
  cfg.accuracy = 1e-3;
  cfg.keep_trace = true;
  auto res = solve_cpl(prob, cfg);
  CHECK(res.status == SolveStatus::converged);
  long long prev_count = 0;
  int restarts = 0;
  for (const auto& r : res.trace) {
    if (r.event == TraceRow::Event::step) {
      CHECK((r.block == 0 || r.block == 1));
      CHECK(r.block_iters == prev_count + 1);
      CHECK(!r.exact);
      prev_count = r.block_iters;
    } else if (r.event == TraceRow::Event::restart) {
      ++restarts;
      CHECK(r.stage == restarts);
      CHECK(r.delta_l == doctest::Approx(10.0 / std::exp2(restarts - 1)));
      // all block gaps were below the threshold for a full sweep
      CHECK(r.delta <= 2 * r.delta_l + 1e-12);
      CHECK(r.exact);
    }
  }
  CHECK(prev_count == res.block_iters);
  CHECK(restarts >= 2);
  check_descent(res.trace, cfg);
}

TEST_CASE("harmonic threshold rule divides by the stage index") {
  auto prob = ts::tiny_parallel();
  SolverConfig cfg;
  cfg.accuracy = 0.2;
  cfg.delta_rule = DeltaRule::harmonic;
  cfg.keep_trace = true;
  auto res = solve_cpl(prob, cfg);
  CHECK(res.status == SolveStatus::converged);
  int stage = 0;
  for (const auto& r : res.trace)
    if (r.event == TraceRow::Event::restart) {
      ++stage;
      CHECK(r.stage == stage);
      CHECK(r.delta_l == doctest::Approx(10.0 / stage).epsilon(1e-12));
    }
  CHECK(stage >= 2);
}

TEST_CASE("cyclic reduces to full sweeps on a single block") {
  auto prob = ts::tiny_wireless();
  SolverConfig cfg;
  cfg.accuracy = 1e-3;
  cfg.keep_trace = true;
  auto pl = solve_pl(prob, cfg);
  auto cpl = solve_cpl(prob, cfg);
  CHECK(pl.status == SolveStatus::converged);
  CHECK(cpl.status == SolveStatus::converged);
  // same accepted steps, bit for bit, so the iterates coincide exactly
  std::vector<std::pair<double, double>> a, b;
  for (const auto& r : pl.trace)
    if (r.event == TraceRow::Event::step) a.emplace_back(r.step, r.gap);
  for (const auto& r : cpl.trace)
    if (r.event == TraceRow::Event::step) b.emplace_back(r.step, r.gap);
  CHECK(a == b);
  CHECK(pl.point.path_flow == cpl.point.path_flow);
  CHECK(pl.point.demand == cpl.point.demand);
  CHECK(pl.block_iters == cpl.block_iters);
}

TEST_CASE("wireless descent finds the shared-band equilibrium") {
  auto prob = ts::tiny_wireless();
  SolverConfig cfg;
  cfg.accuracy = 1e-6;
  for (auto method : {Method::pl, Method::cpl}) {
    auto res = method == Method::pl ? solve_pl(prob, cfg) : solve_cpl(prob, cfg);
    CHECK(res.status == SolveStatus::converged);
    CHECK(res.point.path_flow[0] == doctest::Approx(ts::kTinyWX1).epsilon(1e-2));
    CHECK(res.point.path_flow[1] == doctest::Approx(ts::kTinyWX2).epsilon(1e-2));
    CHECK(res.point.demand[0] == doctest::Approx(ts::kTinyWY).epsilon(1e-2));
    CHECK(res.objective == doctest::Approx(ts::kTinyWObjective).epsilon(1e-6));
    double bal = res.point.path_flow[0] + res.point.path_flow[1] - res.point.demand[0];
    CHECK(std::abs(bal) <= 1e-10);
  }
}

TEST_CASE("deterministic reruns produce identical traces") {
  auto prob = ts::tiny_parallel();
  SolverConfig cfg;
  cfg.accuracy = 1e-3;
  cfg.keep_trace = true;
  auto a = solve_pl(prob, cfg);
  auto b = solve_pl(prob, cfg);
  REQUIRE(a.trace.size() == b.trace.size());
  for (std::size_t i = 0; i < a.trace.size(); ++i) {
    CHECK(a.trace[i].objective == b.trace[i].objective);
    CHECK(a.trace[i].delta == b.trace[i].delta);
    CHECK(a.trace[i].step == b.trace[i].step);
  }
  CHECK(a.point.path_flow == b.point.path_flow);
}

TEST_CASE("trace sink streams the same rows the result keeps") {
  struct Collect : TraceSink {
    std::vector<TraceRow> rows;
    void row(const TraceRow& r) override { rows.push_back(r); }
  } sink;
  auto prob = ts::tiny_parallel();
  SolverConfig cfg;
  cfg.accuracy = 1.0;
  cfg.keep_trace = true;
  cfg.sink = &sink;
  auto res = solve_pl(prob, cfg);
  REQUIRE(sink.rows.size() == res.trace.size());
  for (std::size_t i = 0; i < sink.rows.size(); ++i) {
    CHECK(sink.rows[i].event == res.trace[i].event);
    CHECK(sink.rows[i].block_iters == res.trace[i].block_iters);
    CHECK(sink.rows[i].delta == res.trace[i].delta);
  }
  CHECK(res.trace.back().event == TraceRow::Event::done);
}

TEST_CASE("penalty schedule squeezes the cap violation") {
  auto prob = ts::tiny_wireless_capped();
  SolverConfig cfg;
  PenaltyConfig pen;
  pen.stages = 3;  // tau = 10 .. 1e3
  auto res = solve_penalized(prob, cfg, pen);
  REQUIRE(res.stages.size() == 3);
  CHECK(res.status == SolveStatus::converged);
  double tau = 10;
  for (const auto& st : res.stages) {
    CHECK(st.tau == doctest::Approx(tau));
    tau *= 10;
  }
  for (std::size_t i = 1; i < res.stages.size(); ++i)
    CHECK(res.stages[i].violation <= res.stages[i - 1].violation + 1e-12);
  CHECK(res.point.path_flow[0] == doctest::Approx(ts::kCapX1).epsilon(2e-2));
  CHECK(res.point.path_flow[1] == doctest::Approx(ts::kCapX2).epsilon(2e-2));
  CHECK(res.point.demand[0] == doctest::Approx(ts::kCapY).epsilon(2e-2));
  CHECK(res.objective == doctest::Approx(ts::kCapObjective).epsilon(1e-2));
}

TEST_CASE("slack caps collapse the schedule to one stage") {
  auto prob = ts::tiny_wireless_capped();
  prob.cap = {100, 100};  // far above the unconstrained equilibrium
  SolverConfig cfg;
  auto res = solve_penalized(prob, cfg, PenaltyConfig{});
  REQUIRE(res.stages.size() == 1);
  CHECK(res.stages[0].violation == 0.0);
  CHECK(res.point.path_flow[0] == doctest::Approx(ts::kTinyWX1).epsilon(5e-2));
}

TEST_CASE("stage effort caps bound each stage and flag the result") {
  auto prob = ts::tiny_wireless_capped();
  SolverConfig cfg;
  PenaltyConfig pen;
  pen.stages = 4;
  pen.stage_block_iters = 20;
  auto res = solve_penalized(prob, cfg, pen);
  REQUIRE(res.stages.size() == 4);
  CHECK(res.status == SolveStatus::budget_exhausted);
  long long total = 0;
  for (const auto& st : res.stages) {
    CHECK(st.block_iters <= 20);
    total += st.block_iters;
  }
  CHECK(total == res.block_iters);
}

TEST_CASE("unsolvable shapes are rejected up front") {
  auto prob = ts::tiny_parallel();
  prob.pairs[0].buyers[0].cap = kInf;
  CHECK_THROWS_AS(solve_pl(prob, SolverConfig{}), std::invalid_argument);
  CHECK_THROWS_AS(solve_cpl(prob, SolverConfig{}), std::invalid_argument);

  auto dec = ts::tiny_parallel();
  dec.arcs[0].cost = ScalarFn::affine(1, -0.5);  // decreasing arc cost
  CHECK_THROWS_AS(solve_pl(dec, SolverConfig{}), std::invalid_argument);

  auto inc = ts::tiny_parallel();
  inc.pairs[0].buyers[0].disutility = ScalarFn::affine(1, 0.5);  // increasing h
  CHECK_THROWS_AS(solve_pl(inc, SolverConfig{}), std::invalid_argument);

  auto w = ts::tiny_wireless();
  CHECK_THROWS_AS(solve_penalized(w, SolverConfig{}, PenaltyConfig{}),
                  std::invalid_argument);  // infinite provider caps
}

}  // TEST_SUITE
