#include <stdexcept>

#include <doctest.h>

#include "../support/oracles.hpp"
#include "mareq/network.hpp"

using namespace mareq;
using testsupport::kTinyLambda;
using testsupport::kTinyX1;
using testsupport::kTinyX2;
using testsupport::kTinyY;
using testsupport::tiny_parallel;

TEST_SUITE("network-model") {

TEST_CASE("structure counters and validation") {
  auto prob = tiny_parallel();
  CHECK(prob.path_count() == 2);
  CHECK(prob.buyer_count() == 1);
  CHECK_NOTHROW(prob.validate());

  auto broken = prob;
  broken.arcs[0].head = 5;
  CHECK_THROWS_AS(broken.validate(), std::invalid_argument);

  broken = prob;
  broken.pairs[0].paths[1] = {1, 0};  // does not chain 0 -> 1
  CHECK_THROWS_AS(broken.validate(), std::invalid_argument);

  broken = prob;
  broken.pairs[0].buyers[0].cap = 0;
  CHECK_THROWS_AS(broken.validate(), std::invalid_argument);
}

TEST_CASE("arc flows add path contributions") {
  auto prob = tiny_parallel();
  auto f = arc_flows(prob, {{kTinyX1, kTinyX2}, {kTinyY}});
  CHECK(f[0] == doctest::Approx(kTinyX1));
  CHECK(f[1] == doctest::Approx(kTinyX2));

  // shared arc: two pairs both pushing through arc 1
  NetworkProblem shared;
  shared.nodes = 3;
  shared.arcs = {{0, 1, ScalarFn::affine(1, 1)}, {1, 2, ScalarFn::affine(1, 1)}};
  OdPair a, b;
  a.origin = 0;
  a.dest = 2;
  a.paths = {{0, 1}};
  a.buyers = {{ScalarFn::affine(5, -1), 5.0}};
  b.origin = 1;
  b.dest = 2;
  b.paths = {{1}};
  b.buyers = {{ScalarFn::affine(5, -1), 5.0}};
  shared.pairs = {a, b};
  auto g = arc_flows(shared, {{2.0, 3.0}, {2.0, 3.0}});
  CHECK(g[0] == doctest::Approx(2.0));
  CHECK(g[1] == doctest::Approx(5.0));
}

TEST_CASE("path costs at the known equilibrium") {
  auto prob = tiny_parallel();
  auto g = path_costs(prob, arc_flows(prob, {{kTinyX1, kTinyX2}, {kTinyY}}));
  CHECK(g[0] == doctest::Approx(kTinyLambda));
  CHECK(g[1] == doctest::Approx(kTinyLambda));
}

TEST_CASE("feasibility checks bounds and balance") {
  auto prob = tiny_parallel();
  CHECK(is_feasible(prob, {{1, 2}, {3}}, 1e-9));
  CHECK_FALSE(is_feasible(prob, {{-1, 4}, {3}}, 1e-9));
  CHECK_FALSE(is_feasible(prob, {{6, 6}, {12}}, 1e-9));  // cap is 10
  CHECK_FALSE(is_feasible(prob, {{1, 2}, {4}}, 1e-9));   // balance broken
  CHECK_FALSE(is_feasible(prob, {{1, 2}, {3, 4}}, 1e-9));  // wrong shape
}

TEST_CASE("all three forms accept the equilibrium") {
  auto prob = tiny_parallel();
  FlowPoint eq{{kTinyX1, kTinyX2}, {kTinyY}};
  for (auto form : {EquilibriumForm::kkt, EquilibriumForm::complementarity,
                    EquilibriumForm::implication}) {
    auto rep = check_equilibrium(prob, eq, 1e-8, form);
    CHECK(rep.passed);
  }
  auto rep = check_equilibrium(prob, eq, 1e-8, EquilibriumForm::kkt);
  REQUIRE(rep.intervals.size() == 1);
  CHECK(rep.intervals[0].lo <= kTinyLambda + 1e-8);
  CHECK(rep.intervals[0].hi >= kTinyLambda - 1e-8);
}

TEST_CASE("one-path overload is rejected and the report names the path") {
  auto prob = tiny_parallel();
  FlowPoint w{{kTinyY, 0.0}, {kTinyY}};  // everything on the dearer-to-load path
  auto comp = check_equilibrium(prob, w, 1e-8, EquilibriumForm::complementarity);
  CHECK_FALSE(comp.passed);
  CHECK(comp.detail.find("path 0") != std::string::npos);
  auto kkt = check_equilibrium(prob, w, 1e-8, EquilibriumForm::kkt);
  CHECK_FALSE(kkt.passed);
}

TEST_CASE("forms split once a demand cap binds") {
  auto prob = tiny_parallel();
  prob.pairs[0].buyers[0].cap = 4.0;
  // KKT with the cap active: 1 + x1 = 2 + x2, x1 + x2 = 4 -> x = (2.5, 1.5),
  // lambda = 3.5, while h(4) = 6 stays above the price.
  FlowPoint w{{2.5, 1.5}, {4.0}};
  CHECK(check_equilibrium(prob, w, 1e-8, EquilibriumForm::kkt).passed);
  CHECK_FALSE(
      check_equilibrium(prob, w, 1e-8, EquilibriumForm::complementarity).passed);
  CHECK_FALSE(
      check_equilibrium(prob, w, 1e-8, EquilibriumForm::implication).passed);
}

TEST_CASE("infeasible points never verify") {
  auto prob = tiny_parallel();
  auto rep = check_equilibrium(prob, {{1, 1}, {5}}, 1e-8, EquilibriumForm::kkt);
  CHECK_FALSE(rep.passed);
  CHECK(rep.detail == "point not feasible");
  CHECK_THROWS_AS(check_equilibrium(prob, {{1}, {1}}, 1e-8, EquilibriumForm::kkt),
                  std::invalid_argument);
}

TEST_CASE("market image of the two-arc instance") {
  auto prob = tiny_parallel();
  auto mp = to_market(prob);
  REQUIRE(mp.blocks.size() == 1);
  CHECK(mp.blocks[0].traders() == 2);
  CHECK(mp.blocks[0].buyers() == 1);
  CHECK(mp.blocks[0].balance == 0);

  FlowPoint eq{{kTinyX1, kTinyX2}, {kTinyY}};
  auto rep = verify_equilibrium(mp, flatten(prob, eq), 1e-8);
  CHECK(rep.equilibrium);
  REQUIRE(rep.intervals.size() == 1);
  CHECK(rep.intervals[0].lo <= kTinyLambda + 1e-8);
  CHECK(rep.intervals[0].hi >= kTinyLambda - 1e-8);
}

TEST_CASE("flatten and unflatten are inverse") {
  auto prob = testsupport::tiny_parallel();
  FlowPoint w{{1.5, 2.5}, {4.0}};
  auto flat = flatten(prob, w);
  REQUIRE(flat.size() == 3);
  CHECK(flat[0] == 1.5);
  CHECK(flat[1] == 2.5);
  CHECK(flat[2] == 4.0);
  auto back = unflatten(prob, flat);
  CHECK(back.path_flow == w.path_flow);
  CHECK(back.demand == w.demand);
}

}  // TEST_SUITE
