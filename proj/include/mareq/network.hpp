#pragma once
#include <string>
#include <vector>

#include "mareq/market.hpp"
#include "mareq/scalar_fn.hpp"

namespace mareq {

struct Arc {
  int tail = 0, head = 0;
  ScalarFn cost;  // c_a(f_a), nondecreasing
};

struct Buyer {
  ScalarFn disutility;  // h_j(y_j), decreasing
  double cap = kInf;    // gamma_j
};

struct OdPair {
  int origin = 0, dest = 0;
  std::vector<std::vector<int>> paths;  // arc-id chains origin -> dest
  std::vector<Buyer> buyers;
};

// Path-flow network with elastic, possibly capped demands.  Each O/D pair is
// one commodity block: path flows are the supply side, per-buyer demands the
// demand side, and total flow equals total demand.
struct NetworkProblem {
  int nodes = 0;
  std::vector<Arc> arcs;
  std::vector<OdPair> pairs;

  std::size_t path_count() const;
  std::size_t buyer_count() const;
  // Throws std::invalid_argument on dangling arc ids or paths that do not
  // chain origin to destination.
  void validate() const;
};

// Path flows (pairs in order, paths within pair) and demands (pairs in
// order, buyers within pair).
struct FlowPoint {
  std::vector<double> path_flow;
  std::vector<double> demand;
};

enum class EquilibriumForm { kkt, complementarity, implication };

struct CheckReport {
  bool passed = false;
  std::string detail;                    // first violation, empty if passed
  std::vector<PriceInterval> intervals;  // kkt form only
};

// Arc loads induced by the path flows (sum over paths through the arc).
std::vector<double> arc_flows(const NetworkProblem& prob, const FlowPoint& w);

// Cost of every path at the given arc loads, flat in path order.
std::vector<double> path_costs(const NetworkProblem& prob,
                               const std::vector<double>& arc_flow);

// Feasibility of w: nonnegative flows, demands in [0, cap], per-pair balance.
bool is_feasible(const NetworkProblem& prob, const FlowPoint& w, double tol);

// Equilibrium test in one of three equivalent forms.  kkt recovers per-pair
// clearing-price intervals through the market reduction and works for any
// caps; the complementarity and implication forms are the multiplier-free
// pairwise tests, equivalent to kkt only when no demand cap binds.
CheckReport check_equilibrium(const NetworkProblem& prob, const FlowPoint& w,
                              double tol, EquilibriumForm form);

// Market image of the network: paths become traders with bounds [0, inf),
// buyers keep [0, cap], balance 0, and prices evaluate path costs and
// disutilities at the flat point.
MarketProblem to_market(const NetworkProblem& prob);

std::vector<double> flatten(const NetworkProblem& prob, const FlowPoint& w);
FlowPoint unflatten(const NetworkProblem& prob, const std::vector<double>& flat);

}  // namespace mareq
