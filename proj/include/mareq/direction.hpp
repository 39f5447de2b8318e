#pragma once
#include <vector>

#include "mareq/network.hpp"
#include "mareq/wireless.hpp"

namespace mareq {

// Exact minimizer of the partially linearized block subproblem: supply
// prices frozen at the current point, demand term kept exact.
struct BlockDirection {
  std::vector<double> x;  // target supply allocation (all mass on `chosen`)
  std::vector<double> y;  // target per-buyer demands
  double gap = 0;         // phi_s at the evaluation point, >= 0
  double lam = 0;         // cheapest supply price used as the cut level
  int chosen = -1;        // index of the cheapest supply variable
};

// Solve h(y) = target on [0, hi]; closed form for affine, safeguarded
// bisection otherwise.  `fn` must be strictly monotone on the interval and
// bracket the target there.
double scalar_root(const ScalarFn& fn, double target, double lo, double hi);

// Core of the direction subproblem given frozen supply prices.  Picks the
// cheapest supply index (lowest index on ties), sets each buyer's demand by
// the three-case rule (cut below, cap above, root otherwise), routes the
// whole demand to the chosen index, and evaluates the linearized gap.
// Every buyer cap must be finite (the subproblem is unbounded otherwise);
// infinite caps are rejected.
BlockDirection solve_block_prices(const std::vector<double>& price,
                                  const std::vector<double>& x,
                                  const std::vector<double>& y,
                                  const std::vector<Buyer>& buyers);

// Allocation-free variant over block slices; `out` buffers are reused.
void solve_block_into(const double* price, std::size_t m, const double* x,
                      const double* y, const std::vector<Buyer>& buyers,
                      BlockDirection& out);

// Direction subproblem for one O/D pair of a network at the given arc loads.
BlockDirection solve_block_network(const NetworkProblem& prob, std::size_t pair,
                                   const std::vector<double>& arc_flow,
                                   const FlowPoint& w);

// Direction subproblem for the wireless block; tau > 0 uses penalized prices.
BlockDirection solve_block_wireless(const WirelessProblem& prob,
                                    const std::vector<double>& x,
                                    const std::vector<double>& y, double tau = 0.0);

}  // namespace mareq
