#include "mareq/objective.hpp"

#include <algorithm>
#include <cmath>

namespace mareq {

ObjectiveValue objective(const NetworkProblem& prob, const FlowPoint& w) {
  ObjectiveValue v;
  auto f = arc_flows(prob, w);
  for (std::size_t a = 0; a < f.size(); ++a)
    v.supply += prob.arcs[a].cost.integral_between(0.0, f[a]);
  std::size_t j = 0;
  for (const auto& pr : prob.pairs)
    for (const auto& b : pr.buyers)
      v.demand -= b.disutility.integral_between(0.0, w.demand[j++]);
  return v;
}

ObjectiveValue objective(const WirelessProblem& prob, const std::vector<double>& x,
                         const std::vector<double>& y, double tau) {
  ObjectiveValue v;
  double total = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    v.supply += prob.base_price[i].integral_between(0.0, x[i]);
    total += x[i];
  }
  v.supply += 0.5 * prob.congestion * total * total;
  for (std::size_t j = 0; j < y.size(); ++j)
    v.demand -= prob.classes[j].disutility.integral_between(0.0, y[j]);
  if (tau > 0)
    for (std::size_t i = 0; i < x.size(); ++i)
      if (prob.cap[i] != kInf) {
        double over = std::max(x[i] - prob.cap[i], 0.0);
        v.penalty += 0.5 * tau * over * over;
      }
  return v;
}

std::vector<double> gradient(const NetworkProblem& prob, const FlowPoint& w) {
  auto g = path_costs(prob, arc_flows(prob, w));
  std::vector<double> grad;
  grad.reserve(g.size() + w.demand.size());
  std::size_t p = 0, j = 0;
  for (const auto& pr : prob.pairs) {
    for (std::size_t k = 0; k < pr.paths.size(); ++k) grad.push_back(g[p++]);
    for (const auto& b : pr.buyers) grad.push_back(-b.disutility(w.demand[j++]));
  }
  return grad;
}

std::vector<double> gradient(const WirelessProblem& prob, const std::vector<double>& x,
                             const std::vector<double>& y, double tau) {
  auto grad = penalized_price(prob, x, tau);
  for (std::size_t j = 0; j < y.size(); ++j)
    grad.push_back(-prob.classes[j].disutility(y[j]));
  return grad;
}

std::vector<double> block_gradient(const NetworkProblem& prob, const FlowPoint& w,
                                   std::size_t block) {
  auto g = path_costs(prob, arc_flows(prob, w));
  std::size_t pbase = 0;
  for (std::size_t s = 0; s < block; ++s) pbase += prob.pairs[s].paths.size();
  const auto& pr = prob.pairs[block];
  // Gradient of the supply integral only: demands enter the objective
  // through the separate disutility term, so their components are zero.
  std::vector<double> out(g.begin() + pbase, g.begin() + pbase + pr.paths.size());
  out.resize(pr.paths.size() + pr.buyers.size(), 0.0);
  return out;
}

}  // namespace mareq
