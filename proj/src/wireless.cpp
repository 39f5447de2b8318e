#include "mareq/wireless.hpp"

#include <algorithm>
#include <stdexcept>

namespace mareq {

void WirelessProblem::validate() const {
  if (base_price.empty() || classes.empty())
    throw std::invalid_argument("wireless problem needs providers and classes");
  if (cap.size() != base_price.size())
    throw std::invalid_argument("cap count must match provider count");
  if (congestion < 0) throw std::invalid_argument("congestion must be nonnegative");
  for (double a : cap)
    if (!(a > 0)) throw std::invalid_argument("provider cap must be positive");
  // Class caps bound the feasible set; unlike network demand caps they are
  // part of the model and must be finite.
  for (const auto& c : classes)
    if (!(c.cap > 0) || c.cap == kInf)
      throw std::invalid_argument("class cap must be positive and finite");
}

std::vector<double> penalized_price(const WirelessProblem& prob,
                                    const std::vector<double>& x, double tau) {
  double total = 0;
  for (double v : x) total += v;
  std::vector<double> g(prob.providers());
  for (std::size_t i = 0; i < g.size(); ++i) {
    g[i] = prob.base_price[i](x[i]) + prob.congestion * total;
    if (tau > 0 && prob.cap[i] != kInf)
      g[i] += tau * std::max(x[i] - prob.cap[i], 0.0);
  }
  return g;
}

MarketProblem to_market(const WirelessProblem& prob) {
  MarketProblem mp;
  CommodityBlock b;
  b.trader_lo.assign(prob.providers(), 0.0);
  b.trader_up = prob.cap;
  for (const auto& c : prob.classes) {
    b.buyer_lo.push_back(0.0);
    b.buyer_up.push_back(c.cap);
  }
  b.balance = 0;
  mp.blocks.push_back(std::move(b));
  mp.prices = [&prob](const std::vector<double>& flat) {
    const std::size_t m = prob.providers();
    std::vector<double> x(flat.begin(), flat.begin() + m);
    auto g = penalized_price(prob, x, 0.0);
    for (std::size_t j = 0; j < prob.classes.size(); ++j)
      g.push_back(prob.classes[j].disutility(flat[m + j]));
    return g;
  };
  return mp;
}

}  // namespace mareq
