#pragma once
#include <vector>

#include "mareq/market.hpp"
#include "mareq/network.hpp"
#include "mareq/scalar_fn.hpp"

namespace mareq {

// Single-resource allocation market: providers sell capacity x_i at price
// g_i(x) = base_i(x_i) + congestion * sum(x), user classes buy y_j with
// decreasing disutility.  One commodity block, balance sum(x) == sum(y).
// The descent solvers treat provider caps alpha_i by exterior penalty; the
// market image and the checker keep them as box bounds.
struct WirelessProblem {
  std::vector<ScalarFn> base_price;  // nondecreasing
  std::vector<double> cap;           // alpha_i, kInf when uncapped
  double congestion = 0;             // >= 0, keeps prices integrable
  std::vector<Buyer> classes;

  std::size_t providers() const { return base_price.size(); }
  void validate() const;
};

// Provider prices at x; with tau > 0 each price gains the exterior penalty
// slope tau * max(x_i - cap_i, 0).
std::vector<double> penalized_price(const WirelessProblem& prob,
                                    const std::vector<double>& x, double tau);

// Market image: providers become traders on [0, alpha_i], classes become
// buyers on [0, beta_j]; prices evaluate g at the flat point.
MarketProblem to_market(const WirelessProblem& prob);

}  // namespace mareq
