#pragma once
#include <vector>

#include "mareq/network.hpp"
#include "mareq/wireless.hpp"

namespace mareq {

// Merit function pieces: total = supply + demand, where supply integrates
// the (arc or provider) costs and demand integrates the negated
// disutilities.  The demand part is convex because every h_j decreases.
struct ObjectiveValue {
  double supply = 0;
  double demand = 0;
  double penalty = 0;  // exterior cap penalty, wireless with tau > 0 only
  double total() const { return supply + demand + penalty; }
};

ObjectiveValue objective(const NetworkProblem& prob, const FlowPoint& w);
ObjectiveValue objective(const WirelessProblem& prob, const std::vector<double>& x,
                         const std::vector<double>& y, double tau = 0.0);

// Gradient in the flat block layout (supply vars then demand vars per
// block); demand components carry -h_j as the derivative of the integrated
// disutility term.
std::vector<double> gradient(const NetworkProblem& prob, const FlowPoint& w);
std::vector<double> gradient(const WirelessProblem& prob, const std::vector<double>& x,
                             const std::vector<double>& y, double tau = 0.0);

// Gradient of the supply-integral part with respect to one block's
// variables: path costs for the block's paths, zeros for its demands.
std::vector<double> block_gradient(const NetworkProblem& prob, const FlowPoint& w,
                                   std::size_t block);

}  // namespace mareq
