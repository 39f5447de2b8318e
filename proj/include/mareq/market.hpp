#pragma once
#include <functional>
#include <string>
#include <vector>

#include "mareq/common.hpp"

namespace mareq {

// One commodity: traders offer x_i in [trader_lo, trader_up], buyers bid
// y_j in [buyer_lo, buyer_up], and sum(x) - sum(y) == balance.
struct CommodityBlock {
  std::vector<double> trader_lo, trader_up;
  std::vector<double> buyer_lo, buyer_up;
  double balance = 0;

  std::size_t traders() const { return trader_lo.size(); }
  std::size_t buyers() const { return buyer_lo.size(); }
  std::size_t size() const { return traders() + buyers(); }
  // Widest balance the box admits; nonempty feasible set needs
  // lo <= balance <= hi.
  double feasible_lo() const;
  double feasible_hi() const;
};

// Multi-commodity market.  The flat point layout is, per block, trader
// variables then buyer variables, blocks concatenated in order.  The price
// evaluator returns trader prices g_i and buyer prices h_j in that same
// layout; prices may couple across blocks through the full point.
struct MarketProblem {
  std::vector<CommodityBlock> blocks;
  std::function<std::vector<double>(const std::vector<double>&)> prices;

  std::size_t block_offset(std::size_t s) const;
  std::size_t total_size() const;
};

// Clearing-price interval for one block: every price bound some participant
// imposes on lambda_s, tightest first.  Equilibrium holds iff lo <= hi
// (within tolerance).  lo_part / hi_part give the participant that pinned
// each side: 0..traders-1 are traders, traders..size-1 are buyers, -1 none.
struct PriceInterval {
  double lo = -kInf, hi = kInf;
  int lo_part = -1, hi_part = -1;
};

struct VerifyReport {
  bool feasible = false;
  bool equilibrium = false;
  std::vector<PriceInterval> intervals;
  // First violated condition, human-readable; empty when equilibrium holds.
  std::string detail;
};

// Euclidean projection of an arbitrary point (traders then buyers) onto the
// block's box-and-balance set.  Throws std::invalid_argument when the set is
// empty.
std::vector<double> project_to_block(const CommodityBlock& block,
                                     const std::vector<double>& point);

// <G(w), probe - w> with buyer components of G negated: nonnegative over all
// feasible probes exactly at equilibria.
double vi_residual(const MarketProblem& prob, const std::vector<double>& w,
                   const std::vector<double>& probe);

// Checks the two-sided equilibrium conditions at w by recovering the
// clearing-price interval of every block.  Interior variables pin both ends,
// bound-active variables pin one end, fixed variables (equal bounds) none.
VerifyReport verify_equilibrium(const MarketProblem& prob,
                                const std::vector<double>& w, double tol);

}  // namespace mareq
