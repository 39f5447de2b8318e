#include "mareq/market.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mareq {

double CommodityBlock::feasible_lo() const {
  double lo = 0;
  for (double v : trader_lo) lo += v;
  for (double v : buyer_up) {
    if (v == kInf) return -kInf;
    lo -= v;
  }
  return lo;
}

double CommodityBlock::feasible_hi() const {
  double hi = 0;
  for (double v : trader_up) {
    if (v == kInf) return kInf;
    hi += v;
  }
  for (double v : buyer_lo) hi -= v;
  return hi;
}

std::size_t MarketProblem::block_offset(std::size_t s) const {
  std::size_t off = 0;
  for (std::size_t i = 0; i < s; ++i) off += blocks[i].size();
  return off;
}

std::size_t MarketProblem::total_size() const { return block_offset(blocks.size()); }

namespace {

double clampd(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

// Net supply of the projected point as a function of the balance multiplier;
// nonincreasing in lam.
double net_supply(const CommodityBlock& b, const std::vector<double>& c, double lam) {
  double r = -b.balance;
  const std::size_t m = b.traders();
  for (std::size_t i = 0; i < m; ++i) r += clampd(c[i] - lam, b.trader_lo[i], b.trader_up[i]);
  for (std::size_t j = 0; j < b.buyers(); ++j)
    r -= clampd(c[m + j] + lam, b.buyer_lo[j], b.buyer_up[j]);
  return r;
}

}  // namespace

std::vector<double> project_to_block(const CommodityBlock& block,
                                     const std::vector<double>& point) {
  if (point.size() != block.size())
    throw std::invalid_argument("project_to_block: point size mismatch");
  for (std::size_t i = 0; i < block.traders(); ++i)
    if (block.trader_lo[i] > block.trader_up[i])
      throw std::invalid_argument("project_to_block: empty trader box");
  for (std::size_t j = 0; j < block.buyers(); ++j)
    if (block.buyer_lo[j] > block.buyer_up[j])
      throw std::invalid_argument("project_to_block: empty buyer box");
  if (block.balance < block.feasible_lo() || block.balance > block.feasible_hi())
    throw std::invalid_argument("project_to_block: balance outside feasible interval");

  // Bracket the multiplier, then bisect net_supply to machine precision.
  double scale = 1 + std::abs(block.balance);
  for (double v : point) scale = std::max(scale, std::abs(v));
  for (double v : block.trader_lo) scale = std::max(scale, std::abs(v));
  for (double v : block.buyer_lo) scale = std::max(scale, std::abs(v));
  for (double v : block.trader_up)
    if (v != kInf) scale = std::max(scale, std::abs(v));
  for (double v : block.buyer_up)
    if (v != kInf) scale = std::max(scale, std::abs(v));

  double lo = -2 * scale, hi = 2 * scale;
  while (net_supply(block, point, lo) < 0) lo *= 2;
  while (net_supply(block, point, hi) > 0) hi *= 2;
  for (int it = 0; it < 200 && hi - lo > 1e-16 * scale; ++it) {
    double mid = 0.5 * (lo + hi);
    (net_supply(block, point, mid) >= 0 ? lo : hi) = mid;
  }
  double lam = 0.5 * (lo + hi);

  std::vector<double> out(block.size());
  const std::size_t m = block.traders();
  for (std::size_t i = 0; i < m; ++i)
    out[i] = clampd(point[i] - lam, block.trader_lo[i], block.trader_up[i]);
  for (std::size_t j = 0; j < block.buyers(); ++j)
    out[m + j] = clampd(point[m + j] + lam, block.buyer_lo[j], block.buyer_up[j]);

  // Fold the residual rounding error into the interior variable with the most
  // slack so the balance holds essentially exactly.
  double r = -block.balance;
  for (std::size_t i = 0; i < m; ++i) r += out[i];
  for (std::size_t j = 0; j < block.buyers(); ++j) r -= out[m + j];
  if (r != 0) {
    int best = -1;
    double best_slack = 0;
    for (std::size_t i = 0; i < m; ++i) {
      double s = std::min(out[i] - block.trader_lo[i],
                          block.trader_up[i] == kInf ? kInf : block.trader_up[i] - out[i]);
      if (s > best_slack) { best_slack = s; best = static_cast<int>(i); }
    }
    if (best >= 0 && best_slack > std::abs(r)) out[best] -= r;
  }
  return out;
}

double vi_residual(const MarketProblem& prob, const std::vector<double>& w,
                   const std::vector<double>& probe) {
  auto price = prob.prices(w);
  double r = 0;
  std::size_t off = 0;
  for (const auto& b : prob.blocks) {
    const std::size_t m = b.traders();
    for (std::size_t i = 0; i < m; ++i) r += price[off + i] * (probe[off + i] - w[off + i]);
    for (std::size_t j = 0; j < b.buyers(); ++j)
      r -= price[off + m + j] * (probe[off + m + j] - w[off + m + j]);
    off += b.size();
  }
  return r;
}

VerifyReport verify_equilibrium(const MarketProblem& prob,
                                const std::vector<double>& w, double tol) {
  VerifyReport rep;
  rep.intervals.resize(prob.blocks.size());
  if (w.size() != prob.total_size())
    throw std::invalid_argument("verify_equilibrium: point size mismatch");

  // Feasibility first: box membership and balance, both within tol scaled.
  std::size_t off = 0;
  for (std::size_t s = 0; s < prob.blocks.size(); ++s) {
    const auto& b = prob.blocks[s];
    const std::size_t m = b.traders();
    double bal = -b.balance;
    for (std::size_t i = 0; i < m; ++i) {
      double v = w[off + i], atol = tol * (1 + std::abs(v));
      if (v < b.trader_lo[i] - atol || (b.trader_up[i] != kInf && v > b.trader_up[i] + atol)) {
        std::ostringstream os;
        os << "block " << s << " trader " << i << " out of bounds: " << v;
        rep.detail = os.str();
        return rep;
      }
      bal += v;
    }
    for (std::size_t j = 0; j < b.buyers(); ++j) {
      double v = w[off + m + j], atol = tol * (1 + std::abs(v));
      if (v < b.buyer_lo[j] - atol || (b.buyer_up[j] != kInf && v > b.buyer_up[j] + atol)) {
        std::ostringstream os;
        os << "block " << s << " buyer " << j << " out of bounds: " << v;
        rep.detail = os.str();
        return rep;
      }
      bal -= v;
    }
    if (std::abs(bal) > tol * (1 + std::abs(b.balance))) {
      std::ostringstream os;
      os << "block " << s << " balance error " << bal;
      rep.detail = os.str();
      return rep;
    }
    off += b.size();
  }
  rep.feasible = true;

  auto price = prob.prices(w);
  off = 0;
  rep.equilibrium = true;
  for (std::size_t s = 0; s < prob.blocks.size(); ++s) {
    const auto& b = prob.blocks[s];
    const std::size_t m = b.traders();
    PriceInterval& iv = rep.intervals[s];
    auto raise_lo = [&](double v, int part) {
      if (v > iv.lo) { iv.lo = v; iv.lo_part = part; }
    };
    auto drop_hi = [&](double v, int part) {
      if (v < iv.hi) { iv.hi = v; iv.hi_part = part; }
    };
    for (std::size_t i = 0; i < m; ++i) {
      double lo = b.trader_lo[i], up = b.trader_up[i];
      double v = w[off + i], g = price[off + i];
      double atol = tol * (1 + std::abs(v));
      bool at_lo = v <= lo + atol;
      bool at_up = up != kInf && v >= up - atol;
      if (at_lo && at_up) continue;  // fixed variable, no condition
      if (at_lo) drop_hi(g, static_cast<int>(i));
      else if (at_up) raise_lo(g, static_cast<int>(i));
      else { raise_lo(g, static_cast<int>(i)); drop_hi(g, static_cast<int>(i)); }
    }
    for (std::size_t j = 0; j < b.buyers(); ++j) {
      double lo = b.buyer_lo[j], up = b.buyer_up[j];
      double v = w[off + m + j], h = price[off + m + j];
      double atol = tol * (1 + std::abs(v));
      bool at_lo = v <= lo + atol;
      bool at_up = up != kInf && v >= up - atol;
      int part = static_cast<int>(m + j);
      if (at_lo && at_up) continue;
      if (at_lo) raise_lo(h, part);
      else if (at_up) drop_hi(h, part);
      else { raise_lo(h, part); drop_hi(h, part); }
    }
    if (iv.lo > iv.hi + tol * (1 + std::abs(iv.lo)) && rep.equilibrium) {
      rep.equilibrium = false;
      auto name = [&](int part) {
        std::ostringstream os;
        if (part < 0) os << "none";
        else if (part < static_cast<int>(m)) os << "trader " << part;
        else os << "buyer " << (part - static_cast<int>(m));
        return os.str();
      };
      std::ostringstream os;
      os << "block " << s << ": price interval empty, " << name(iv.lo_part)
         << " needs lambda >= " << iv.lo << " but " << name(iv.hi_part)
         << " needs lambda <= " << iv.hi;
      rep.detail = os.str();
    }
    off += b.size();
  }
  return rep;
}

}  // namespace mareq
