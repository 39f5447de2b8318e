#include "mareq/direction.hpp"

#include <cmath>
#include <stdexcept>

namespace mareq {

double scalar_root(const ScalarFn& fn, double target, double lo, double hi) {
  if (fn.is_affine()) {
    if (fn.c1() == 0) throw std::invalid_argument("scalar_root: constant function");
    double t = (target - fn.c0()) / fn.c1();
    return std::min(std::max(t, lo), hi);
  }
  double flo = fn(lo) - target, fhi = fn(hi) - target;
  if (flo == 0) return lo;
  if (fhi == 0) return hi;
  if ((flo > 0) == (fhi > 0))
    throw std::invalid_argument("scalar_root: target not bracketed");
  for (int it = 0; it < 200 && hi - lo > 1e-15 * (1 + std::abs(lo) + std::abs(hi)); ++it) {
    double mid = 0.5 * (lo + hi);
    double fm = fn(mid) - target;
    if (fm == 0) return mid;
    if ((fm > 0) == (flo > 0)) { lo = mid; flo = fm; }
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

void solve_block_into(const double* price, std::size_t m, const double* x,
                      const double* y, const std::vector<Buyer>& buyers,
                      BlockDirection& out) {
  int q = 0;
  for (std::size_t i = 1; i < m; ++i)
    if (price[i] < price[q]) q = static_cast<int>(i);
  out.chosen = q;
  out.lam = price[q];

  out.y.resize(buyers.size());
  double total = 0;
  for (std::size_t j = 0; j < buyers.size(); ++j) {
    const auto& b = buyers[j];
    double ybar;
    if (b.disutility(0.0) <= out.lam) {
      ybar = 0.0;  // value at zero already below the cut: stay out
    } else if (b.cap != kInf && b.disutility(b.cap) >= out.lam) {
      ybar = b.cap;  // still above the cut at the cap: saturate
    } else {
      ybar = scalar_root(b.disutility, out.lam, 0.0, b.cap);
    }
    out.y[j] = ybar;
    total += ybar;
  }

  out.x.assign(m, 0.0);
  out.x[q] = total;

  double phi = 0;
  for (std::size_t i = 0; i < m; ++i) phi += price[i] * (x[i] - out.x[i]);
  // Demand part of the gap: integral of h between current and target demand.
  for (std::size_t j = 0; j < buyers.size(); ++j)
    phi += buyers[j].disutility.integral_between(y[j], out.y[j]);
  out.gap = phi;
}

BlockDirection solve_block_prices(const std::vector<double>& price,
                                  const std::vector<double>& x,
                                  const std::vector<double>& y,
                                  const std::vector<Buyer>& buyers) {
  if (price.empty() || price.size() != x.size() || y.size() != buyers.size())
    throw std::invalid_argument("solve_block_prices: size mismatch");
  for (const auto& b : buyers)
    if (b.cap == kInf)
      throw std::invalid_argument("block subproblem requires finite demand caps");
  BlockDirection d;
  solve_block_into(price.data(), price.size(), x.data(), y.data(), buyers, d);
  return d;
}

BlockDirection solve_block_network(const NetworkProblem& prob, std::size_t pair,
                                   const std::vector<double>& arc_flow,
                                   const FlowPoint& w) {
  std::size_t pbase = 0, jbase = 0;
  for (std::size_t s = 0; s < pair; ++s) {
    pbase += prob.pairs[s].paths.size();
    jbase += prob.pairs[s].buyers.size();
  }
  const auto& pr = prob.pairs[pair];
  std::vector<double> price(pr.paths.size());
  for (std::size_t p = 0; p < pr.paths.size(); ++p) {
    double c = 0;
    for (int aid : pr.paths[p]) c += prob.arcs[aid].cost(arc_flow[aid]);
    price[p] = c;
  }
  std::vector<double> x(w.path_flow.begin() + pbase,
                        w.path_flow.begin() + pbase + pr.paths.size());
  std::vector<double> y(w.demand.begin() + jbase,
                        w.demand.begin() + jbase + pr.buyers.size());
  return solve_block_prices(price, x, y, pr.buyers);
}

BlockDirection solve_block_wireless(const WirelessProblem& prob,
                                    const std::vector<double>& x,
                                    const std::vector<double>& y, double tau) {
  return solve_block_prices(penalized_price(prob, x, tau), x, y, prob.classes);
}

}  // namespace mareq
