#include "mareq/network.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace mareq {

std::size_t NetworkProblem::path_count() const {
  std::size_t n = 0;
  for (const auto& p : pairs) n += p.paths.size();
  return n;
}

std::size_t NetworkProblem::buyer_count() const {
  std::size_t n = 0;
  for (const auto& p : pairs) n += p.buyers.size();
  return n;
}

void NetworkProblem::validate() const {
  for (const auto& a : arcs)
    if (a.tail < 0 || a.tail >= nodes || a.head < 0 || a.head >= nodes)
      throw std::invalid_argument("arc endpoint out of range");
  for (std::size_t s = 0; s < pairs.size(); ++s) {
    const auto& pr = pairs[s];
    if (pr.origin < 0 || pr.origin >= nodes || pr.dest < 0 || pr.dest >= nodes)
      throw std::invalid_argument("od endpoint out of range");
    if (pr.paths.empty() || pr.buyers.empty())
      throw std::invalid_argument("od pair needs at least one path and one buyer");
    for (const auto& path : pr.paths) {
      if (path.empty()) throw std::invalid_argument("empty path");
      int at = pr.origin;
      for (int aid : path) {
        if (aid < 0 || aid >= static_cast<int>(arcs.size()))
          throw std::invalid_argument("path references missing arc");
        if (arcs[aid].tail != at) throw std::invalid_argument("path does not chain");
        at = arcs[aid].head;
      }
      if (at != pr.dest) throw std::invalid_argument("path does not reach destination");
    }
    for (const auto& b : pr.buyers)
      if (!(b.cap > 0)) throw std::invalid_argument("buyer cap must be positive");
  }
}

std::vector<double> arc_flows(const NetworkProblem& prob, const FlowPoint& w) {
  std::vector<double> f(prob.arcs.size(), 0.0);
  std::size_t p = 0;
  for (const auto& pr : prob.pairs)
    for (const auto& path : pr.paths) {
      double x = w.path_flow[p++];
      for (int aid : path) f[aid] += x;
    }
  return f;
}

std::vector<double> path_costs(const NetworkProblem& prob,
                               const std::vector<double>& arc_flow) {
  std::vector<double> g;
  g.reserve(prob.path_count());
  for (const auto& pr : prob.pairs)
    for (const auto& path : pr.paths) {
      double c = 0;
      for (int aid : path) c += prob.arcs[aid].cost(arc_flow[aid]);
      g.push_back(c);
    }
  return g;
}

bool is_feasible(const NetworkProblem& prob, const FlowPoint& w, double tol) {
  if (w.path_flow.size() != prob.path_count() || w.demand.size() != prob.buyer_count())
    return false;
  std::size_t p = 0, j = 0;
  for (const auto& pr : prob.pairs) {
    double bal = 0, scale = 1;
    for (std::size_t k = 0; k < pr.paths.size(); ++k) {
      double x = w.path_flow[p++];
      if (x < -tol) return false;
      bal += x;
      scale += std::abs(x);
    }
    for (const auto& b : pr.buyers) {
      double y = w.demand[j++];
      if (y < -tol || (b.cap != kInf && y > b.cap + tol * (1 + b.cap))) return false;
      bal -= y;
      scale += std::abs(y);
    }
    if (std::abs(bal) > tol * scale) return false;
  }
  return true;
}

std::vector<double> flatten(const NetworkProblem& prob, const FlowPoint& w) {
  std::vector<double> flat;
  flat.reserve(w.path_flow.size() + w.demand.size());
  std::size_t p = 0, j = 0;
  for (const auto& pr : prob.pairs) {
    for (std::size_t k = 0; k < pr.paths.size(); ++k) flat.push_back(w.path_flow[p++]);
    for (std::size_t k = 0; k < pr.buyers.size(); ++k) flat.push_back(w.demand[j++]);
  }
  return flat;
}

FlowPoint unflatten(const NetworkProblem& prob, const std::vector<double>& flat) {
  FlowPoint w;
  std::size_t off = 0;
  for (const auto& pr : prob.pairs) {
    for (std::size_t k = 0; k < pr.paths.size(); ++k) w.path_flow.push_back(flat[off++]);
    for (std::size_t k = 0; k < pr.buyers.size(); ++k) w.demand.push_back(flat[off++]);
  }
  return w;
}

MarketProblem to_market(const NetworkProblem& prob) {
  MarketProblem mp;
  for (const auto& pr : prob.pairs) {
    CommodityBlock b;
    b.trader_lo.assign(pr.paths.size(), 0.0);
    b.trader_up.assign(pr.paths.size(), kInf);
    for (const auto& by : pr.buyers) {
      b.buyer_lo.push_back(0.0);
      b.buyer_up.push_back(by.cap);
    }
    b.balance = 0;
    mp.blocks.push_back(std::move(b));
  }
  mp.prices = [&prob](const std::vector<double>& flat) {
    FlowPoint w = unflatten(prob, flat);
    auto g = path_costs(prob, arc_flows(prob, w));
    std::vector<double> price;
    price.reserve(flat.size());
    std::size_t p = 0, j = 0;
    for (const auto& pr : prob.pairs) {
      for (std::size_t k = 0; k < pr.paths.size(); ++k) price.push_back(g[p++]);
      for (const auto& by : pr.buyers) price.push_back(by.disutility(w.demand[j++]));
    }
    return price;
  };
  return mp;
}

namespace {

CheckReport check_pairwise(const NetworkProblem& prob, const FlowPoint& w,
                           double tol, EquilibriumForm form) {
  CheckReport rep;
  auto g = path_costs(prob, arc_flows(prob, w));
  std::size_t pbase = 0, jbase = 0;
  for (std::size_t s = 0; s < prob.pairs.size(); ++s) {
    const auto& pr = prob.pairs[s];
    for (std::size_t p = 0; p < pr.paths.size(); ++p) {
      double gp = g[pbase + p], xp = w.path_flow[pbase + p];
      for (std::size_t j = 0; j < pr.buyers.size(); ++j) {
        double hj = pr.buyers[j].disutility(w.demand[jbase + j]);
        double yj = w.demand[jbase + j];
        double diff = gp - hj;
        double atol = tol * (1 + std::abs(gp) + std::abs(hj));
        bool both_positive = xp > tol * (1 + xp) && yj > tol * (1 + yj);
        bool bad;
        if (form == EquilibriumForm::complementarity)
          // g_p - h_j >= 0 always; equality when both sides are active.
          bad = diff < -atol || (both_positive && std::abs(diff) > atol);
        else
          // implication: positive difference forces one side inactive.
          bad = diff < -atol || (diff > atol && both_positive);
        if (bad) {
          std::ostringstream os;
          os << "pair " << s << " path " << p << " buyer " << j
             << ": path cost " << gp << " vs disutility " << hj
             << " with flow " << xp << ", demand " << yj;
          rep.detail = os.str();
          return rep;
        }
      }
    }
    pbase += pr.paths.size();
    jbase += pr.buyers.size();
  }
  rep.passed = true;
  return rep;
}

}  // namespace

CheckReport check_equilibrium(const NetworkProblem& prob, const FlowPoint& w,
                              double tol, EquilibriumForm form) {
  if (w.path_flow.size() != prob.path_count() || w.demand.size() != prob.buyer_count())
    throw std::invalid_argument("check_equilibrium: point size mismatch");
  if (!is_feasible(prob, w, tol)) {
    CheckReport rep;
    rep.detail = "point not feasible";
    return rep;
  }
  if (form != EquilibriumForm::kkt) return check_pairwise(prob, w, tol, form);

  MarketProblem mp = to_market(prob);
  VerifyReport vr = verify_equilibrium(mp, flatten(prob, w), tol);
  CheckReport rep;
  rep.passed = vr.equilibrium;
  rep.intervals = vr.intervals;
  if (!vr.equilibrium && !vr.detail.empty()) {
    // Translate market participants back to paths and buyers.
    std::string d = vr.detail;
    auto pos = d.find("trader");
    while (pos != std::string::npos) {
      d.replace(pos, 6, "path");
      pos = d.find("trader", pos);
    }
    auto bpos = d.find("block");
    if (bpos != std::string::npos) d.replace(bpos, 5, "pair");
    rep.detail = d;
  }
  return rep;
}

}  // namespace mareq
