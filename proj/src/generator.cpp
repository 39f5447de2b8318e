#include "mareq/generator.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <stdexcept>
#include <utility>
#include <vector>

namespace mareq {
namespace {

// Simple paths from o to d, shortest first, ties broken by arc id.  The
// expansion budget bounds work on dense graphs.
std::vector<std::vector<int>> enumerate_paths(const std::vector<Arc>& arcs, int nodes,
                                              int o, int d, int want) {
  std::vector<std::vector<int>> out_arcs(static_cast<std::size_t>(nodes));
  for (std::size_t a = 0; a < arcs.size(); ++a)
    out_arcs[static_cast<std::size_t>(arcs[a].tail)].push_back(static_cast<int>(a));

  struct Partial {
    std::vector<int> path;
    std::vector<char> seen;
    int at;
  };
  std::deque<Partial> queue;
  queue.push_back({{}, std::vector<char>(static_cast<std::size_t>(nodes), 0), o});
  queue.back().seen[static_cast<std::size_t>(o)] = 1;

  std::vector<std::vector<int>> found;
  int budget = 20000;
  while (!queue.empty() && static_cast<int>(found.size()) < want && budget-- > 0) {
    Partial cur = std::move(queue.front());
    queue.pop_front();
    for (int a : out_arcs[static_cast<std::size_t>(cur.at)]) {
      int head = arcs[static_cast<std::size_t>(a)].head;
      if (cur.seen[static_cast<std::size_t>(head)]) continue;
      Partial next = cur;
      next.path.push_back(a);
      next.seen[static_cast<std::size_t>(head)] = 1;
      next.at = head;
      if (head == d) {
        found.push_back(next.path);
        if (static_cast<int>(found.size()) >= want) break;
      } else {
        queue.push_back(std::move(next));
      }
    }
  }
  return found;
}

}  // namespace

NetworkProblem generate_network(std::uint64_t seed, const NetworkGenConfig& cfg) {
  if (cfg.nodes < 2) throw std::invalid_argument("generator: need at least 2 nodes");
  if (cfg.arcs < cfg.nodes - 1)
    throw std::invalid_argument("generator: need at least nodes-1 arcs");
  const long max_arcs = static_cast<long>(cfg.nodes) * (cfg.nodes - 1);
  if (cfg.arcs > max_arcs) throw std::invalid_argument("generator: too many arcs");
  const long max_pairs = max_arcs / 2;
  if (cfg.od_pairs < 1 || cfg.od_pairs > max_pairs)
    throw std::invalid_argument("generator: bad od pair count");
  if (cfg.paths_per_pair < 1 || cfg.buyers_per_pair < 1)
    throw std::invalid_argument("generator: bad per-pair counts");

  Rng rng(seed);
  const std::size_t n = static_cast<std::size_t>(cfg.nodes);

  // Chain over a random permutation; every forward position pair is connected.
  std::vector<int> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = static_cast<int>(i);
  for (std::size_t i = n - 1; i > 0; --i)
    std::swap(perm[i], perm[rng.index(i + 1)]);

  NetworkProblem prob;
  prob.nodes = cfg.nodes;
  std::set<std::pair<int, int>> have;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    prob.arcs.push_back({perm[i], perm[i + 1], {}});
    have.insert({perm[i], perm[i + 1]});
  }
  while (static_cast<int>(prob.arcs.size()) < cfg.arcs) {
    int t = static_cast<int>(rng.index(n));
    int h = static_cast<int>(rng.index(n));
    if (t == h || have.count({t, h})) continue;
    prob.arcs.push_back({t, h, {}});
    have.insert({t, h});
  }
  for (auto& arc : prob.arcs)
    arc.cost = ScalarFn::affine(rng.uniform(cfg.cost_c0_lo, cfg.cost_c0_hi),
                                rng.uniform(cfg.cost_c1_lo, cfg.cost_c1_hi));

  // O/D pairs run forward along the chain, so at least one path exists.
  std::set<std::pair<int, int>> used;
  while (static_cast<int>(prob.pairs.size()) < cfg.od_pairs) {
    std::size_t i = rng.index(n);
    std::size_t j = rng.index(n);
    if (i == j) continue;
    if (i > j) std::swap(i, j);
    if (used.count({perm[i], perm[j]})) continue;
    used.insert({perm[i], perm[j]});

    OdPair pair;
    pair.origin = perm[i];
    pair.dest = perm[j];
    pair.paths = enumerate_paths(prob.arcs, cfg.nodes, pair.origin, pair.dest,
                                 cfg.paths_per_pair);
    for (int b = 0; b < cfg.buyers_per_pair; ++b) {
      double h0 = rng.uniform(cfg.dis_c0_lo, cfg.dis_c0_hi);
      double h1 = rng.uniform(cfg.dis_c1_lo, cfg.dis_c1_hi);
      // Cap at the zero crossing; demand past it is never profitable.
      pair.buyers.push_back({ScalarFn::affine(h0, -h1), h0 / h1});
    }
    prob.pairs.push_back(std::move(pair));
  }

  prob.validate();
  return prob;
}

WirelessProblem generate_wireless(std::uint64_t seed, const WirelessGenConfig& cfg) {
  if (cfg.providers < 1 || cfg.classes < 1)
    throw std::invalid_argument("generator: need at least one provider and class");

  Rng rng(seed);
  WirelessProblem prob;
  prob.congestion = rng.uniform(cfg.congestion_lo, cfg.congestion_hi);
  for (int i = 0; i < cfg.providers; ++i) {
    prob.base_price.push_back(ScalarFn::affine(rng.uniform(cfg.base_c0_lo, cfg.base_c0_hi),
                                               rng.uniform(cfg.base_c1_lo, cfg.base_c1_hi)));
    prob.cap.push_back(kInf);
  }
  for (int j = 0; j < cfg.classes; ++j) {
    double h0 = rng.uniform(cfg.dis_c0_lo, cfg.dis_c0_hi);
    double h1 = rng.uniform(cfg.dis_c1_lo, cfg.dis_c1_hi);
    prob.classes.push_back({ScalarFn::affine(h0, -h1), h0 / h1});
  }
  prob.validate();
  return prob;
}

}  // namespace mareq
