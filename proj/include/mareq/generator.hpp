#pragma once
#include <cstdint>
#include <random>

#include "mareq/network.hpp"
#include "mareq/wireless.hpp"

namespace mareq {

// Deterministic uniform draws on top of mt19937_64; identical seeds give
// identical instances on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}
  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [0, n).
  std::size_t index(std::size_t n) {
    return static_cast<std::size_t>(uniform() * static_cast<double>(n));
  }

 private:
  std::mt19937_64 eng_;
};

struct NetworkGenConfig {
  int nodes = 8;
  int arcs = 20;
  int od_pairs = 2;
  int paths_per_pair = 3;
  int buyers_per_pair = 2;
  double cost_c0_lo = 1.0, cost_c0_hi = 10.0;
  double cost_c1_lo = 0.5, cost_c1_hi = 2.0;
  double dis_c0_lo = 20.0, dis_c0_hi = 40.0;
  double dis_c1_lo = 0.1, dis_c1_hi = 1.0;
};

struct WirelessGenConfig {
  int providers = 3;
  int classes = 2;
  double base_c0_lo = 0.5, base_c0_hi = 3.0;
  double base_c1_lo = 0.5, base_c1_hi = 2.0;
  double congestion_lo = 0.05, congestion_hi = 0.3;
  double dis_c0_lo = 5.0, dis_c0_hi = 15.0;
  double dis_c1_lo = 0.8, dis_c1_hi = 2.0;
};

// Random network on a spanning chain plus random extra arcs, so every O/D
// pair drawn forward along the chain is reachable by construction.  Paths
// come from breadth-first enumeration, shortest first.  Buyer caps default
// to the zero crossing of the affine disutility.  Throws when the requested
// shape cannot be built (too many arcs, no pairs with enough paths).
NetworkProblem generate_network(std::uint64_t seed, const NetworkGenConfig& cfg);

WirelessProblem generate_wireless(std::uint64_t seed, const WirelessGenConfig& cfg);

}  // namespace mareq
