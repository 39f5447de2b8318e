#pragma once
#include <functional>
#include <vector>

#include "mareq/direction.hpp"
#include "mareq/network.hpp"
#include "mareq/wireless.hpp"

namespace mareq {

enum class Method { pl, cpl };
enum class DeltaRule { halve, harmonic };
enum class SolveStatus { converged, budget_exhausted, line_search_failed };

struct SolverConfig {
  double beta = 0.5;   // Armijo sufficient-decrease fraction, in (0, 1)
  double theta = 0.5;  // Armijo backtracking ratio, in (0, 1)
  int max_armijo_trials = 60;
  double delta0 = 10.0;  // CPL initial gap threshold
  DeltaRule delta_rule = DeltaRule::halve;
  double accuracy = 1e-6;          // stop when the exact gap sum reaches this
  long long max_block_iters = -1;  // < 0 means unlimited
  bool keep_trace = false;         // retain rows in SolveResult::trace
  struct TraceSink* sink = nullptr;  // optional streaming consumer
};

struct TraceRow {
  enum class Event { measure, step, restart, done };
  Event event = Event::measure;
  long long block_iters = 0;
  int block = -1;      // step rows: block stepped (-1 = full-space)
  double gap = 0;      // step rows: phi used by the line search
  double step = 0;     // step rows: accepted Armijo stepsize
  double objective = 0;
  double delta = 0;    // gap sum; exact=false marks the running stale sum
  bool exact = true;
  int stage = 0;       // restart rows: threshold stage l
  double delta_l = 0;  // restart rows: threshold in force
};

struct TraceSink {
  virtual void row(const TraceRow&) = 0;
  virtual ~TraceSink() = default;
};

struct PenaltyStage {
  double tau = 0;
  long long block_iters = 0;
  double delta = 0;      // inner gap reached
  double violation = 0;  // max cap excess at the stage solution
};

struct SolveResult {
  SolveStatus status = SolveStatus::converged;
  FlowPoint point;  // network: path flows/demands; wireless: x/y
  long long block_iters = 0;
  double delta = 0;      // last exact gap sum
  double objective = 0;  // recomputed at the returned point
  std::vector<TraceRow> trace;
  std::vector<PenaltyStage> stages;  // penalty solves only
};

struct PenaltyConfig {
  double tau0 = 10.0;
  double tau_factor = 10.0;
  int stages = 6;
  double inner_gap_factor = 0.1;  // stage t aims for gap <= factor / tau_t
  // Effort cap per stage (< 0 unlimited).  A stage that hits it leaves its
  // gap target unmet -- visible in its PenaltyStage record -- and the
  // schedule still advances: the outer loop's own stop rule is the
  // violation threshold below, not inner convergence.
  long long stage_block_iters = -1;
  double violation_stop = 0.0;  // stop early once max cap excess <= this
};

// Smallest-power-of-theta Armijo step for a direction with linearized gap
// phi: accepts the first t = theta^j with delta_f(t) <= -beta * t * phi.
// delta_f must return f(w + t p) - f(w).  Throws SolveError when
// max_armijo_trials powers are exhausted.
double armijo_step(const std::function<double(double)>& delta_f, double phi,
                   const SolverConfig& cfg, int* trials = nullptr);

SolveResult solve_pl(const NetworkProblem& prob, const SolverConfig& cfg);
SolveResult solve_cpl(const NetworkProblem& prob, const SolverConfig& cfg);
SolveResult solve_pl(const WirelessProblem& prob, const SolverConfig& cfg);
SolveResult solve_cpl(const WirelessProblem& prob, const SolverConfig& cfg);

// Exterior-penalty loop over the provider caps: solves a sequence of
// penalized problems with increasing tau, warm-starting each stage.
SolveResult solve_penalized(const WirelessProblem& prob, const SolverConfig& cfg,
                            const PenaltyConfig& pen);

}  // namespace mareq
