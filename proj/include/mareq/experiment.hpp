#pragma once
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mareq/instance_io.hpp"
#include "mareq/solver.hpp"

namespace mareq {

// Benchmark protocol: run the configured methods on one instance and record
// the cumulative block-iteration count at the first trace row whose gap sum
// reaches each accuracy threshold.  CPL step rows use the running stale sum,
// so a crossing can precede the next exact recomputation; the trace keeps
// the exact flag for interpretation.
struct ExperimentSpec {
  Instance instance;
  std::vector<Method> methods;            // run order = listed order
  std::vector<SolverConfig> configs;      // resolved per method, same order
  std::vector<double> thresholds;         // strictly decreasing
  std::string trace_prefix;               // empty = no trace files
};

struct MethodOutcome {
  Method method = Method::pl;
  SolveStatus status = SolveStatus::converged;
  long long block_iters = 0;  // total spent
  double delta = 0;           // final exact gap sum
  // crossings[t] = block iterations when thresholds[t] was first reached;
  // empty when the run ended before reaching it.
  std::vector<std::optional<long long>> crossings;
};

struct ExperimentResult {
  std::vector<double> thresholds;
  std::vector<MethodOutcome> outcomes;
};

// One trace row as a single-line JSON object (keys event, iters, block, gap,
// step, objective, delta, exact, stage, delta_l).
void write_trace_row(std::ostream& out, const TraceRow& row);

struct JsonlTraceSink : TraceSink {
  explicit JsonlTraceSink(std::ostream& out) : out_(&out) {}
  void row(const TraceRow& r) override { write_trace_row(*out_, r); }

 private:
  std::ostream* out_;
};

// Spec document: {"instance": path-or-object, "methods": ["pl","cpl"],
// "thresholds": [0.2, 0.1, 0.05], "solver": {...}, "pl": {...}, "cpl": {...},
// "trace_prefix": "runs/grid3"}.  "solver" sets shared options; "pl"/"cpl"
// override per method.  Relative instance paths resolve against base_dir.
ExperimentSpec parse_experiment(const std::string& text, const std::string& base_dir);
ExperimentSpec load_experiment(const std::string& path);

// Runs every method cell; with trace_prefix set, streams rows to
// <prefix>.<method>.jsonl while solving.
ExperimentResult run_experiment(const ExperimentSpec& spec);

// CSV table, one row per threshold, one column per method, "-" when a run
// ended before reaching the threshold.
std::string render_table(const ExperimentResult& result);

}  // namespace mareq
