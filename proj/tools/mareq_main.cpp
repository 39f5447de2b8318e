#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <variant>

#include <CLI11.hpp>

#include "mareq/experiment.hpp"
#include "mareq/generator.hpp"
#include "mareq/instance_io.hpp"
#include "mareq/solver.hpp"

namespace {

using namespace mareq;

constexpr const char* kTraceHelp =
    "Trace files are JSON lines, one object per row:\n"
    "  event      measure | step | restart | done\n"
    "  iters      cumulative block iterations\n"
    "  block      block stepped on step rows, -1 on full-space rows\n"
    "  gap        block gap phi used by the line search\n"
    "  step       accepted Armijo stepsize\n"
    "  objective  objective value after the event\n"
    "  delta      gap sum; on cpl step rows the running stale sum\n"
    "  exact      true when delta was recomputed from scratch\n"
    "  stage      cpl restart count\n"
    "  delta_l    cpl gap threshold in force\n";

struct SolveArgs {
  std::string instance, method = "pl", trace, out;
  SolverConfig cfg;
  std::string delta_rule = "halve";
  bool penalty = false;
  PenaltyConfig pen;
};

struct GenerateArgs {
  std::string kind = "network", out;
  std::uint64_t seed = 1;
  NetworkGenConfig net;
};

struct VerifyArgs {
  std::string instance, point, form = "kkt";
  double tol = 1e-8;
};

struct ExperimentArgs {
  std::string spec, out_table;
};

int cmd_solve(SolveArgs& a) {
  Instance inst = load_instance(a.instance);
  a.cfg.delta_rule = a.delta_rule == "harmonic" ? DeltaRule::harmonic : DeltaRule::halve;

  std::ofstream trace_file;
  std::optional<JsonlTraceSink> sink;
  if (!a.trace.empty()) {
    trace_file.open(a.trace, std::ios::trunc);
    if (!trace_file) throw std::invalid_argument("cannot open trace file: " + a.trace);
    sink.emplace(trace_file);
    a.cfg.sink = &*sink;
  }

  SolveResult res;
  if (a.penalty) {
    auto* w = std::get_if<WirelessProblem>(&inst);
    if (!w) throw std::invalid_argument("--penalty needs a wireless instance");
    res = solve_penalized(*w, a.cfg, a.pen);
    for (const auto& st : res.stages)
      std::fprintf(stderr, "stage tau=%.17g iters=%lld delta=%.17g violation=%.17g\n",
                   st.tau, st.block_iters, st.delta, st.violation);
  } else {
    res = std::visit(
        [&](const auto& prob) {
          return a.method == "pl" ? solve_pl(prob, a.cfg) : solve_cpl(prob, a.cfg);
        },
        inst);
  }

  static const char* status_names[] = {"converged", "budget_exhausted",
                                       "line_search_failed"};
  std::fprintf(stderr, "status=%s block_iters=%lld delta=%.17g objective=%.17g\n",
               status_names[static_cast<int>(res.status)], res.block_iters, res.delta,
               res.objective);

  if (!a.out.empty()) save_point(res.point, a.out);
  else std::cout << format_point(res.point);
  return res.status == SolveStatus::converged ? 0 : 1;
}

int cmd_generate(GenerateArgs& a) {
  Instance inst;
  if (a.kind == "network") {
    inst = generate_network(a.seed, a.net);
  } else {
    WirelessGenConfig cfg;
    cfg.providers = a.net.nodes;  // --nodes
    cfg.classes = a.net.od_pairs; // --od-pairs
    inst = generate_wireless(a.seed, cfg);
  }
  if (!a.out.empty()) save_instance(inst, a.out);
  else std::cout << format_instance(inst);
  return 0;
}

int cmd_verify(VerifyArgs& a) {
  Instance inst = load_instance(a.instance);
  FlowPoint w = load_point(a.point);

  bool passed = false;
  std::string detail;
  if (auto* net = std::get_if<NetworkProblem>(&inst)) {
    if (w.path_flow.size() != net->path_count() || w.demand.size() != net->buyer_count())
      throw std::invalid_argument("point size does not match the instance");
    EquilibriumForm form = a.form == "kkt"               ? EquilibriumForm::kkt
                           : a.form == "complementarity" ? EquilibriumForm::complementarity
                                                         : EquilibriumForm::implication;
    CheckReport rep = check_equilibrium(*net, w, a.tol, form);
    passed = rep.passed;
    detail = rep.detail;
  } else {
    const auto& wp = std::get<WirelessProblem>(inst);
    if (a.form != "kkt")
      throw std::invalid_argument("pairwise forms need a network instance");
    if (w.path_flow.size() != wp.providers() || w.demand.size() != wp.classes.size())
      throw std::invalid_argument("point size does not match the instance");
    std::vector<double> flat = w.path_flow;
    flat.insert(flat.end(), w.demand.begin(), w.demand.end());
    VerifyReport rep = verify_equilibrium(to_market(wp), flat, a.tol);
    passed = rep.feasible && rep.equilibrium;
    detail = rep.detail;
  }

  if (passed) {
    std::cout << "equilibrium verified (" << a.form << ", tol " << a.tol << ")\n";
    return 0;
  }
  std::cout << "verification failed: " << detail << "\n";
  return 2;
}

int cmd_experiment(ExperimentArgs& a) {
  ExperimentSpec spec = load_experiment(a.spec);
  ExperimentResult res = run_experiment(spec);

  bool partial = false;
  for (const auto& o : res.outcomes) {
    static const char* status_names[] = {"converged", "budget_exhausted",
                                         "line_search_failed"};
    std::fprintf(stderr, "%s: status=%s block_iters=%lld delta=%.17g\n",
                 o.method == Method::pl ? "pl" : "cpl",
                 status_names[static_cast<int>(o.status)], o.block_iters, o.delta);
    for (const auto& c : o.crossings)
      if (!c) partial = true;
  }

  std::string csv = render_table(res);
  if (!a.out_table.empty()) {
    std::ofstream out(a.out_table, std::ios::trunc);
    if (!out) throw std::invalid_argument("cannot open table file: " + a.out_table);
    out << csv;
  } else {
    std::cout << csv;
  }
  return partial ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "mareq: two-sided market, traffic, and spectrum equilibrium solver.\n"
      "Exit codes: 0 success / equilibrium verified, 1 accuracy not attained,\n"
      "2 verification failed, 3 input error."};
  app.require_subcommand(1);

  SolveArgs sa;
  auto* solve = app.add_subcommand(
      "solve", "Run partial linearization (pl) or its cyclic variant (cpl)");
  solve->add_option("--instance", sa.instance, "Instance JSON file")->required();
  solve->add_option("--method", sa.method, "pl | cpl")
      ->check(CLI::IsMember({"pl", "cpl"}));
  solve->add_option("--beta", sa.cfg.beta, "Armijo sufficient-decrease fraction");
  solve->add_option("--theta", sa.cfg.theta, "Armijo backtracking ratio");
  solve->add_option("--delta0", sa.cfg.delta0, "cpl initial gap threshold");
  solve->add_option("--delta-rule", sa.delta_rule, "halve | harmonic")
      ->check(CLI::IsMember({"halve", "harmonic"}));
  solve->add_option("--accuracy", sa.cfg.accuracy, "Stop when the gap sum reaches this");
  solve->add_option("--max-block-iters", sa.cfg.max_block_iters,
                    "Iteration budget, < 0 = unlimited");
  solve->add_option("--trace", sa.trace, "Write a JSON-lines trace here");
  solve->add_option("--out", sa.out, "Write the solution point here (default stdout)");
  solve->add_flag("--penalty", sa.penalty,
                  "Wireless only: exterior-penalty loop over provider caps");
  solve->add_option("--tau0", sa.pen.tau0, "First penalty weight");
  solve->add_option("--tau-factor", sa.pen.tau_factor, "Penalty growth per stage");
  solve->add_option("--penalty-stages", sa.pen.stages, "Penalty stage count");
  solve->add_option("--inner-gap-factor", sa.pen.inner_gap_factor,
                    "Stage t aims for gap <= factor / tau_t");
  solve->add_option("--stage-block-iters", sa.pen.stage_block_iters,
                    "Per-stage effort cap, < 0 = unlimited");
  solve->add_option("--violation-stop", sa.pen.violation_stop,
                    "Stop once max cap excess falls to this");
  solve->footer(kTraceHelp);

  GenerateArgs ga;
  auto* generate = app.add_subcommand("generate", "Write a random solvable instance");
  generate->add_option("--kind", ga.kind, "network | wireless")
      ->check(CLI::IsMember({"network", "wireless"}));
  generate->add_option("--seed", ga.seed, "Generator seed; same seed, same bytes");
  generate->add_option("--nodes", ga.net.nodes, "Node count (wireless: providers)");
  generate->add_option("--arcs", ga.net.arcs, "Arc count (network only)");
  generate->add_option("--od-pairs", ga.net.od_pairs,
                       "O/D pair count (wireless: user classes)");
  generate->add_option("--paths-per-pair", ga.net.paths_per_pair,
                       "Paths enumerated per pair (network only)");
  generate->add_option("--buyers-per-pair", ga.net.buyers_per_pair,
                       "Buyers per pair (network only)");
  generate->add_option("--out", ga.out, "Instance file (default stdout)");

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "Check a point for equilibrium");
  verify->add_option("--instance", va.instance, "Instance JSON file")->required();
  verify->add_option("--point", va.point, "Point JSON file {\"x\": [...], \"y\": [...]}")
      ->required();
  verify->add_option("--form", va.form, "kkt | complementarity | implication")
      ->check(CLI::IsMember({"kkt", "complementarity", "implication"}));
  verify->add_option("--tol", va.tol, "Comparison tolerance");

  ExperimentArgs ea;
  auto* experiment = app.add_subcommand(
      "experiment", "Block-iteration counts at accuracy thresholds");
  experiment->add_option("--spec", ea.spec, "Experiment spec JSON file")->required();
  experiment->add_option("--out-table", ea.out_table, "CSV table file (default stdout)");
  experiment->footer(
      "Spec: {\"instance\": path-or-object, \"methods\": [\"pl\",\"cpl\"],\n"
      " \"thresholds\": [0.2,0.1,0.05], \"solver\": {beta, theta,\n"
      " max_armijo_trials, delta0, delta_rule, accuracy, max_block_iters},\n"
      " \"pl\": {overrides}, \"cpl\": {overrides}, \"trace_prefix\": path}\n"
      "Table: CSV with header accuracy,<method>...; one row per threshold\n"
      "holding the block-iteration count at the first trace row whose delta\n"
      "reached it, or - when the run ended first.  With trace_prefix set,\n"
      "each method streams <prefix>.<method>.jsonl.\n");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 3;
  }

  try {
    if (solve->parsed()) return cmd_solve(sa);
    if (generate->parsed()) return cmd_generate(ga);
    if (verify->parsed()) return cmd_verify(va);
    return cmd_experiment(ea);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
