#include "mareq/experiment.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <utility>

#include <nlohmann/json.hpp>

namespace mareq {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

const char* method_name(Method m) { return m == Method::pl ? "pl" : "cpl"; }

void apply_solver_options(const json& j, SolverConfig& cfg) {
  for (const auto& [key, val] : j.items()) {
    if (key == "beta") cfg.beta = val.get<double>();
    else if (key == "theta") cfg.theta = val.get<double>();
    else if (key == "max_armijo_trials") cfg.max_armijo_trials = val.get<int>();
    else if (key == "delta0") cfg.delta0 = val.get<double>();
    else if (key == "delta_rule") {
      std::string rule = val.get<std::string>();
      if (rule == "halve") cfg.delta_rule = DeltaRule::halve;
      else if (rule == "harmonic") cfg.delta_rule = DeltaRule::harmonic;
      else throw std::invalid_argument("experiment: unknown delta_rule '" + rule + "'");
    } else if (key == "accuracy") cfg.accuracy = val.get<double>();
    else if (key == "max_block_iters") cfg.max_block_iters = val.get<long long>();
    else throw std::invalid_argument("experiment: unknown solver option '" + key + "'");
  }
}

// Records the iteration count at the first row reaching each threshold and
// optionally streams every row as a JSON line.
struct CrossingSink : TraceSink {
  const std::vector<double>* thresholds = nullptr;
  std::vector<std::optional<long long>> crossings;
  std::ofstream* file = nullptr;

  void row(const TraceRow& r) override {
    for (std::size_t t = 0; t < thresholds->size(); ++t)
      if (!crossings[t] && r.delta <= (*thresholds)[t]) crossings[t] = r.block_iters;
    if (file) write_trace_row(*file, r);
  }
};

}  // namespace

void write_trace_row(std::ostream& out, const TraceRow& row) {
  static const char* names[] = {"measure", "step", "restart", "done"};
  ordered_json j;
  j["event"] = names[static_cast<int>(row.event)];
  j["iters"] = row.block_iters;
  j["block"] = row.block;
  j["gap"] = row.gap;
  j["step"] = row.step;
  j["objective"] = row.objective;
  j["delta"] = row.delta;
  j["exact"] = row.exact;
  j["stage"] = row.stage;
  j["delta_l"] = row.delta_l;
  out << j.dump() << '\n';
}

ExperimentSpec parse_experiment(const std::string& text, const std::string& base_dir) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("experiment spec: ") + e.what());
  }
  try {
    ExperimentSpec spec;

    const json& inst = doc.at("instance");
    if (inst.is_string()) {
      std::filesystem::path p = inst.get<std::string>();
      if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
      spec.instance = load_instance(p.string());
    } else {
      spec.instance = parse_instance(inst.dump());
    }

    for (const auto& m : doc.at("methods")) {
      std::string name = m.get<std::string>();
      if (name == "pl") spec.methods.push_back(Method::pl);
      else if (name == "cpl") spec.methods.push_back(Method::cpl);
      else throw std::invalid_argument("experiment: unknown method '" + name + "'");
    }
    if (spec.methods.empty()) throw std::invalid_argument("experiment: no methods");

    spec.thresholds = doc.at("thresholds").get<std::vector<double>>();
    if (spec.thresholds.empty()) throw std::invalid_argument("experiment: no thresholds");
    for (std::size_t t = 0; t + 1 < spec.thresholds.size(); ++t)
      if (!(spec.thresholds[t] > spec.thresholds[t + 1]))
        throw std::invalid_argument("experiment: thresholds must be strictly decreasing");

    SolverConfig base;
    if (doc.contains("solver")) apply_solver_options(doc["solver"], base);
    for (Method m : spec.methods) {
      SolverConfig cfg = base;
      if (doc.contains(method_name(m))) apply_solver_options(doc[method_name(m)], cfg);
      spec.configs.push_back(cfg);
    }

    if (doc.contains("trace_prefix")) {
      std::filesystem::path p = doc["trace_prefix"].get<std::string>();
      if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
      spec.trace_prefix = p.string();
    }
    return spec;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("experiment spec: ") + e.what());
  }
}

ExperimentSpec load_experiment(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open spec file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_experiment(buf.str(), std::filesystem::path(path).parent_path().string());
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  ExperimentResult result;
  result.thresholds = spec.thresholds;

  for (std::size_t i = 0; i < spec.methods.size(); ++i) {
    Method method = spec.methods[i];
    SolverConfig cfg = spec.configs[i];
    // The tightest threshold doubles as the stopping accuracy, so a run ends
    // as soon as every crossing is known (or the budget runs out).
    cfg.accuracy = spec.thresholds.back();
    cfg.keep_trace = false;

    CrossingSink sink;
    sink.thresholds = &spec.thresholds;
    sink.crossings.assign(spec.thresholds.size(), std::nullopt);
    std::ofstream trace_file;
    if (!spec.trace_prefix.empty()) {
      std::string path = spec.trace_prefix + "." + method_name(method) + ".jsonl";
      trace_file.open(path, std::ios::trunc);
      if (!trace_file) throw std::invalid_argument("cannot open trace file: " + path);
      sink.file = &trace_file;
    }
    cfg.sink = &sink;

    SolveResult solve = std::visit(
        [&](const auto& prob) {
          return method == Method::pl ? solve_pl(prob, cfg) : solve_cpl(prob, cfg);
        },
        spec.instance);

    MethodOutcome out;
    out.method = method;
    out.status = solve.status;
    out.block_iters = solve.block_iters;
    out.delta = solve.delta;
    out.crossings = std::move(sink.crossings);
    result.outcomes.push_back(std::move(out));
  }
  return result;
}

std::string render_table(const ExperimentResult& result) {
  std::ostringstream out;
  out << "accuracy";
  for (const auto& o : result.outcomes) out << ',' << method_name(o.method);
  out << '\n';
  for (std::size_t t = 0; t < result.thresholds.size(); ++t) {
    out << json(result.thresholds[t]).dump();
    for (const auto& o : result.outcomes) {
      out << ',';
      if (o.crossings[t]) out << *o.crossings[t];
      else out << '-';
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace mareq
