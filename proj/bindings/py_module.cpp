#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <stdexcept>
#include <variant>

#include "mareq/experiment.hpp"
#include "mareq/generator.hpp"
#include "mareq/instance_io.hpp"
#include "mareq/objective.hpp"
#include "mareq/solver.hpp"

namespace py = pybind11;
using namespace mareq;

namespace {

SolverConfig make_config(double beta, double theta, double delta0,
                         const std::string& delta_rule, double accuracy,
                         long long max_block_iters) {
  SolverConfig cfg;
  cfg.beta = beta;
  cfg.theta = theta;
  cfg.delta0 = delta0;
  if (delta_rule == "halve") cfg.delta_rule = DeltaRule::halve;
  else if (delta_rule == "harmonic") cfg.delta_rule = DeltaRule::harmonic;
  else throw std::invalid_argument("delta_rule must be 'halve' or 'harmonic'");
  cfg.accuracy = accuracy;
  cfg.max_block_iters = max_block_iters;
  return cfg;
}

py::dict result_to_dict(const SolveResult& res) {
  static const char* status_names[] = {"converged", "budget_exhausted",
                                       "line_search_failed"};
  py::dict d;
  d["status"] = status_names[static_cast<int>(res.status)];
  d["x"] = res.point.path_flow;
  d["y"] = res.point.demand;
  d["block_iters"] = res.block_iters;
  d["delta"] = res.delta;
  d["objective"] = res.objective;
  if (!res.stages.empty()) {
    py::list stages;
    for (const auto& st : res.stages) {
      py::dict s;
      s["tau"] = st.tau;
      s["block_iters"] = st.block_iters;
      s["delta"] = st.delta;
      s["violation"] = st.violation;
      stages.append(s);
    }
    d["stages"] = stages;
  }
  return d;
}

FlowPoint make_point(std::vector<double> x, std::vector<double> y) {
  FlowPoint w;
  w.path_flow = std::move(x);
  w.demand = std::move(y);
  return w;
}

// Opaque holder: pybind11's stl.h casts std::variant by converting the active
// alternative, which would bypass a class registered on Instance itself.
struct InstanceHandle {
  Instance inst;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Market, traffic, and spectrum equilibrium solver core";

  py::class_<InstanceHandle>(m, "Instance")
      .def_property_readonly("kind",
                             [](const InstanceHandle& h) {
                               return std::holds_alternative<NetworkProblem>(h.inst)
                                          ? "network"
                                          : "wireless";
                             })
      .def("to_json", [](const InstanceHandle& h) { return format_instance(h.inst); })
      .def("__repr__", [](const InstanceHandle& h) {
        return std::holds_alternative<NetworkProblem>(h.inst)
                   ? "Instance(kind='network')"
                   : "Instance(kind='wireless')";
      });

  m.def(
      "parse_instance",
      [](const std::string& text) { return InstanceHandle{parse_instance(text)}; },
      py::arg("text"));
  m.def(
      "load_instance",
      [](const std::string& path) { return InstanceHandle{load_instance(path)}; },
      py::arg("path"));
  m.def(
      "save_instance",
      [](const InstanceHandle& h, const std::string& path) {
        save_instance(h.inst, path);
      },
      py::arg("instance"), py::arg("path"));

  m.def(
      "generate_network",
      [](std::uint64_t seed, int nodes, int arcs, int od_pairs, int paths_per_pair,
         int buyers_per_pair) {
        NetworkGenConfig cfg;
        cfg.nodes = nodes;
        cfg.arcs = arcs;
        cfg.od_pairs = od_pairs;
        cfg.paths_per_pair = paths_per_pair;
        cfg.buyers_per_pair = buyers_per_pair;
        return InstanceHandle{generate_network(seed, cfg)};
      },
      py::arg("seed"), py::arg("nodes") = 8, py::arg("arcs") = 20,
      py::arg("od_pairs") = 2, py::arg("paths_per_pair") = 3,
      py::arg("buyers_per_pair") = 2);

  m.def(
      "generate_wireless",
      [](std::uint64_t seed, int providers, int classes) {
        WirelessGenConfig cfg;
        cfg.providers = providers;
        cfg.classes = classes;
        return InstanceHandle{generate_wireless(seed, cfg)};
      },
      py::arg("seed"), py::arg("providers") = 3, py::arg("classes") = 2);

  m.def(
      "solve",
      [](const InstanceHandle& h, const std::string& method, double beta, double theta,
         double delta0, const std::string& delta_rule, double accuracy,
         long long max_block_iters) {
        if (method != "pl" && method != "cpl")
          throw std::invalid_argument("method must be 'pl' or 'cpl'");
        SolverConfig cfg =
            make_config(beta, theta, delta0, delta_rule, accuracy, max_block_iters);
        SolveResult res = std::visit(
            [&](const auto& prob) {
              return method == "pl" ? solve_pl(prob, cfg) : solve_cpl(prob, cfg);
            },
            h.inst);
        return result_to_dict(res);
      },
      py::arg("instance"), py::arg("method") = "pl", py::arg("beta") = 0.5,
      py::arg("theta") = 0.5, py::arg("delta0") = 10.0,
      py::arg("delta_rule") = "halve", py::arg("accuracy") = 1e-6,
      py::arg("max_block_iters") = -1);

  m.def(
      "solve_penalized",
      [](const InstanceHandle& h, double beta, double theta, double accuracy,
         long long max_block_iters, double tau0, double tau_factor, int stages,
         double inner_gap_factor) {
        const auto* prob = std::get_if<WirelessProblem>(&h.inst);
        if (!prob)
          throw std::invalid_argument("penalty solve needs a wireless instance");
        SolverConfig cfg =
            make_config(beta, theta, 10.0, "halve", accuracy, max_block_iters);
        PenaltyConfig pen;
        pen.tau0 = tau0;
        pen.tau_factor = tau_factor;
        pen.stages = stages;
        pen.inner_gap_factor = inner_gap_factor;
        return result_to_dict(solve_penalized(*prob, cfg, pen));
      },
      py::arg("instance"), py::arg("beta") = 0.5, py::arg("theta") = 0.5,
      py::arg("accuracy") = 1e-6, py::arg("max_block_iters") = -1,
      py::arg("tau0") = 10.0, py::arg("tau_factor") = 10.0, py::arg("stages") = 6,
      py::arg("inner_gap_factor") = 0.1);

  m.def(
      "verify",
      [](const InstanceHandle& h, std::vector<double> x, std::vector<double> y,
         const std::string& form, double tol) {
        FlowPoint w = make_point(std::move(x), std::move(y));
        py::dict d;
        if (const auto* net = std::get_if<NetworkProblem>(&h.inst)) {
          EquilibriumForm f = form == "kkt" ? EquilibriumForm::kkt
                              : form == "complementarity"
                                  ? EquilibriumForm::complementarity
                                  : EquilibriumForm::implication;
          if (form != "kkt" && form != "complementarity" && form != "implication")
            throw std::invalid_argument("unknown form: " + form);
          CheckReport rep = check_equilibrium(*net, w, tol, f);
          d["passed"] = rep.passed;
          d["detail"] = rep.detail;
        } else {
          if (form != "kkt")
            throw std::invalid_argument("pairwise forms need a network instance");
          const auto& wp = std::get<WirelessProblem>(h.inst);
          std::vector<double> flat = w.path_flow;
          flat.insert(flat.end(), w.demand.begin(), w.demand.end());
          VerifyReport rep = verify_equilibrium(to_market(wp), flat, tol);
          d["passed"] = rep.feasible && rep.equilibrium;
          d["detail"] = rep.detail;
        }
        return d;
      },
      py::arg("instance"), py::arg("x"), py::arg("y"), py::arg("form") = "kkt",
      py::arg("tol") = 1e-8);

  m.def(
      "objective",
      [](const InstanceHandle& h, std::vector<double> x, std::vector<double> y) {
        FlowPoint w = make_point(std::move(x), std::move(y));
        if (const auto* net = std::get_if<NetworkProblem>(&h.inst))
          return objective(*net, w).total();
        const auto& wp = std::get<WirelessProblem>(h.inst);
        return objective(wp, w.path_flow, w.demand, 0.0).total();
      },
      py::arg("instance"), py::arg("x"), py::arg("y"));

  m.def(
      "arc_flows",
      [](const InstanceHandle& h, std::vector<double> x, std::vector<double> y) {
        const auto* net = std::get_if<NetworkProblem>(&h.inst);
        if (!net) throw std::invalid_argument("arc_flows needs a network instance");
        return arc_flows(*net, make_point(std::move(x), std::move(y)));
      },
      py::arg("instance"), py::arg("x"), py::arg("y") = std::vector<double>{});

  m.def(
      "path_costs",
      [](const InstanceHandle& h, const std::vector<double>& arc_flow) {
        const auto* net = std::get_if<NetworkProblem>(&h.inst);
        if (!net) throw std::invalid_argument("path_costs needs a network instance");
        return path_costs(*net, arc_flow);
      },
      py::arg("instance"), py::arg("arc_flow"));

  m.def(
      "run_experiment",
      [](const std::string& spec_text, const std::string& base_dir) {
        ExperimentSpec spec = parse_experiment(spec_text, base_dir);
        ExperimentResult res = run_experiment(spec);
        py::dict d;
        d["table"] = render_table(res);
        py::list outcomes;
        for (const auto& o : res.outcomes) {
          static const char* status_names[] = {"converged", "budget_exhausted",
                                               "line_search_failed"};
          py::dict row;
          row["method"] = o.method == Method::pl ? "pl" : "cpl";
          row["status"] = status_names[static_cast<int>(o.status)];
          row["block_iters"] = o.block_iters;
          row["delta"] = o.delta;
          py::list crossings;
          for (const auto& c : o.crossings) {
            if (c) crossings.append(*c);
            else crossings.append(py::none());
          }
          row["crossings"] = crossings;
          outcomes.append(row);
        }
        d["outcomes"] = outcomes;
        return d;
      },
      py::arg("spec_text"), py::arg("base_dir") = "");
}
