#include "mareq/instance_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace mareq {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

ordered_json fn_to_json(const ScalarFn& f) {
  ordered_json j;
  switch (f.kind()) {
    case ScalarFn::Kind::affine:
      j["form"] = "affine";
      j["c0"] = f.c0();
      j["c1"] = f.c1();
      break;
    case ScalarFn::Kind::power:
      j["form"] = "power";
      j["c0"] = f.c0();
      j["c1"] = f.c1();
      j["p"] = f.exponent();
      break;
    case ScalarFn::Kind::custom:
      throw std::invalid_argument("custom scalar forms are not serializable");
  }
  return j;
}

ScalarFn fn_from_json(const json& j) {
  std::string form = j.at("form").get<std::string>();
  if (form == "affine")
    return ScalarFn::affine(j.at("c0").get<double>(), j.at("c1").get<double>());
  if (form == "power")
    return ScalarFn::power(j.at("c0").get<double>(), j.at("c1").get<double>(),
                           j.at("p").get<double>());
  throw std::invalid_argument("unknown scalar form: " + form);
}

ordered_json cap_to_json(double cap) {
  if (cap == kInf) return ordered_json("inf");
  return ordered_json(cap);
}

double cap_from_json(const json& j) {
  if (j.is_string()) {
    if (j.get<std::string>() == "inf") return kInf;
    throw std::invalid_argument("cap must be a number or \"inf\"");
  }
  return j.get<double>();
}

ordered_json network_to_json(const NetworkProblem& p) {
  ordered_json j;
  j["kind"] = "network";
  j["nodes"] = p.nodes;
  j["arcs"] = ordered_json::array();
  for (const auto& a : p.arcs) {
    ordered_json ja;
    ja["tail"] = a.tail;
    ja["head"] = a.head;
    ja["cost"] = fn_to_json(a.cost);
    j["arcs"].push_back(ja);
  }
  j["pairs"] = ordered_json::array();
  for (const auto& pr : p.pairs) {
    ordered_json jp;
    jp["origin"] = pr.origin;
    jp["dest"] = pr.dest;
    jp["paths"] = pr.paths;
    jp["buyers"] = ordered_json::array();
    for (const auto& b : pr.buyers) {
      ordered_json jb;
      jb["disutility"] = fn_to_json(b.disutility);
      jb["cap"] = cap_to_json(b.cap);
      jp["buyers"].push_back(jb);
    }
    j["pairs"].push_back(jp);
  }
  return j;
}

ordered_json wireless_to_json(const WirelessProblem& p) {
  ordered_json j;
  j["kind"] = "wireless";
  j["congestion"] = p.congestion;
  j["providers"] = ordered_json::array();
  for (std::size_t i = 0; i < p.providers(); ++i) {
    ordered_json jp;
    jp["base"] = fn_to_json(p.base_price[i]);
    jp["cap"] = cap_to_json(p.cap[i]);
    j["providers"].push_back(jp);
  }
  j["classes"] = ordered_json::array();
  for (const auto& c : p.classes) {
    ordered_json jc;
    jc["disutility"] = fn_to_json(c.disutility);
    jc["cap"] = cap_to_json(c.cap);
    j["classes"].push_back(jc);
  }
  return j;
}

}  // namespace

std::string format_instance(const Instance& inst) {
  ordered_json j = std::holds_alternative<NetworkProblem>(inst)
                       ? network_to_json(std::get<NetworkProblem>(inst))
                       : wireless_to_json(std::get<WirelessProblem>(inst));
  return j.dump(2) + "\n";
}

Instance parse_instance(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("instance parse error: ") + e.what());
  }
  try {
    std::string kind = j.at("kind").get<std::string>();
    if (kind == "network") {
      NetworkProblem p;
      p.nodes = j.at("nodes").get<int>();
      for (const auto& ja : j.at("arcs")) {
        Arc a;
        a.tail = ja.at("tail").get<int>();
        a.head = ja.at("head").get<int>();
        a.cost = fn_from_json(ja.at("cost"));
        p.arcs.push_back(a);
      }
      for (const auto& jp : j.at("pairs")) {
        OdPair pr;
        pr.origin = jp.at("origin").get<int>();
        pr.dest = jp.at("dest").get<int>();
        pr.paths = jp.at("paths").get<std::vector<std::vector<int>>>();
        for (const auto& jb : jp.at("buyers")) {
          Buyer b;
          b.disutility = fn_from_json(jb.at("disutility"));
          b.cap = cap_from_json(jb.at("cap"));
          pr.buyers.push_back(b);
        }
        p.pairs.push_back(std::move(pr));
      }
      p.validate();
      return p;
    }
    if (kind == "wireless") {
      WirelessProblem p;
      p.congestion = j.at("congestion").get<double>();
      for (const auto& jp : j.at("providers")) {
        p.base_price.push_back(fn_from_json(jp.at("base")));
        p.cap.push_back(cap_from_json(jp.at("cap")));
      }
      for (const auto& jc : j.at("classes")) {
        Buyer b;
        b.disutility = fn_from_json(jc.at("disutility"));
        b.cap = cap_from_json(jc.at("cap"));
        p.classes.push_back(b);
      }
      p.validate();
      return p;
    }
    throw std::invalid_argument("unknown instance kind: " + kind);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("instance field error: ") + e.what());
  }
}

Instance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open instance file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_instance(ss.str());
}

void save_instance(const Instance& inst, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write instance file: " + path);
  out << format_instance(inst);
}

FlowPoint load_point(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open point file: " + path);
  json j;
  try {
    in >> j;
    FlowPoint w;
    w.path_flow = j.at("x").get<std::vector<double>>();
    w.demand = j.at("y").get<std::vector<double>>();
    return w;
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("point parse error: ") + e.what());
  }
}

void save_point(const FlowPoint& w, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write point file: " + path);
  out << format_point(w);
}

std::string format_point(const FlowPoint& w) {
  ordered_json j;
  j["x"] = w.path_flow;
  j["y"] = w.demand;
  return j.dump(2) + "\n";
}

}  // namespace mareq
