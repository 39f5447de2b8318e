#pragma once
#include <iosfwd>
#include <string>
#include <variant>

#include "mareq/network.hpp"
#include "mareq/wireless.hpp"

namespace mareq {

using Instance = std::variant<NetworkProblem, WirelessProblem>;

// JSON instance files.  Cost specs are tagged: {"form":"affine","c0":..,
// "c1":..} or {"form":"power","c0":..,"c1":..,"p":..}; infinite caps are the
// string "inf".  Custom (code-only) forms are not representable and make
// save throw.  Throws std::invalid_argument on malformed input.
Instance load_instance(const std::string& path);
Instance parse_instance(const std::string& text);
void save_instance(const Instance& inst, const std::string& path);
std::string format_instance(const Instance& inst);

// Point files: {"x": [...], "y": [...]} with the supply variables (path
// flows or provider allocations) in x and the demands in y.
FlowPoint load_point(const std::string& path);
void save_point(const FlowPoint& w, const std::string& path);
std::string format_point(const FlowPoint& w);

}  // namespace mareq
