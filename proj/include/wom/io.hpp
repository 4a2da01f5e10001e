#pragma once

#include <json.hpp>
#include <string>

#include "wom/belief.hpp"
#include "wom/solver.hpp"
#include "wom/sysmodel.hpp"

namespace wom::io {

using json = nlohmann::json;

/// Parses and validates an instance document. Malformed documents raise
/// ErrorKind::Parse naming the field; invalid contents raise the validation
/// kinds of the checks.
Instance parse_instance(const json& doc);
Instance load_instance(const std::string& path);
json instance_to_json(const Instance& inst);

/// SHA-256 of the canonical (sorted-key, compact) serialization.
std::string digest(const json& doc);

json to_json(const VariableId& v);
json to_json(const InfoSchema& s);
json to_json(const DelayMatrix& d);
json to_json(const CostReport& r);
json to_json(const ControlStrategy& g);
json to_json(const PrescriptionStrategy& psi);
json to_json(const InformationState& pi);
json to_json(const SolveResult& r, bool with_strategy = false);
json to_json(const Comparison& c);

ControlStrategy control_strategy_from_json(const json& j);

}  // namespace wom::io
