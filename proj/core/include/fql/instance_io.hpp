#pragma once

#include <nlohmann/json.hpp>

#include "fql/instance.hpp"

namespace fql {

// On-disk instance format:
//   {"node": {"Emp": ["101"]},
//    "edge": {"manager": {"101": "101"}},
//    "attr": {"FName": {"101": "Alan"}}}
// Attribute values are JSON strings or numbers as declared by the
// signature; parsing is strict about types (a negative number is not a
// Nat, a string is not an Int).
nlohmann::json instance_to_json(const Instance& I);
Instance instance_from_json(SigPtr sig, const nlohmann::json& j);

// One CSV per node: the ID column named after the node, then the node's
// outgoing edges in signature order, then its attributes in signature
// order. Rows in table order.
std::string instance_node_csv(const Instance& I, const std::string& node);
std::map<std::string, std::string> instance_to_csv(const Instance& I);

std::string csv_escape(const std::string& field);

}  // namespace fql
