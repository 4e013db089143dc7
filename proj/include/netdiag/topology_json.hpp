#pragma once

// Canonical topology serialization: stable key order, byte-identical for
// identical inputs. Schema in docs/topology_schema.md.

#include <nlohmann/json_fwd.hpp>
#include <string>

#include "netdiag/model.hpp"

namespace netdiag {

nlohmann::ordered_json topology_to_json(const Topology& t);
Topology topology_from_json(const nlohmann::ordered_json& j);

std::string topology_to_string(const Topology& t);      // pretty, 2-space indent
Topology topology_from_string(const std::string& text);

}  // namespace netdiag
