#pragma once

// Scenario generators. Structure and addressing are fixed constants per
// (class, size); the seed varies hardware addresses only, so topology JSON is
// byte-identical for identical inputs. Constants live in
// docs/scenario_reference.md.

#include <stdexcept>
#include <string>
#include <vector>

#include "netdiag/model.hpp"

namespace netdiag {

inline const std::vector<std::string>& scenario_classes() {
    static const std::vector<std::string> v = {"clos_bgp", "campus_ospf_service", "isp_static"};
    return v;
}

inline const std::vector<std::string>& size_classes() {
    static const std::vector<std::string> v = {"small", "medium", "large"};
    return v;
}

struct ScenarioError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

Topology build_scenario(const std::string& scenario, const std::string& size, uint64_t seed);

}  // namespace netdiag
