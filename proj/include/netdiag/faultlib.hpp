#pragma once

// Fault injector and the independent injection auditor. inject() applies the
// one canonical mutation for a label; verify_injection() re-checks the result
// with structural predicates written separately from the mutation code.

#include <stdexcept>
#include <string>
#include <vector>

#include "netdiag/fault.hpp"
#include "netdiag/model.hpp"

namespace netdiag {

struct FaultError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InjectionResult {
    Topology topo;
    GroundTruth truth;
};

struct VerifyResult {
    bool verified = false;
    std::string reason;  // set when not verified
};

// Every element the label can be injected on: link ids for link/queue faults,
// device names otherwise. Empty when the scenario cannot host the fault.
std::vector<std::string> enumerate_targets(const Topology& t, FaultLabel label);

// Mutated copy plus ground truth; the input is untouched.
// Throws FaultError when target is not in enumerate_targets(t, label).
InjectionResult inject(const Topology& t, FaultLabel label, const std::string& target,
                       uint64_t seed);

VerifyResult verify_injection(const Topology& t, const GroundTruth& truth);

// True when no label's manifestation predicate fires; otherwise *firing names
// the offender.
bool verify_benign(const Topology& t, std::string* firing = nullptr);

}  // namespace netdiag
