#pragma once

// The diagnostic engine: one escalation run over a possibly-faulted world.
//   1. all-pairs reachability scan and symptom clustering
//   2. deep scan (only when nothing is confirmed) in four ordered phases
//   3. symptom -> family routing through the fault index
//   4. fingerprint execution with stop-and-submit
// Every decision point consumes one turn against the budget; running out of
// turns ends the session with no submission.

#include <optional>
#include <string>
#include <vector>

#include "netdiag/deepscan.hpp"
#include "netdiag/skills.hpp"
#include "netdiag/thresholds.hpp"

namespace netdiag {

struct TraceEvent {
    int turn = 0;
    std::string kind;  // scan | symptom | deep | index | skill | submit | stop
    std::string detail;
};

struct SessionTrace {
    std::vector<TraceEvent> events;
    int turns_used = 0;
    int tool_calls = 0;
    std::string outcome;  // submitted | no_anomaly | no_submission

    std::vector<std::string> lines() const;  // "T<n> <kind>: <detail>"
    std::string text() const;                // lines joined with newlines
    std::string json() const;                // machine-readable twin
};

struct DiagnosisResult {
    std::optional<Submission> submission;  // empty on budget exhaustion
    SessionTrace trace;
};

DiagnosisResult diagnose(const Topology& topo, const SkillSet& skills,
                         int budget = kDefaultBudget);

// Exposed for tests: cluster a reachability matrix into symptoms. Charges
// disambiguation and confirmation pings to the ledger within the current turn.
std::vector<Symptom> extract_symptoms(const ProbeContext& ctx, ToolCallLedger& ledger,
                                      const ReachabilityMatrix& matrix);

// Structural helper behind path clustering, exposed for tests: devices lying
// on any shortest path between the two endpoints in the manifest wiring.
std::vector<std::string> shortest_path_dag(const Manifest& m, const std::string& src,
                                           const std::string& dst);

}  // namespace netdiag
