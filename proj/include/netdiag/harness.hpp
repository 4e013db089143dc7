#pragma once

// Benchmark harness: builds the scenario/size/label grid, injects and
// verifies each fault, runs the engine, scores the runs, and writes reports.
// Every step is deterministic for a fixed configuration.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "netdiag/engine.hpp"
#include "netdiag/faultlib.hpp"
#include "netdiag/scenario.hpp"
#include "netdiag/scoring.hpp"

namespace netdiag {

// --- record serialization (benchmark file formats) ---

nlohmann::ordered_json incident_to_json(const Incident& inc);
Incident incident_from_json(const nlohmann::ordered_json& j);

nlohmann::ordered_json submission_to_json(const Submission& s);
Submission submission_from_json(const nlohmann::ordered_json& j);

nlohmann::ordered_json truth_to_json(const GroundTruth& t);
GroundTruth truth_from_json(const nlohmann::ordered_json& j);

// --- running one incident ---

struct BenchRow {
    ScoredIncident scored;
    SessionTrace trace;
    bool excluded = false;
    std::string exclude_reason;
};

// Rebuild the incident's world: scenario topology plus its injected fault.
// Returns the faulted topology and ground truth; for benign incidents the
// truth is the all-clear record.
struct IncidentWorld {
    Topology topo;
    GroundTruth truth;
};
IncidentWorld build_incident_world(const Incident& inc);

// Inject-verify-diagnose-score for one incident. Excluded rows (failed
// verification) carry no scores.
BenchRow run_incident(const Incident& inc, const SkillSet& skills, int budget);

// --- the benchmark grid ---

struct BenchConfig {
    std::string filter;            // substring match on incident id; empty = all
    int budget = kDefaultBudget;   // turns per incident
    std::string out_dir;           // write reports here when set
    bool check = false;            // run the trace invariant suite
    // Test hook: pretend the injector silently failed for this label — the
    // mutation is dropped while the ground truth still claims it. Exercises
    // the verification gate end to end.
    std::string sabotage_label;
};

// Deterministic incident ids: "<scenario>/<size>/<label>"; one benign
// incident per scenario/size cell.
std::vector<Incident> build_grid(const std::string& filter = "");

struct BenchResult {
    std::vector<BenchRow> rows;  // included and excluded, grid order
    Aggregate totals;            // included rows only
    std::map<std::string, Aggregate> by_scenario;
    std::map<std::string, Aggregate> by_size;
    std::map<std::string, Aggregate> by_family;  // truth family; "benign" bucket
    std::vector<std::string> excluded;           // "id: reason"
    std::vector<std::string> invariant_notes;    // violations found by --check
    int invariant_failures = 0;
};

BenchResult run_bench(const BenchConfig& cfg);

// Trace invariant suite used by --check; returns violation notes.
std::vector<std::string> check_invariants(const std::vector<BenchRow>& rows, int budget);

// Report files: results.jsonl, results.csv, metrics.json, summary.txt, and
// traces/<id>.txt|.json under out_dir (created if missing).
void write_reports(const BenchResult& res, const std::string& out_dir);

// Human-readable roll-up, also the tail of summary.txt.
std::string render_summary(const BenchResult& res);

}  // namespace netdiag
