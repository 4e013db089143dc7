#pragma once

// Step-2 deep scan: ten sweep scripts grouped into four ordered phases.
//   A: infra_sweep, l2_snapshot
//   B: ospf_snapshot, bgp_snapshot, tc_snapshot
//   C: host_path_snapshot, dhcp_link_history, safe_reachability
//   D: service_snapshot, pressure_sweep
// The scan stops after the first phase that raises at least one flag. Each
// sweep charges the ledger once per device it visits (batched snapshot), and
// each phase consumes one engine turn.

#include <string>
#include <vector>

#include "netdiag/fault.hpp"
#include "netdiag/probes.hpp"

namespace netdiag {

struct Flag {
    std::string device;
    FaultFamily family = FaultFamily::link;
    std::optional<FaultLabel> label;  // sharper hint when the sweep can name it
    std::string evidence;
    char phase = 'A';
    std::string sweep;

    std::string hint_string() const { return label ? to_string(*label) : to_string(family); }
};

struct PhaseReport {
    char phase = 'A';
    std::vector<std::string> sweeps_run;
    std::vector<Flag> flags;
    bool clean() const { return flags.empty(); }
};

struct DeepScanResult {
    std::vector<PhaseReport> phases;  // phases actually run, in order
    std::vector<Flag> flags;          // flags of the first flagged phase
    bool truncated = false;           // stopped by the turn cap, not by a flag

    // All four phases ran and none flagged: the only state that may be
    // reported as no-anomaly.
    bool completed_clean() const { return phases.size() == 4 && flags.empty(); }
};

// Phase A
std::vector<Flag> infra_sweep(const ProbeContext& ctx, ToolCallLedger& ledger);
std::vector<Flag> l2_snapshot(const ProbeContext& ctx, ToolCallLedger& ledger);
// Phase B
std::vector<Flag> ospf_snapshot(const ProbeContext& ctx, ToolCallLedger& ledger);
std::vector<Flag> bgp_snapshot(const ProbeContext& ctx, ToolCallLedger& ledger);
std::vector<Flag> tc_snapshot(const ProbeContext& ctx, ToolCallLedger& ledger);
// Phase C
std::vector<Flag> host_path_snapshot(const ProbeContext& ctx, const std::string& host,
                                     Ipv4 target, ToolCallLedger& ledger);
std::vector<Flag> dhcp_link_history(const ProbeContext& ctx, const std::string& host,
                                    ToolCallLedger& ledger);
struct SafeReachability {
    ReachabilityMatrix matrix;
    std::vector<Flag> flags;
};
SafeReachability safe_reachability(const ProbeContext& ctx, ToolCallLedger& ledger);
// Phase D
std::vector<Flag> service_snapshot(const ProbeContext& ctx, const std::string& host,
                                   ToolCallLedger& ledger);
std::vector<Flag> pressure_sweep(const ProbeContext& ctx, ToolCallLedger& ledger);

// Runs phases in order, advancing ledger.current_turn once per phase; stops
// after the first flagged phase. A positive turn_cap stops the scan before
// any phase that would push current_turn past it (result marked truncated).
DeepScanResult deep_scan(const ProbeContext& ctx, ToolCallLedger& ledger, int turn_cap = 0);

// One fixed-layout line per sweep: "P<phase>: <sweep>: <flags|clean>".
std::vector<std::string> render_phase(const PhaseReport& report);

}  // namespace netdiag
