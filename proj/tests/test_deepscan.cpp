#include <doctest.h>

#include "netdiag/deepscan.hpp"
#include "netdiag/faultlib.hpp"
#include "netdiag/scenario.hpp"

using namespace netdiag;

TEST_CASE("benign deep scan runs all four phases clean on every cell") {
    for (const auto& sc : scenario_classes())
        for (const auto& sz : size_classes()) {
            CAPTURE(sc);
            CAPTURE(sz);
            Topology t = build_scenario(sc, sz, 6);
            ProbeContext ctx(t);
            ToolCallLedger ledger;
            DeepScanResult r = deep_scan(ctx, ledger);
            CHECK(r.completed_clean());
            CHECK(r.flags.empty());
            REQUIRE(r.phases.size() == 4);
            int sweeps = 0;
            for (const auto& p : r.phases) {
                CHECK(p.clean());
                sweeps += int(p.sweeps_run.size());
            }
            CHECK(sweeps == 10);
            CHECK_FALSE(r.truncated);
        }
}

TEST_CASE("phases run in order and stop at the first hit") {
    Topology t = build_scenario("clos_bgp", "small", 6);
    auto targets = enumerate_targets(t, FaultLabel::link_bandwidth_throttling);
    REQUIRE_FALSE(targets.empty());
    InjectionResult inj = inject(t, FaultLabel::link_bandwidth_throttling, targets[0], 6);
    ProbeContext ctx(inj.topo);
    ToolCallLedger ledger;
    DeepScanResult r = deep_scan(ctx, ledger);

    // queueing faults surface in phase B; the scan must not continue to C/D
    REQUIRE(r.phases.size() == 2);
    CHECK(r.phases[0].phase == 'A');
    CHECK(r.phases[0].clean());
    CHECK(r.phases[1].phase == 'B');
    CHECK_FALSE(r.phases[1].clean());
    REQUIRE_FALSE(r.flags.empty());
    CHECK(to_string(r.flags[0].family) == "tc");
}

TEST_CASE("a turn cap truncates instead of overrunning") {
    Topology t = build_scenario("campus_ospf_service", "medium", 6);
    ProbeContext ctx(t);
    ToolCallLedger ledger;
    ledger.current_turn = 19;  // only one turn left under a budget of 20
    DeepScanResult r = deep_scan(ctx, ledger, 20);
    CHECK(r.truncated);
    CHECK(r.phases.size() == 1);
    CHECK_FALSE(r.completed_clean());
}

TEST_CASE("deep scan soundness: nothing hides from both the scan and the sweeps") {
    // For every injectable fault on the small grid, either the all-pairs scan
    // already shows trouble, or the deep scan flags the right family.
    for (const auto& sc : scenario_classes()) {
        Topology base = build_scenario(sc, "small", 6);
        for (FaultLabel l : all_labels()) {
            auto targets = enumerate_targets(base, l);
            if (targets.empty()) continue;
            CAPTURE(sc);
            CAPTURE(to_string(l));
            InjectionResult inj = inject(base, l, targets[0], 6);
            ProbeContext ctx(inj.topo);
            ToolCallLedger ledger;
            ReachabilityMatrix m = get_reachability(ctx, ledger);
            if (m.failing_count() + m.unknown_count() > 0) continue;  // phase-1 visible

            ledger.current_turn = 2;
            DeepScanResult r = deep_scan(ctx, ledger);
            bool family_flagged = false;
            for (const auto& f : r.flags)
                if (f.family == family_of(l)) family_flagged = true;
            CHECK_MESSAGE(family_flagged, "deep scan missed a masked fault");
        }
    }
}

TEST_CASE("flag hints carry exact labels where the sweeps can tell") {
    Topology t = build_scenario("clos_bgp", "medium", 6);
    auto targets = enumerate_targets(t, FaultLabel::web_dos_attack);
    REQUIRE_FALSE(targets.empty());
    InjectionResult inj = inject(t, FaultLabel::web_dos_attack, targets[0], 6);
    ProbeContext ctx(inj.topo);
    ToolCallLedger ledger;
    DeepScanResult r = deep_scan(ctx, ledger);
    REQUIRE_FALSE(r.flags.empty());
    REQUIRE(r.flags[0].label.has_value());
    CHECK(to_string(*r.flags[0].label) == "web_dos_attack");
    CHECK(r.flags[0].device == targets[0]);
}
