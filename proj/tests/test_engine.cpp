#include <doctest.h>

#include "netdiag/engine.hpp"
#include "netdiag/faultlib.hpp"
#include "netdiag/scenario.hpp"

using namespace netdiag;

namespace {

const SkillSet& skills() {
    static SkillSet s = load_builtin_skills();
    return s;
}

}  // namespace

TEST_CASE("benign worlds: quiet scan, full deep scan, all-clear in six turns") {
    for (const auto& sc : scenario_classes()) {
        CAPTURE(sc);
        Topology t = build_scenario(sc, "small", 8);
        DiagnosisResult r = diagnose(t, skills());
        REQUIRE(r.submission.has_value());
        CHECK_FALSE(r.submission->is_anomaly);
        CHECK(r.submission->labels.empty());
        CHECK(r.submission->devices.empty());
        CHECK(r.trace.outcome == "no_anomaly");
        // 1 scan + 4 deep phases + 1 submission
        CHECK(r.trace.turns_used == 6);
    }
}

TEST_CASE("every small-grid fault is diagnosed exactly") {
    for (const auto& sc : scenario_classes()) {
        Topology base = build_scenario(sc, "small", 8);
        for (FaultLabel l : all_labels()) {
            auto targets = enumerate_targets(base, l);
            if (targets.empty()) continue;
            CAPTURE(sc);
            CAPTURE(to_string(l));
            InjectionResult inj = inject(base, l, targets[0], 8);
            DiagnosisResult r = diagnose(inj.topo, skills());

            REQUIRE_MESSAGE(r.submission.has_value(), r.trace.text());
            CHECK(r.submission->is_anomaly);
            REQUIRE(r.submission->labels.size() == 1);
            CHECK_MESSAGE(r.submission->labels[0] == to_string(l), r.trace.text());
            CHECK_MESSAGE(r.submission->devices == inj.truth.devices, r.trace.text());
            CHECK(r.trace.turns_used <= kDefaultBudget);
            CHECK(r.trace.outcome == "submitted");
        }
    }
}

TEST_CASE("diagnosis is deterministic") {
    Topology base = build_scenario("campus_ospf_service", "small", 8);
    auto targets = enumerate_targets(base, FaultLabel::dhcp_spoofed_subnet);
    REQUIRE_FALSE(targets.empty());
    InjectionResult inj = inject(base, FaultLabel::dhcp_spoofed_subnet, targets[0], 8);
    DiagnosisResult a = diagnose(inj.topo, skills());
    DiagnosisResult b = diagnose(inj.topo, skills());
    CHECK(a.trace.text() == b.trace.text());
    CHECK(a.trace.tool_calls == b.trace.tool_calls);
}

TEST_CASE("budget exhaustion ends in honest silence") {
    Topology base = build_scenario("clos_bgp", "small", 8);
    auto targets = enumerate_targets(base, FaultLabel::bgp_hijacking);
    REQUIRE_FALSE(targets.empty());
    InjectionResult inj = inject(base, FaultLabel::bgp_hijacking, targets[0], 8);
    DiagnosisResult r = diagnose(inj.topo, skills(), 3);
    CHECK_FALSE(r.submission.has_value());
    CHECK(r.trace.outcome == "no_submission");
    CHECK(r.trace.turns_used <= 3);
}

TEST_CASE("a benign all-clear needs the budget for the whole deep scan") {
    Topology t = build_scenario("isp_static", "small", 8);
    DiagnosisResult r = diagnose(t, skills(), 4);  // scan + deep would need 5
    CHECK_FALSE(r.submission.has_value());
    CHECK(r.trace.outcome == "no_submission");
}

TEST_CASE("stop and submit: the submission is the last act") {
    Topology base = build_scenario("isp_static", "small", 8);
    auto targets = enumerate_targets(base, FaultLabel::icmp_acl_block);
    REQUIRE_FALSE(targets.empty());
    InjectionResult inj = inject(base, FaultLabel::icmp_acl_block, targets[0], 8);
    DiagnosisResult r = diagnose(inj.topo, skills());
    REQUIRE(r.submission.has_value());
    REQUIRE_FALSE(r.trace.events.empty());

    const TraceEvent& last = r.trace.events.back();
    CHECK(last.kind == "submit");
    CHECK(last.turn == r.trace.turns_used);

    // the match that triggered it sits on the immediately preceding turn
    int match_turn = -1;
    for (const auto& ev : r.trace.events)
        if (ev.kind == "skill" && ev.detail.find("matched {") != std::string::npos)
            match_turn = ev.turn;
    CHECK(match_turn + 1 == last.turn);
}

TEST_CASE("spine redundancy masks the scan but not the diagnosis") {
    // With two spines, killing the routing stack on one leaves every pair
    // reachable; the engine must still find and localize the dead stack.
    Topology base = build_scenario("clos_bgp", "small", 8);
    InjectionResult inj = inject(base, FaultLabel::frr_service_down, "spine_router_1_2", 8);

    ProbeContext ctx(inj.topo);
    ToolCallLedger ledger;
    ReachabilityMatrix m = get_reachability(ctx, ledger);
    CHECK(m.failing_count() == 0);
    CHECK(m.unknown_count() == 0);

    DiagnosisResult r = diagnose(inj.topo, skills());
    REQUIRE(r.submission.has_value());
    CHECK(r.submission->labels == std::vector<std::string>{"frr_service_down"});
    CHECK(r.submission->devices == std::vector<std::string>{"spine_router_1_2"});
}

TEST_CASE("trace events are ordered and inside budget") {
    Topology base = build_scenario("campus_ospf_service", "small", 8);
    auto targets = enumerate_targets(base, FaultLabel::dns_service_down);
    REQUIRE_FALSE(targets.empty());
    InjectionResult inj = inject(base, FaultLabel::dns_service_down, targets[0], 8);
    DiagnosisResult r = diagnose(inj.topo, skills());

    int prev = 0;
    for (const auto& ev : r.trace.events) {
        CHECK(ev.turn >= prev);
        CHECK(ev.turn <= kDefaultBudget);
        prev = ev.turn;
    }
    REQUIRE_FALSE(r.trace.events.empty());
    CHECK(r.trace.events.front().kind == "scan");
    CHECK(r.trace.events.front().turn == 1);
}
