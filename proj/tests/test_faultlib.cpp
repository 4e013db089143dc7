#include <doctest.h>

#include <set>

#include "netdiag/faultlib.hpp"
#include "netdiag/scenario.hpp"
#include "netdiag/topology_json.hpp"

using namespace netdiag;

TEST_CASE("every label is injectable somewhere on the grid") {
    std::set<FaultLabel> covered;
    for (const auto& sc : scenario_classes())
        for (const auto& sz : size_classes()) {
            Topology t = build_scenario(sc, sz, 1);
            for (FaultLabel l : all_labels())
                if (!enumerate_targets(t, l).empty()) covered.insert(l);
        }
    CHECK(covered.size() == all_labels().size());
}

TEST_CASE("inject leaves its input untouched and verify passes everywhere") {
    for (const auto& sc : scenario_classes()) {
        Topology base = build_scenario(sc, "small", 4);
        std::string before = topology_to_string(base);
        for (FaultLabel l : all_labels()) {
            auto targets = enumerate_targets(base, l);
            if (targets.empty()) continue;
            CAPTURE(sc);
            CAPTURE(to_string(l));
            InjectionResult inj = inject(base, l, targets[targets.size() / 2], 4);
            CHECK(topology_to_string(base) == before);  // input untouched

            CHECK(inj.truth.is_anomaly);
            REQUIRE(inj.truth.labels.size() == 1);
            CHECK(inj.truth.labels[0] == to_string(l));
            CHECK_FALSE(inj.truth.devices.empty());

            VerifyResult vr = verify_injection(inj.topo, inj.truth);
            CHECK_MESSAGE(vr.verified, vr.reason);
        }
    }
}

TEST_CASE("injection is a single canonical mutation") {
    // Rebuilding with the same arguments gives a byte-identical faulted world.
    Topology base = build_scenario("campus_ospf_service", "medium", 9);
    for (FaultLabel l : {FaultLabel::link_down, FaultLabel::host_wrong_ip,
                         FaultLabel::dhcp_spoofed_dns, FaultLabel::ospf_neighbor_missing}) {
        auto targets = enumerate_targets(base, l);
        REQUIRE_FALSE(targets.empty());
        InjectionResult a = inject(base, l, targets[0], 9);
        InjectionResult b = inject(base, l, targets[0], 9);
        CHECK(topology_to_string(a.topo) == topology_to_string(b.topo));
    }
}

TEST_CASE("structural diff touches only the blamed device's neighborhood") {
    Topology base = build_scenario("isp_static", "small", 4);
    auto targets = enumerate_targets(base, FaultLabel::host_wrong_gateway);
    REQUIRE_FALSE(targets.empty());
    InjectionResult inj = inject(base, FaultLabel::host_wrong_gateway, targets[0], 4);

    int changed = 0;
    for (const auto& [name, d] : base.devices) {
        if (topology_to_string(Topology{base.scenario, base.size, base.seed, {{name, d}}, {}, {}}) !=
            topology_to_string(
                Topology{base.scenario, base.size, base.seed, {{name, *inj.topo.device(name)}}, {}, {}})) {
            ++changed;
            CHECK(name == targets[0]);
        }
    }
    CHECK(changed == 1);
}

TEST_CASE("the auditor is independent: unapplied mutations are caught") {
    // Hand the verifier a pristine world with every label's truth record; it
    // must reject them all. This is what catches a silently broken injector.
    for (const auto& sc : scenario_classes()) {
        Topology base = build_scenario(sc, "small", 4);
        for (FaultLabel l : all_labels()) {
            auto targets = enumerate_targets(base, l);
            if (targets.empty()) continue;
            InjectionResult inj = inject(base, l, targets[0], 4);
            VerifyResult vr = verify_injection(base, inj.truth);  // note: base, not inj.topo
            CAPTURE(sc);
            CAPTURE(to_string(l));
            CHECK_FALSE(vr.verified);
            CHECK_FALSE(vr.reason.empty());
        }
    }
}

TEST_CASE("benign audit is clean on pristine worlds and names the offender otherwise") {
    for (const auto& sc : scenario_classes()) {
        Topology base = build_scenario(sc, "medium", 4);
        std::string firing;
        CHECK_MESSAGE(verify_benign(base, &firing), firing);
    }
    Topology t = build_scenario("clos_bgp", "small", 4);
    auto targets = enumerate_targets(t, FaultLabel::web_dos_attack);
    REQUIRE_FALSE(targets.empty());
    InjectionResult inj = inject(t, FaultLabel::web_dos_attack, targets[0], 4);
    std::string firing;
    CHECK_FALSE(verify_benign(inj.topo, &firing));
    CHECK(firing == "web_dos_attack");
}

TEST_CASE("link faults blame both endpoints") {
    Topology t = build_scenario("clos_bgp", "small", 4);
    auto targets = enumerate_targets(t, FaultLabel::link_detach);
    REQUIRE_FALSE(targets.empty());
    InjectionResult inj = inject(t, FaultLabel::link_detach, targets[0], 4);
    CHECK(inj.truth.devices.size() == 2);
    CHECK(std::is_sorted(inj.truth.devices.begin(), inj.truth.devices.end()));
}

TEST_CASE("bad targets are rejected") {
    Topology t = build_scenario("clos_bgp", "small", 4);
    CHECK_THROWS_AS(inject(t, FaultLabel::host_crash, "leaf_router_1", 4), FaultError);
    CHECK_THROWS_AS(inject(t, FaultLabel::link_down, "no_such_link", 4), FaultError);
    CHECK_THROWS_AS(inject(t, FaultLabel::ospf_neighbor_missing, "client_0", 4), FaultError);
}
