#include <doctest.h>

#include <set>

#include "netdiag/scenario.hpp"
#include "netdiag/topology_json.hpp"

using namespace netdiag;

TEST_CASE("generation is deterministic byte for byte") {
    for (const auto& sc : scenario_classes())
        for (const auto& sz : size_classes()) {
            Topology a = build_scenario(sc, sz, 9001);
            Topology b = build_scenario(sc, sz, 9001);
            CHECK(topology_to_string(a) == topology_to_string(b));
        }
}

TEST_CASE("seed varies hardware addresses and nothing else") {
    Topology a = build_scenario("clos_bgp", "small", 1);
    Topology b = build_scenario("clos_bgp", "small", 2);

    bool mac_differs = false;
    REQUIRE(a.devices.size() == b.devices.size());
    for (const auto& [name, da] : a.devices) {
        const Device* db = b.device(name);
        REQUIRE(db);
        REQUIRE(da.interfaces.size() == db->interfaces.size());
        for (size_t i = 0; i < da.interfaces.size(); ++i) {
            if (da.interfaces[i].mac != db->interfaces[i].mac) mac_differs = true;
            CHECK(da.interfaces[i].addr == db->interfaces[i].addr);
            CHECK(da.interfaces[i].name == db->interfaces[i].name);
        }
    }
    CHECK(mac_differs);

    // Scrubbing macs and the seed field makes the two byte-identical.
    auto scrub = [](Topology t) {
        t.seed = 0;
        for (auto& [n, d] : t.devices)
            for (auto& i : d.interfaces) i.mac = "xx";
        for (auto& [n, m] : t.manifest.macs) m = "xx";
        return topology_to_string(t);
    };
    CHECK(scrub(a) == scrub(b));
}

TEST_CASE("structure oracles per scenario and size") {
    // Device/link counts follow from the generator parameters: e.g. small
    // clos is 2 spines + 3 leaves + 5 hosts = 10 devices, 3*2 fabric /30s
    // + 5 host links = 11 links.
    struct Row {
        const char* sc;
        const char* sz;
        size_t devices, links;
    };
    const Row rows[] = {
        {"clos_bgp", "small", 10, 11},
        {"clos_bgp", "medium", 27, 41},
        {"clos_bgp", "large", 101, 353},
        {"campus_ospf_service", "small", 11, 10},
        {"campus_ospf_service", "medium", 26, 29},
        {"campus_ospf_service", "large", 102, 114},
        {"isp_static", "small", 11, 11},
        {"isp_static", "medium", 26, 26},
        {"isp_static", "large", 101, 101},
    };
    for (const Row& r : rows) {
        CAPTURE(r.sc);
        CAPTURE(r.sz);
        Topology t = build_scenario(r.sc, r.sz, 7);
        CHECK(t.devices.size() == r.devices);
        CHECK(t.links.size() == r.links);
        CHECK(t.scenario == r.sc);
        CHECK(t.size == r.sz);
    }
}

TEST_CASE("manifest covers every host with a plan") {
    for (const auto& sc : scenario_classes()) {
        Topology t = build_scenario(sc, "medium", 3);
        size_t hosts = 0;
        for (const auto& [name, d] : t.devices) {
            if (d.kind != DeviceKind::host) continue;
            ++hosts;
            auto it = t.manifest.hosts.find(name);
            REQUIRE_MESSAGE(it != t.manifest.hosts.end(), name);
            CHECK(it->second.prefix_len > 0);
            CHECK(t.manifest.gateway_router.count(name));
            CHECK(t.manifest.macs.count(name));
        }
        CHECK(t.manifest.hosts.size() == hosts);
        CHECK(t.manifest.kinds.size() == t.devices.size());
    }
}

TEST_CASE("scenario routing protocols match their class") {
    Topology clos = build_scenario("clos_bgp", "small", 1);
    Topology campus = build_scenario("campus_ospf_service", "small", 1);
    Topology isp = build_scenario("isp_static", "small", 1);

    auto any_with = [](const Topology& t, auto pred) {
        for (const auto& [n, d] : t.devices)
            if (pred(d)) return true;
        return false;
    };
    auto has_bgp = [](const Device& d) { return d.routing.bgp.has_value(); };
    auto has_ospf = [](const Device& d) { return d.routing.ospf.has_value(); };

    CHECK(any_with(clos, has_bgp));
    CHECK_FALSE(any_with(clos, has_ospf));
    CHECK(any_with(campus, has_ospf));
    CHECK_FALSE(any_with(campus, has_bgp));
    CHECK_FALSE(any_with(isp, has_bgp));
    CHECK_FALSE(any_with(isp, has_ospf));
}

TEST_CASE("clos ASN plan: spine group 65000+g, leaf 65100+k") {
    Topology t = build_scenario("clos_bgp", "small", 1);
    CHECK(t.device("spine_router_1_1")->routing.bgp->local_asn == 65001);
    CHECK(t.device("spine_router_1_2")->routing.bgp->local_asn == 65001);
    CHECK(t.device("leaf_router_1")->routing.bgp->local_asn == 65101);
    CHECK(t.device("leaf_router_3")->routing.bgp->local_asn == 65103);
}

TEST_CASE("topology JSON round-trips exactly") {
    for (const auto& sc : scenario_classes()) {
        Topology t = build_scenario(sc, "medium", 11);
        std::string once = topology_to_string(t);
        Topology back = topology_from_string(once);
        CHECK(topology_to_string(back) == once);
    }
}

TEST_CASE("unknown classes are rejected") {
    CHECK_THROWS_AS(build_scenario("mesh_everything", "small", 1), ScenarioError);
    CHECK_THROWS_AS(build_scenario("clos_bgp", "gigantic", 1), ScenarioError);
}
