#include <doctest.h>

#include "netdiag/faultlib.hpp"
#include "netdiag/probes.hpp"
#include "netdiag/scenario.hpp"
#include "netdiag/thresholds.hpp"
#include "netdiag/topology_json.hpp"

using namespace netdiag;

TEST_CASE("benign reachability: every directed pair answers") {
    Topology t = build_scenario("isp_static", "small", 3);
    ProbeContext ctx(t);
    ToolCallLedger ledger;
    ReachabilityMatrix m = get_reachability(ctx, ledger);

    size_t hosts = t.manifest.hosts.size();
    CHECK(m.entries.size() == hosts * (hosts - 1));
    CHECK(m.ok_count() == int(m.entries.size()));
    CHECK(m.failing_count() == 0);
    CHECK(m.unknown_count() == 0);
    CHECK(ledger.count() == 1);  // the whole matrix is one charge
    for (const auto& e : m.entries) {
        CHECK(e.status == "ok");
        CHECK(e.tx == 10);
        CHECK(e.rx == 10);
        CHECK(e.loss_percent == 0);
    }
}

TEST_CASE("unknown status appears exactly on source-side resolution failure") {
    Topology t = build_scenario("isp_static", "small", 3);
    InjectionResult inj = inject(t, FaultLabel::host_incorrect_dns, "client_1", 3);
    ProbeContext ctx(inj.topo);
    ToolCallLedger ledger;
    ReachabilityMatrix m = get_reachability(ctx, ledger);
    for (const auto& e : m.entries) {
        CAPTURE(e.source);
        if (e.source == "client_1") {
            CHECK(e.status == "unknown");
            CHECK_FALSE(e.tx.has_value());
        } else {
            CHECK(e.status == "ok");
        }
    }
    // Direct ping bypasses resolution, so the same source can still reach.
    Ipv4 dst = inj.topo.manifest.hosts.begin()->second.ip;
    ReachabilityEntry direct = ping_direct_ip(ctx, ledger, "client_1", dst);
    CHECK(direct.status == "ok");
}

TEST_CASE("probes never mutate the world") {
    Topology t = build_scenario("campus_ospf_service", "small", 2);
    std::string before = topology_to_string(t);
    ProbeContext ctx(t);
    ToolCallLedger ledger;
    get_reachability(ctx, ledger);
    for (const auto& [name, d] : t.devices)
        for (ProbeKind k :
             {ProbeKind::list_ruleset, ProbeKind::iface_addr, ProbeKind::route_table,
              ProbeKind::arp_table, ProbeKind::resolver_config, ProbeKind::ospf_neighbors,
              ProbeKind::bgp_summary, ProbeKind::qdisc_state, ProbeKind::process_list,
              ProbeKind::socket_list, ProbeKind::dhcp_link_log, ProbeKind::resource_stats})
            run_probe(ctx, ledger, name, k);
    CHECK(topology_to_string(t) == before);
}

TEST_CASE("every probe call is charged to the ledger") {
    Topology t = build_scenario("clos_bgp", "small", 2);
    ProbeContext ctx(t);
    ToolCallLedger ledger;
    run_probe(ctx, ledger, "leaf_router_1", ProbeKind::bgp_summary);
    run_probe(ctx, ledger, "client_0", ProbeKind::iface_addr);
    ledger.current_turn = 4;
    run_probe(ctx, ledger, "client_0", ProbeKind::dns_lookup, "web_server_0");
    REQUIRE(ledger.count() == 3);
    CHECK(ledger.entries[0].call == "bgp_summary:leaf_router_1");
    CHECK(ledger.entries[0].turn == 1);
    CHECK(ledger.entries[2].call == "dns_lookup:client_0:web_server_0");
    CHECK(ledger.entries[2].turn == 4);
}

TEST_CASE("process table uses the fixed pid plan") {
    Topology campus = build_scenario("campus_ospf_service", "small", 2);
    ProbeContext ctx(campus);
    ToolCallLedger ledger;

    auto pids = [&](const std::string& dev) {
        auto v = run_probe(ctx, ledger, dev, ProbeKind::process_list);
        std::map<std::string, int> out;
        for (const auto& p : std::get<ProcessListView>(v).processes) out[p.name] = p.pid;
        return out;
    };

    auto router = pids("dist_router_1");
    CHECK(router.at("init") == 1);
    CHECK(router.at("sshd") == 7);
    CHECK(router.at("watchfrr") == 15);
    CHECK(router.at("zebra") == 17);
    CHECK(router.at("ospfd") == 19);
    CHECK(router.count("bgpd") == 0);  // no bgp in the campus class

    auto client = pids("client_0");
    CHECK(client.at("init") == 1);
    CHECK(client.count("zebra") == 0);
}

TEST_CASE("crashed devices are unresponsive to everything") {
    Topology t = build_scenario("isp_static", "small", 2);
    InjectionResult inj = inject(t, FaultLabel::host_crash, "client_2", 2);
    ProbeContext ctx(inj.topo);
    ToolCallLedger ledger;
    for (ProbeKind k : {ProbeKind::iface_addr, ProbeKind::process_list, ProbeKind::arp_table}) {
        auto v = run_probe(ctx, ledger, "client_2", k);
        CHECK(std::holds_alternative<Unresponsive>(v));
    }
    auto ok = run_probe(ctx, ledger, "client_0", ProbeKind::iface_addr);
    CHECK_FALSE(std::holds_alternative<Unresponsive>(ok));
}

TEST_CASE("flapping follows the square wave on the ledger clock") {
    Topology t = build_scenario("isp_static", "small", 2);
    auto targets = enumerate_targets(t, FaultLabel::link_flap);
    REQUIRE_FALSE(targets.empty());
    InjectionResult inj = inject(t, FaultLabel::link_flap, targets[0], 2);
    ProbeContext ctx(inj.topo);
    ToolCallLedger ledger;

    // (tick/2) % 2 == 0 means up: ticks 1,4,5 up; 2,3,6,7 down. The initial
    // scan always lands on an up phase, masking the fault from turn 1.
    auto failing_at = [&](int tick) {
        ledger.current_turn = tick;
        return get_reachability(ctx, ledger).failing_count();
    };
    CHECK(failing_at(1) == 0);
    CHECK(failing_at(2) > 0);
    CHECK(failing_at(3) > 0);
    CHECK(failing_at(4) == 0);
}

TEST_CASE("dns lookup latency and poisoning are visible per pod") {
    Topology t = build_scenario("clos_bgp", "small", 2);
    InjectionResult inj = inject(t, FaultLabel::dns_lookup_latency, "dns_pod1", 2);
    ProbeContext ctx(inj.topo);
    ToolCallLedger ledger;
    // the lookup probe interrogates the pod itself
    auto v = run_probe(ctx, ledger, "dns_pod1", ProbeKind::dns_lookup, "web_server_0");
    auto& view = std::get<DnsLookupView>(v);
    CHECK(view.rcode == "noerror");
    CHECK(view.ok);
    CHECK(view.latency_ms == kDnsLatencyInjectMs);
    CHECK(view.latency_ms > kDnsLatencyThresholdMs);
}

TEST_CASE("http timing reflects load-balancer overload") {
    Topology t = build_scenario("clos_bgp", "medium", 2);
    auto targets = enumerate_targets(t, FaultLabel::load_balancer_overload);
    REQUIRE_FALSE(targets.empty());
    InjectionResult inj = inject(t, FaultLabel::load_balancer_overload, targets[0], 2);
    ProbeContext ctx(inj.topo);
    ToolCallLedger ledger;
    auto v = run_probe(ctx, ledger, targets[0], ProbeKind::http_timing);
    auto& view = std::get<HttpTimingView>(v);
    CHECK(view.status == "ok");
    CHECK(view.latency_ms > kHttpLatencyThresholdMs);
}
