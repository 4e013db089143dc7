#pragma once

// Instrumented observation layer. Probes are pure views over the topology —
// they never mutate it — and every call is charged to the tool-call ledger.
// The ledger's current turn doubles as the virtual clock tick that flapping
// links follow.

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "netdiag/converge.hpp"
#include "netdiag/model.hpp"

namespace netdiag {

struct LedgerEntry {
    int turn = 0;
    std::string call;
};

struct ToolCallLedger {
    int current_turn = 1;
    std::vector<LedgerEntry> entries;

    int count() const { return int(entries.size()); }
    void charge(const std::string& call) { entries.push_back({current_turn, call}); }
};

// --- reachability ---

struct ReachabilityEntry {
    std::string source;
    std::string destination;
    std::optional<int> tx;  // null exactly when status == unknown
    std::optional<int> rx;
    int loss_percent = 0;
    std::string status;  // ok | loss | timeout | refused | unreachable | unknown
    std::optional<Ipv4> dest_ip;
};

struct ReachabilityMatrix {
    std::vector<ReachabilityEntry> entries;
    int ok_count() const;
    int failing_count() const;   // loss/timeout/refused/unreachable
    int unknown_count() const;
};

// --- probe kinds and results ---

enum class ProbeKind {
    list_ruleset,
    iface_addr,
    route_table,
    route_get,       // param: target ip
    arp_table,
    resolver_config,
    ospf_neighbors,
    ospf_config,
    bgp_summary,
    bgp_config,
    qdisc_state,
    process_list,
    socket_list,
    dhcp_link_log,
    dns_lookup,      // param: hostname
    http_timing,     // param: url host
    resource_stats,
};

const char* to_string(ProbeKind k);

struct RulesetView {
    std::vector<AclChain> chains;
    bool frag_drop = false;
};

struct IfaceEntry {
    std::string name;
    std::string mac;
    std::optional<Ipv4> addr;
    int prefix_len = 0;
    bool admin_up = true;
    bool oper_up = true;
    bool carrier = true;
    int carrier_transitions = 1;
    Qdisc qdisc;
    std::optional<std::string> bridge;
};
struct IfaceView {
    std::vector<IfaceEntry> interfaces;
};

struct RouteEntryView {
    Prefix prefix;
    std::string origin;
    std::optional<Ipv4> next_hop;
    bool blackhole = false;
};
struct RouteTableView {
    std::vector<RouteEntryView> routes;
};

struct RouteGetView {
    bool has_route = false;
    Prefix prefix;
    std::optional<Ipv4> next_hop;
    bool blackhole = false;
};

struct ArpTableView {
    std::vector<ArpEntry> entries;
};

struct ResolverView {
    std::vector<std::string> resolvers;
    std::optional<Ipv4> gateway;
    bool dhcp_managed = false;
    std::optional<Ipv4> lease_dns;
    std::optional<Ipv4> lease_gateway;
};

struct OspfNeighborEntry {
    std::string neighbor;
    std::string iface;
    int area = 0;
    std::string state;  // Full
};
struct OspfNeighborsView {
    bool daemon_up = false;
    std::vector<OspfNeighborEntry> neighbors;
};

struct OspfConfigView {
    bool configured = false;
    bool daemon_up = false;
    std::map<std::string, int> areas;
    std::vector<Prefix> advertised;
};

struct BgpSessionEntry {
    Ipv4 peer_ip;
    std::string peer_device;
    uint32_t remote_asn = 0;
    bool established = false;
    std::string reason;
};
struct BgpSummaryView {
    bool daemon_up = false;
    std::vector<BgpSessionEntry> sessions;
};

struct BgpConfigView {
    bool configured = false;
    bool daemon_up = false;
    uint32_t local_asn = 0;
    std::vector<BgpNeighbor> neighbors;
    std::vector<Prefix> advertised;
};

struct QdiscEntry {
    std::string iface;
    Qdisc qdisc;
};
struct QdiscView {
    std::vector<QdiscEntry> entries;
};

struct ProcessEntry {
    int pid = 0;
    std::string name;
};
struct ProcessListView {
    std::vector<ProcessEntry> processes;
};

struct SocketEntry {
    std::string proto;  // tcp | udp
    Ipv4 local_ip;
    int port = 0;
    std::string process;
};
struct SocketListView {
    std::vector<SocketEntry> listeners;
    int open_count = 0;
};

struct DhcpLinkLogView {
    std::vector<std::string> events;
    bool lease_present = false;
    std::optional<Ipv4> lease_gateway;
    std::optional<Ipv4> lease_dns;
    bool discover_retries = false;
    int carrier_transitions = 1;
    bool server_daemon_up = false;       // set when probed on a dhcp server
    std::vector<DhcpSubnet> served;      // server-side pool configuration
};

struct DnsLookupView {
    bool ok = false;
    std::optional<Ipv4> answer;
    int latency_ms = 0;
    std::string rcode;  // noerror | nxdomain | refused | unreachable
};

struct HttpTimingView {
    std::string status;  // ok | refused | timeout
    int latency_ms = 0;
};

struct ResourceStatsView {
    double cpu_load = 0;
    int open_sockets = 0;
    std::vector<std::string> stress_processes;
    int app_delay_ms = 0;
};

struct Unresponsive {};  // device did not answer any probe

using ProbeResult =
    std::variant<Unresponsive, RulesetView, IfaceView, RouteTableView, RouteGetView, ArpTableView,
                 ResolverView, OspfNeighborsView, OspfConfigView, BgpSummaryView, BgpConfigView,
                 QdiscView, ProcessListView, SocketListView, DhcpLinkLogView, DnsLookupView,
                 HttpTimingView, ResourceStatsView>;

// --- path walk internals, exposed for the test oracles ---

struct WalkResult {
    bool ok = false;
    double delivery = 1.0;  // survival probability across lossy hops
    std::string reason;
    std::vector<std::string> path;  // device names visited
};

struct PingOutcome {
    std::string status;
    int loss_percent = 0;
};

struct ResolveOutcome {
    bool ok = false;
    Ipv4 answer;
    std::string pod;  // resolver that answered
    std::string reason;
};

// Bundles the world with its converged RIB; build once per incident.
struct ProbeContext {
    const Topology& topo;
    Rib rib;
    explicit ProbeContext(const Topology& t) : topo(t), rib(converge(t)) {}
};

WalkResult path_walk(const ProbeContext& ctx, const std::string& src_dev, Ipv4 dst_ip,
                     AclRule::Proto proto, std::optional<int> dport, std::optional<int> sport,
                     int tick);
PingOutcome ping_status(const ProbeContext& ctx, const std::string& src_dev, Ipv4 dst_ip, int tick);
ResolveOutcome resolve_name(const ProbeContext& ctx, const std::string& src_dev,
                            const std::string& name, int tick);

// One ledger charge for the whole matrix.
ReachabilityMatrix get_reachability(const ProbeContext& ctx, ToolCallLedger& ledger);
// One charge; bypasses name resolution, so status is never unknown.
ReachabilityEntry ping_direct_ip(const ProbeContext& ctx, ToolCallLedger& ledger,
                                 const std::string& src, Ipv4 dst_ip);
// One charge per probe.
ProbeResult run_probe(const ProbeContext& ctx, ToolCallLedger& ledger, const std::string& device,
                      ProbeKind kind, const std::string& param = "");

}  // namespace netdiag
