#pragma once

// Network model: devices, interfaces, links, per-device config and service
// state, plus the static generation-time manifest (the lab's intended-state
// documentation, never touched by fault injection).

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "netdiag/ip.hpp"

namespace netdiag {

enum class DeviceKind { host, router, sw };

enum class LinkState { up, down, detached, flapping };

// One tick per engine turn; flapping links follow a square wave on it.
inline constexpr int kFlapPeriodTicks = 2;

struct Qdisc {
    enum class Kind { fifo, rate_limit, corrupt };
    Kind kind = Kind::fifo;
    int rate_kbps = 0;        // rate_limit
    int corrupt_percent = 0;  // corrupt
    bool is_default() const { return kind == Kind::fifo; }
};

struct Interface {
    std::string name;
    std::string mac;  // aa:bb:cc:dd:ee:ff
    std::optional<Ipv4> addr;
    int prefix_len = 0;
    bool admin_up = true;
    bool oper_up = true;                // static portion; link state applies on top
    std::optional<std::string> bridge;  // switch ports only
    Qdisc qdisc;
};

struct AclRule {
    enum class Proto { any, tcp, udp, icmp, ospf, arp };
    Proto proto = Proto::any;
    std::optional<int> dport;
    std::optional<int> sport;
    bool drop = true;
};

struct AclChain {
    std::string name;  // input | forward | output | arp_filter
    std::vector<AclRule> rules;
};

struct AclRuleset {
    std::vector<AclChain> chains;
    bool frag_drop = false;  // fragmentation-needed packets dropped
    AclChain* chain(const std::string& name);
    const AclChain* chain(const std::string& name) const;
};

struct StaticRoute {
    Prefix prefix;
    std::optional<Ipv4> next_hop;
    bool blackhole = false;
};

struct OspfConfig {
    bool daemon_up = true;
    std::map<std::string, int> areas;  // iface name -> area id
    std::vector<Prefix> advertised;
};

struct BgpNeighbor {
    Ipv4 peer_ip;
    uint32_t remote_asn = 0;
};

struct BgpConfig {
    bool daemon_up = true;
    uint32_t local_asn = 0;
    std::vector<BgpNeighbor> neighbors;
    std::vector<Prefix> advertised;
};

struct RoutingConfig {
    std::vector<StaticRoute> statics;
    std::optional<OspfConfig> ospf;
    std::optional<BgpConfig> bgp;
};

struct ArpEntry {
    Ipv4 ip;
    std::string mac;
    bool is_static = false;
};

struct DhcpLease {
    Ipv4 ip;
    Ipv4 gateway;
    Ipv4 dns;
    Prefix subnet;
};

struct HostNet {
    std::vector<std::string> resolvers;  // raw strings; may hold a malformed entry
    std::optional<Ipv4> gateway;
    std::vector<ArpEntry> static_arp;
    bool dhcp_managed = false;
    std::optional<DhcpLease> lease;
};

struct DnsService {
    bool daemon_up = true;
    Ipv4 listen_ip;
    int listen_port = 53;
    std::map<std::string, Ipv4> zone;
    int lookup_latency_ms = 10;
};

struct HttpService {
    bool daemon_up = true;
    int port = 80;
};

struct DhcpSubnet {
    Prefix prefix;
    Ipv4 gateway;
    Ipv4 dns;
};

struct DhcpService {
    bool daemon_up = true;
    std::vector<DhcpSubnet> subnets;
};

struct LbService {
    std::vector<std::string> backends;
    bool overloaded = false;
};

struct Services {
    std::optional<DnsService> dns;
    std::optional<HttpService> http;
    std::optional<DhcpService> dhcp;
    std::optional<LbService> lb;
};

struct Resources {
    double cpu_load = 0.05;
    int open_sockets = 20;
    std::vector<std::string> stress_processes;
    int app_delay_ms = 0;
};

struct Device {
    std::string name;
    DeviceKind kind = DeviceKind::host;
    std::vector<Interface> interfaces;
    RoutingConfig routing;
    AclRuleset acl;
    HostNet host;
    Services services;
    Resources res;
    bool crashed = false;

    Interface* iface(const std::string& name);
    const Interface* iface(const std::string& name) const;
    // First interface carrying an address (the access interface for hosts).
    const Interface* primary_iface() const;
    Interface* primary_iface();
    bool owns_ip(Ipv4 ip) const;
};

struct LinkEnd {
    std::string device;
    std::string iface;
};

struct Link {
    std::string id;  // "devA/ifA--devB/ifB", endpoint with lower device name first
    LinkEnd a, b;
    LinkState state = LinkState::up;
    int loss_percent = 0;

    bool touches(const std::string& device) const { return a.device == device || b.device == device; }
    static std::string make_id(const LinkEnd& x, const LinkEnd& y);
};

// Per-host plan recorded at generation time.
struct HostPlan {
    Ipv4 ip;
    int prefix_len = 0;
    Ipv4 gateway;
};

// Static structure handed to the diagnostic side: names, kinds, wiring and the
// address plan. Probes are the only window into live state.
struct Manifest {
    std::map<std::string, DeviceKind> kinds;
    std::map<std::string, HostPlan> hosts;                // endpoint devices only
    std::vector<std::pair<std::string, std::string>> links;  // structural wiring
    std::map<std::string, std::vector<std::string>> roles;   // device -> dns/http/dhcp/lb
    std::map<std::string, std::string> gateway_router;       // host -> first-hop router
    std::map<std::string, std::string> macs;  // device -> recorded access-NIC mac
};

struct Topology {
    std::string scenario;  // clos_bgp | campus_ospf_service | isp_static
    std::string size;      // small | medium | large
    uint64_t seed = 0;
    std::map<std::string, Device> devices;
    std::vector<Link> links;
    Manifest manifest;

    const Device* device(const std::string& name) const;
    Device* device(const std::string& name);
    const Link* link_of(const std::string& device, const std::string& iface) const;
    Link* link_of(const std::string& device, const std::string& iface);
    const Link* link_by_id(const std::string& id) const;
    Link* link_by_id(const std::string& id);
    // Device owning this address on any interface, if any.
    const Device* owner_of(Ipv4 ip) const;
    std::vector<std::string> host_names() const;  // endpoint devices, sorted
};

// Observable interface state at a tick: admin/oper plus the attached link.
bool iface_oper_up(const Topology& t, const Device& d, const Interface& i, int tick);
// False when the wire itself is gone (detached link).
bool iface_carrier(const Topology& t, const Device& d, const Interface& i);
// Carrier transition counter as a NIC would report it (grows while flapping).
int iface_carrier_transitions(const Topology& t, const Device& d, const Interface& i, int tick);
bool link_passes(const Link& l, int tick);

inline const char* to_string(DeviceKind k) {
    switch (k) {
        case DeviceKind::host: return "host";
        case DeviceKind::router: return "router";
        default: return "switch";
    }
}
inline const char* to_string(LinkState s) {
    switch (s) {
        case LinkState::up: return "up";
        case LinkState::down: return "down";
        case LinkState::detached: return "detached";
        default: return "flapping";
    }
}

}  // namespace netdiag
