#pragma once

// Deterministic control-plane convergence: OSPF adjacencies, BGP sessions and
// the resulting per-device RIBs. Longest prefix wins; on equal length the
// origin preference is connected > static > ospf > bgp. Flapping links count
// as up here (steady state); forwarding applies the square wave per tick.

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "netdiag/model.hpp"

namespace netdiag {

enum class RouteOrigin { connected, static_route, ospf, bgp };

struct RibEntry {
    Prefix prefix;
    RouteOrigin origin = RouteOrigin::connected;
    std::optional<Ipv4> next_hop;      // absent for connected and blackhole
    std::optional<std::string> out_iface;
    bool blackhole = false;
};

struct Rib {
    std::map<std::string, std::vector<RibEntry>> by_device;
    const RibEntry* lookup(const std::string& device, Ipv4 dst) const;
};

struct OspfAdjacency {
    std::string dev_a, iface_a;
    std::string dev_b, iface_b;
    int area = 0;
};

struct BgpSession {
    std::string dev_a, dev_b;
    Ipv4 addr_a, addr_b;  // peering addresses (a's own address, b's own address)
    bool established = false;
    std::string down_reason;  // empty when established
};

// Full adjacencies actually formed (both sides healthy).
std::vector<OspfAdjacency> ospf_adjacencies(const Topology& t);
// Every configured session attempt with its outcome.
std::vector<BgpSession> bgp_sessions(const Topology& t);

Rib converge(const Topology& t);

int origin_rank(RouteOrigin o);
const char* to_string(RouteOrigin o);

}  // namespace netdiag
