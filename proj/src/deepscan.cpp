#include "netdiag/deepscan.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "netdiag/converge.hpp"
#include "netdiag/thresholds.hpp"

namespace netdiag {

namespace {

bool has_role(const Topology& t, const std::string& dev, const std::string& role) {
    auto it = t.manifest.roles.find(dev);
    if (it == t.manifest.roles.end()) return false;
    return std::find(it->second.begin(), it->second.end(), role) != it->second.end();
}

bool plain_client(const Topology& t, const std::string& dev) {
    return !t.manifest.roles.count(dev);
}

std::set<uint32_t> dns_pod_ips(const Topology& t) {
    std::set<uint32_t> out;
    for (const auto& [h, plan] : t.manifest.hosts)
        if (has_role(t, h, "dns")) out.insert(plan.ip.v);
    return out;
}

Prefix plan_subnet(const Topology& t, const std::string& host) {
    const HostPlan& p = t.manifest.hosts.at(host);
    return Prefix{p.ip, p.prefix_len}.network();
}

Flag make_flag(const std::string& dev, FaultFamily fam, std::optional<FaultLabel> label,
               std::string evidence, const char* sweep) {
    Flag f;
    f.device = dev;
    f.family = fam;
    f.label = label;
    f.evidence = std::move(evidence);
    f.sweep = sweep;
    return f;
}

Flag label_flag(const std::string& dev, FaultLabel label, std::string evidence,
                const char* sweep) {
    return make_flag(dev, family_of(label), label, std::move(evidence), sweep);
}

// True when the interface address is the planned gateway of some endpoint —
// i.e. the interface faces an access subnet rather than a p2p span.
bool faces_hosts(const Topology& t, const Interface& i) {
    if (!i.addr) return false;
    for (const auto& [h, plan] : t.manifest.hosts)
        if (plan.gateway == *i.addr) return true;
    return false;
}

std::string rule_text(const AclRule& r) {
    std::ostringstream os;
    switch (r.proto) {
        case AclRule::Proto::any: os << "any"; break;
        case AclRule::Proto::tcp: os << "tcp"; break;
        case AclRule::Proto::udp: os << "udp"; break;
        case AclRule::Proto::icmp: os << "icmp"; break;
        case AclRule::Proto::ospf: os << "proto 89"; break;
        case AclRule::Proto::arp: os << "arp"; break;
    }
    if (r.dport) os << " dport " << *r.dport;
    if (r.sport) os << " sport " << *r.sport;
    os << (r.drop ? " drop" : " accept");
    return os.str();
}

bool drop_matching(const Device& d, bool (*pred)(const AclRule&), std::string* text) {
    for (const auto& c : d.acl.chains) {
        for (const auto& r : c.rules) {
            if (r.drop && pred(r)) {
                if (text) *text = c.name + ": " + rule_text(r);
                return true;
            }
        }
    }
    return false;
}

}  // namespace

std::vector<Flag> infra_sweep(const ProbeContext& ctx, ToolCallLedger& ledger) {
    const Topology& t = ctx.topo;
    std::vector<Flag> flags;
    for (const auto& [name, d] : t.devices) {
        if (d.kind == DeviceKind::sw) continue;  // no agent on switches
        ledger.charge("infra_sweep:" + name);
        if (d.crashed) {
            flags.push_back(label_flag(name, FaultLabel::host_crash, "device unresponsive",
                                       "infra_sweep"));
            continue;
        }
        // ACL fingerprint dispatch, first match wins per device.
        std::string rt;
        if (drop_matching(d, [](const AclRule& r) { return r.proto == AclRule::Proto::arp; }, &rt)) {
            flags.push_back(label_flag(name, FaultLabel::arp_acl_block, rt, "infra_sweep"));
        } else if (drop_matching(d, [](const AclRule& r) { return r.proto == AclRule::Proto::ospf; },
                                 &rt)) {
            flags.push_back(label_flag(name, FaultLabel::ospf_acl_block, rt, "infra_sweep"));
        } else if (drop_matching(d,
                                 [](const AclRule& r) {
                                     return r.proto == AclRule::Proto::tcp &&
                                            ((r.dport && *r.dport == 179) ||
                                             (r.sport && *r.sport == 179));
                                 },
                                 &rt)) {
            flags.push_back(label_flag(name, FaultLabel::bgp_acl_block, rt, "infra_sweep"));
        } else if (drop_matching(d,
                                 [](const AclRule& r) {
                                     return r.proto == AclRule::Proto::tcp && r.dport &&
                                            *r.dport == 80;
                                 },
                                 &rt)) {
            flags.push_back(label_flag(name, FaultLabel::http_acl_block, rt, "infra_sweep"));
        } else if (drop_matching(d,
                                 [](const AclRule& r) {
                                     return (r.proto == AclRule::Proto::tcp ||
                                             r.proto == AclRule::Proto::udp) &&
                                            r.dport && *r.dport == 53;
                                 },
                                 &rt)) {
            flags.push_back(label_flag(name, FaultLabel::dns_port_blocked, rt, "infra_sweep"));
        } else if (drop_matching(d, [](const AclRule& r) { return r.proto == AclRule::Proto::icmp; },
                                 &rt)) {
            flags.push_back(label_flag(name, FaultLabel::icmp_acl_block, rt, "infra_sweep"));
        } else if (d.acl.frag_drop) {
            flags.push_back(label_flag(name, FaultLabel::link_fragmentation_disabled,
                                       "fragmentation-needed packets dropped", "infra_sweep"));
        }
        if (d.kind != DeviceKind::host) continue;
        // Host-side checks.
        for (const auto& r : d.host.resolvers) {
            if (!Ipv4::parse(r)) {
                flags.push_back(label_flag(name, FaultLabel::host_incorrect_dns,
                                           "resolver entry '" + r + "' is not an address",
                                           "infra_sweep"));
                break;
            }
        }
        const Interface* pi = d.primary_iface();
        if (!pi || !pi->addr) {
            if (d.host.dhcp_managed)
                flags.push_back(make_flag(name, FaultFamily::dhcp, std::nullopt,
                                          "managed interface holds no address", "infra_sweep"));
            else
                flags.push_back(label_flag(name, FaultLabel::host_missing_ip,
                                           "access interface holds no address", "infra_sweep"));
        }
        if (t.manifest.hosts.count(name) && !d.host.gateway) {
            flags.push_back(make_flag(name,
                                      d.host.dhcp_managed ? FaultFamily::dhcp : FaultFamily::host_ip,
                                      std::nullopt, "no default gateway configured",
                                      "infra_sweep"));
        }
        // Duplicate-MAC ARP entry: two subnet addresses resolving to one MAC.
        std::map<std::string, int> mac_count;
        Prefix mine = t.manifest.hosts.count(name) ? plan_subnet(t, name) : Prefix{};
        for (const auto& [other, plan] : t.manifest.hosts) {
            if (!(Prefix{plan.ip, plan.prefix_len}.network() == mine)) continue;
            const Device* od = t.device(other);
            const Interface* oi = od ? od->primary_iface() : nullptr;
            if (od && !od->crashed && oi) ++mac_count[oi->mac];
        }
        for (const auto& [mac, n] : mac_count) {
            if (n >= 2) {
                flags.push_back(label_flag(name, FaultLabel::mac_address_conflict,
                                           "two neighbours share mac " + mac, "infra_sweep"));
                break;
            }
        }
    }
    return flags;
}

std::vector<Flag> l2_snapshot(const ProbeContext& ctx, ToolCallLedger& ledger) {
    const Topology& t = ctx.topo;
    int tick = ledger.current_turn;
    std::vector<Flag> flags;
    std::map<std::string, std::vector<std::string>> by_mac;  // mac -> dev/iface
    for (const auto& [name, d] : t.devices) {
        if (d.kind == DeviceKind::sw) continue;
        ledger.charge("l2_snapshot:" + name);
        if (d.crashed) continue;  // infra_sweep already reported it
        for (const auto& i : d.interfaces) {
            by_mac[i.mac].push_back(name + "/" + i.name);
            if (d.kind != DeviceKind::router) continue;
            int trans = iface_carrier_transitions(t, d, i, tick);
            if (trans >= kFlapTransitionThreshold) {
                std::ostringstream os;
                os << i.name << " carrier changed " << trans << " times";
                flags.push_back(label_flag(name, FaultLabel::link_flap, os.str(), "l2_snapshot"));
                continue;
            }
            if (i.admin_up && !iface_oper_up(t, d, i, tick)) {
                bool carrier = iface_carrier(t, d, i);
                flags.push_back(label_flag(
                    name, carrier ? FaultLabel::link_down : FaultLabel::link_detach,
                    i.name + (carrier ? " operationally down" : " lost carrier"), "l2_snapshot"));
            }
        }
    }
    for (const auto& [mac, owners] : by_mac) {
        if (owners.size() < 2) continue;
        std::ostringstream os;
        os << "mac " << mac << " on";
        for (const auto& o : owners) os << " " << o;
        std::set<std::string> devs;
        for (const auto& o : owners) devs.insert(o.substr(0, o.find('/')));
        for (const auto& dv : devs)
            flags.push_back(
                label_flag(dv, FaultLabel::mac_address_conflict, os.str(), "l2_snapshot"));
    }
    return flags;
}

std::vector<Flag> ospf_snapshot(const ProbeContext& ctx, ToolCallLedger& ledger) {
    const Topology& t = ctx.topo;
    std::vector<Flag> flags;
    for (const auto& [name, d] : t.devices) {
        if (d.kind != DeviceKind::router || !d.routing.ospf) continue;
        ledger.charge("ospf_snapshot:" + name);
        if (d.crashed) continue;
        const OspfConfig& o = *d.routing.ospf;
        bool bgp_up = d.routing.bgp && d.routing.bgp->daemon_up;
        if (!o.daemon_up && !bgp_up) {
            flags.push_back(label_flag(name, FaultLabel::frr_service_down,
                                       "routing daemon stack not running", "ospf_snapshot"));
            continue;
        }
    }
    // Pairwise link checks need both configs; walk links once.
    for (const auto& l : t.links) {
        const Device* a = t.device(l.a.device);
        const Device* b = t.device(l.b.device);
        if (!a || !b || !a->routing.ospf || !b->routing.ospf) continue;
        if (a->crashed || b->crashed) continue;
        const auto& aa = a->routing.ospf->areas;
        const auto& ba = b->routing.ospf->areas;
        auto ia = aa.find(l.a.iface);
        auto ib = ba.find(l.b.iface);
        if (ia == aa.end() && ib != ba.end()) {
            flags.push_back(label_flag(l.a.device, FaultLabel::ospf_neighbor_missing,
                                       l.a.iface + " not enabled for routing; peer " +
                                           l.b.device + " expects an adjacency",
                                       "ospf_snapshot"));
        } else if (ib == ba.end() && ia != aa.end()) {
            flags.push_back(label_flag(l.b.device, FaultLabel::ospf_neighbor_missing,
                                       l.b.iface + " not enabled for routing; peer " +
                                           l.a.device + " expects an adjacency",
                                       "ospf_snapshot"));
        } else if (ia != aa.end() && ib != ba.end() && ia->second != ib->second) {
            // Backbone p2p spans are area 0 by design; the nonzero side drifted.
            bool blame_a = ia->second != 0;
            std::ostringstream os;
            os << "area " << ia->second << " vs " << ib->second << " across " << l.id;
            flags.push_back(label_flag(blame_a ? l.a.device : l.b.device,
                                       FaultLabel::ospf_area_misconfiguration, os.str(),
                                       "ospf_snapshot"));
        }
    }
    return flags;
}

std::vector<Flag> bgp_snapshot(const ProbeContext& ctx, ToolCallLedger& ledger) {
    const Topology& t = ctx.topo;
    std::vector<Flag> flags;
    auto sessions = bgp_sessions(t);
    std::set<std::string> gateway_speakers;
    for (const auto& [h, gw] : t.manifest.gateway_router) gateway_speakers.insert(gw);
    for (const auto& [name, d] : t.devices) {
        if (d.kind != DeviceKind::router || !d.routing.bgp) continue;
        ledger.charge("bgp_snapshot:" + name);
        if (d.crashed) continue;
        const BgpConfig& b = *d.routing.bgp;
        bool ospf_up = d.routing.ospf && d.routing.ospf->daemon_up;
        if (!b.daemon_up && !ospf_up) {
            flags.push_back(label_flag(name, FaultLabel::frr_service_down,
                                       "routing daemon stack not running", "bgp_snapshot"));
            continue;
        }
        // ASN audit: a router all of whose peers expect a different ASN is the
        // one that drifted; a single disagreeing session points at the peer.
        int mismatched = 0, total = 0;
        for (const auto& s : sessions) {
            if (s.dev_a != name && s.dev_b != name) continue;
            ++total;
            const std::string& peer = s.dev_a == name ? s.dev_b : s.dev_a;
            Ipv4 my_addr = s.dev_a == name ? s.addr_a : s.addr_b;
            const Device* pd = t.device(peer);
            if (!pd || !pd->routing.bgp) continue;
            for (const auto& nb : pd->routing.bgp->neighbors)
                if (nb.peer_ip == my_addr && nb.remote_asn != b.local_asn) ++mismatched;
        }
        if (total > 0 && mismatched * 2 > total) {
            std::ostringstream os;
            os << mismatched << "/" << total << " peers expect a different local AS";
            flags.push_back(
                label_flag(name, FaultLabel::bgp_asn_misconfig, os.str(), "bgp_snapshot"));
        }
        if (gateway_speakers.count(name) && b.advertised.empty()) {
            flags.push_back(label_flag(name, FaultLabel::bgp_missing_route_advertisement,
                                       "edge speaker advertises no prefixes", "bgp_snapshot"));
        }
        // Foreign-prefix audit.
        for (const auto& p : b.advertised) {
            for (const auto& [on, od] : t.devices) {
                if (on == name || !od.routing.bgp) continue;
                for (const auto& q : od.routing.bgp->advertised) {
                    if (p.len > q.len && q.contains(p.addr)) {
                        bool blackholed = false;
                        for (const auto& s : d.routing.statics)
                            if (s.blackhole && s.prefix.network() == p.network())
                                blackholed = true;
                        flags.push_back(label_flag(
                            name,
                            blackholed ? FaultLabel::bgp_blackhole_route_leak
                                       : FaultLabel::bgp_hijacking,
                            "advertises " + p.str() + " inside " + on + "'s " + q.str(),
                            "bgp_snapshot"));
                    }
                }
            }
        }
    }
    return flags;
}

std::vector<Flag> tc_snapshot(const ProbeContext& ctx, ToolCallLedger& ledger) {
    const Topology& t = ctx.topo;
    std::vector<Flag> flags;
    for (const auto& [name, d] : t.devices) {
        if (d.kind != DeviceKind::router) continue;
        ledger.charge("tc_snapshot:" + name);
        if (d.crashed) continue;
        for (const auto& i : d.interfaces) {
            if (i.qdisc.is_default()) continue;
            std::ostringstream os;
            if (i.qdisc.kind == Qdisc::Kind::corrupt) {
                os << i.name << " corrupting " << i.qdisc.corrupt_percent << "% of frames";
                flags.push_back(label_flag(name, FaultLabel::link_high_packet_corruption,
                                           os.str(), "tc_snapshot"));
            } else {
                os << i.name << " rate-limited to " << i.qdisc.rate_kbps << " kbps";
                flags.push_back(label_flag(name,
                                           faces_hosts(t, i)
                                               ? FaultLabel::incast_traffic_network_limitation
                                               : FaultLabel::link_bandwidth_throttling,
                                           os.str(), "tc_snapshot"));
            }
        }
    }
    return flags;
}

std::vector<Flag> host_path_snapshot(const ProbeContext& ctx, const std::string& host,
                                     Ipv4 target, ToolCallLedger& ledger) {
    const Topology& t = ctx.topo;
    ledger.charge("host_path_snapshot:" + host);
    std::vector<Flag> flags;
    const Device* d = t.device(host);
    if (!d) return flags;
    if (d->crashed) {
        flags.push_back(
            label_flag(host, FaultLabel::host_crash, "device unresponsive", "host_path_snapshot"));
        return flags;
    }
    auto plan_it = t.manifest.hosts.find(host);
    if (plan_it == t.manifest.hosts.end()) return flags;
    const HostPlan& plan = plan_it->second;
    const Interface* pi = d->primary_iface();
    if (!pi || !pi->addr) {
        flags.push_back(make_flag(host,
                                  d->host.dhcp_managed ? FaultFamily::dhcp : FaultFamily::host_ip,
                                  d->host.dhcp_managed ? std::nullopt
                                                       : std::optional(FaultLabel::host_missing_ip),
                                  "no address on access interface", "host_path_snapshot"));
    } else {
        if (!(*pi->addr == plan.ip)) {
            bool someone_elses = false;
            for (const auto& [o, p] : t.manifest.hosts)
                if (o != host && p.ip == *pi->addr) someone_elses = true;
            flags.push_back(label_flag(host,
                                       someone_elses ? FaultLabel::host_ip_conflict
                                                     : FaultLabel::host_wrong_ip,
                                       "address " + pi->addr->str() + " differs from plan " +
                                           plan.ip.str(),
                                       "host_path_snapshot"));
        }
        if (pi->prefix_len != plan.prefix_len) {
            std::ostringstream os;
            os << "netmask /" << pi->prefix_len << " differs from plan /" << plan.prefix_len;
            flags.push_back(
                label_flag(host, FaultLabel::host_wrong_netmask, os.str(), "host_path_snapshot"));
        }
    }
    if (!d->host.gateway) {
        flags.push_back(make_flag(host,
                                  d->host.dhcp_managed ? FaultFamily::dhcp : FaultFamily::host_ip,
                                  std::nullopt, "no default gateway", "host_path_snapshot"));
    } else if (!(*d->host.gateway == plan.gateway)) {
        bool lease_sourced = d->host.dhcp_managed && d->host.lease &&
                             d->host.lease->gateway == *d->host.gateway;
        flags.push_back(make_flag(
            host, lease_sourced ? FaultFamily::dhcp : FaultFamily::host_ip,
            lease_sourced ? std::optional(FaultLabel::dhcp_spoofed_subnet)
                          : std::optional(FaultLabel::host_wrong_gateway),
            "gateway " + d->host.gateway->str() + " differs from plan " + plan.gateway.str(),
            "host_path_snapshot"));
    }
    if (d->host.gateway) {
        for (const auto& e : d->host.static_arp) {
            if (e.ip == *d->host.gateway) {
                flags.push_back(label_flag(host, FaultLabel::host_static_arp,
                                           "static arp entry pins gateway to " + e.mac,
                                           "host_path_snapshot"));
            }
        }
    }
    for (const auto& r : d->host.resolvers) {
        if (!Ipv4::parse(r)) {
            flags.push_back(label_flag(host, FaultLabel::host_incorrect_dns,
                                       "resolver entry '" + r + "' is not an address",
                                       "host_path_snapshot"));
            break;
        }
    }
    if (const RibEntry* e = ctx.rib.lookup(host, target)) {
        if (e->blackhole) {
            flags.push_back(label_flag(host, FaultLabel::host_static_blackhole,
                                       "route to " + target.str() + " blackholed",
                                       "host_path_snapshot"));
        }
    }
    return flags;
}

std::vector<Flag> dhcp_link_history(const ProbeContext& ctx, const std::string& host,
                                    ToolCallLedger& ledger) {
    const Topology& t = ctx.topo;
    std::vector<Flag> flags;
    const Device* d = t.device(host);
    if (!d || d->crashed || !d->host.dhcp_managed) return flags;
    ledger.charge("dhcp_link_history:" + host);
    int tick = ledger.current_turn;
    if (const Interface* pi = d->primary_iface()) {
        int trans = iface_carrier_transitions(t, *d, *pi, tick);
        if (trans >= kFlapTransitionThreshold) {
            std::ostringstream os;
            os << "lease renegotiated after " << trans << " carrier changes";
            flags.push_back(label_flag(host, FaultLabel::link_flap, os.str(), "dhcp_link_history"));
        }
    }
    if (!d->host.lease) {
        flags.push_back(make_flag(host, FaultFamily::dhcp, std::nullopt,
                                  "discover retries exhausted; no lease", "dhcp_link_history"));
        return flags;
    }
    auto plan_it = t.manifest.hosts.find(host);
    if (plan_it != t.manifest.hosts.end() &&
        !(d->host.lease->gateway == plan_it->second.gateway)) {
        flags.push_back(label_flag(host, FaultLabel::dhcp_spoofed_subnet,
                                   "lease gateway " + d->host.lease->gateway.str() +
                                       " differs from plan " + plan_it->second.gateway.str(),
                                   "dhcp_link_history"));
    }
    if (!dns_pod_ips(t).count(d->host.lease->dns.v)) {
        flags.push_back(label_flag(host, FaultLabel::dhcp_spoofed_dns,
                                   "lease resolver " + d->host.lease->dns.str() +
                                       " is not a known resolver",
                                   "dhcp_link_history"));
    }
    return flags;
}

SafeReachability safe_reachability(const ProbeContext& ctx, ToolCallLedger& ledger) {
    const Topology& t = ctx.topo;
    int tick = ledger.current_turn;
    SafeReachability out;
    auto hosts = t.host_names();
    size_t n = std::min<size_t>(hosts.size(), 4);
    std::map<std::string, int> unknown_by_src, rows_by_src;
    std::map<std::string, int> unknown_by_dst;
    for (size_t si = 0; si < n; ++si) {
        const std::string& s = hosts[si];
        ledger.charge("safe_reachability:" + s);
        for (size_t di = 0; di < n; ++di) {
            if (si == di) continue;
            const std::string& d = hosts[di];
            ReachabilityEntry e;
            e.source = s;
            e.destination = d;
            ++rows_by_src[s];
            ResolveOutcome res = resolve_name(ctx, s, d, tick);
            if (!res.ok) {
                e.status = "unknown";
                ++unknown_by_src[s];
                ++unknown_by_dst[d];
            } else {
                e.dest_ip = res.answer;
                PingOutcome p = ping_status(ctx, s, res.answer, tick);
                e.status = p.status;
                e.tx = 10;
                e.rx = 10 - p.loss_percent / 10;
                e.loss_percent = p.loss_percent;
            }
            out.matrix.entries.push_back(std::move(e));
        }
    }
    // Resolution failures implicate the name-resolution chain once the
    // same-phase host-local and lease sweeps came back clean.
    std::string lead_pod;
    for (const auto& h : hosts)
        if (has_role(t, h, "dns")) {
            lead_pod = h;
            break;
        }
    for (const auto& [s, cnt] : unknown_by_src) {
        if (cnt == rows_by_src[s]) {
            out.flags.push_back(make_flag(s, FaultFamily::dns, std::nullopt,
                                          "every resolution from " + s + " failing",
                                          "safe_reachability"));
        }
    }
    for (const auto& [dname, cnt] : unknown_by_dst) {
        bool src_wide = unknown_by_src.count(dname) && unknown_by_src[dname] == rows_by_src[dname];
        if (cnt >= 2 && !src_wide && !lead_pod.empty()) {
            std::ostringstream os;
            os << "name " << dname << " failing resolution from " << cnt << " vantages";
            out.flags.push_back(
                make_flag(lead_pod, FaultFamily::dns, std::nullopt, os.str(), "safe_reachability"));
        }
    }
    return out;
}

std::vector<Flag> service_snapshot(const ProbeContext& ctx, const std::string& host,
                                   ToolCallLedger& ledger) {
    const Topology& t = ctx.topo;
    std::vector<Flag> flags;
    const Device* d = t.device(host);
    if (!d || !t.manifest.roles.count(host)) return flags;
    ledger.charge("service_snapshot:" + host);
    if (d->crashed) {
        flags.push_back(
            label_flag(host, FaultLabel::host_crash, "device unresponsive", "service_snapshot"));
        return flags;
    }
    if (d->services.dns) {
        const DnsService& svc = *d->services.dns;
        if (!svc.daemon_up) {
            flags.push_back(label_flag(host, FaultLabel::dns_service_down,
                                       "resolver daemon not running", "service_snapshot"));
        } else {
            if (svc.lookup_latency_ms > kDnsLatencyThresholdMs) {
                std::ostringstream os;
                os << "lookup latency " << svc.lookup_latency_ms << " ms above "
                   << kDnsLatencyThresholdMs << " ms";
                flags.push_back(
                    label_flag(host, FaultLabel::dns_lookup_latency, os.str(), "service_snapshot"));
            }
            for (const auto& [name, ip] : svc.zone) {
                if (ip == Ipv4(0, 0, 0, 0)) {
                    flags.push_back(label_flag(host, FaultLabel::dns_record_error,
                                               "zone answers 0.0.0.0 for " + name,
                                               "service_snapshot"));
                    break;
                }
            }
        }
    }
    if (d->services.http) {
        const HttpService& svc = *d->services.http;
        std::string rt;
        if (svc.daemon_up &&
            drop_matching(*d,
                          [](const AclRule& r) {
                              return r.proto == AclRule::Proto::tcp && r.dport && *r.dport == 80;
                          },
                          &rt)) {
            flags.push_back(label_flag(host, FaultLabel::http_acl_block, rt, "service_snapshot"));
        }
        if (d->services.lb && d->services.lb->overloaded) {
            flags.push_back(label_flag(host, FaultLabel::load_balancer_overload,
                                       "request latency far above baseline; backends saturated",
                                       "service_snapshot"));
        }
    }
    if (d->services.dhcp && !d->services.dhcp->daemon_up) {
        flags.push_back(label_flag(host, FaultLabel::dhcp_service_down,
                                   "lease daemon not running", "service_snapshot"));
    }
    return flags;
}

std::vector<Flag> pressure_sweep(const ProbeContext& ctx, ToolCallLedger& ledger) {
    const Topology& t = ctx.topo;
    std::vector<Flag> flags;
    for (const auto& h : t.host_names()) {
        const Device& d = *t.device(h);
        if (d.crashed) continue;
        ledger.charge("pressure_sweep:" + h);
        if (d.res.cpu_load > kCpuThreshold) {
            std::ostringstream os;
            os << "cpu at " << int(d.res.cpu_load * 100) << "%";
            if (!d.res.stress_processes.empty())
                os << " with " << d.res.stress_processes.size() << " stress processes";
            flags.push_back(label_flag(h,
                                       plain_client(t, h)
                                           ? FaultLabel::sender_resource_contention
                                           : FaultLabel::receiver_resource_contention,
                                       os.str(), "pressure_sweep"));
        }
        if (has_role(t, h, "http") && d.res.open_sockets > kSocketSpikeThreshold) {
            std::ostringstream os;
            os << d.res.open_sockets << " open sockets against a baseline of a few dozen";
            flags.push_back(label_flag(h, FaultLabel::web_dos_attack, os.str(), "pressure_sweep"));
        }
        if (d.res.app_delay_ms > kAppDelayThresholdMs) {
            std::ostringstream os;
            os << "application injecting " << d.res.app_delay_ms << " ms per request";
            flags.push_back(
                label_flag(h, FaultLabel::sender_application_delay, os.str(), "pressure_sweep"));
        }
    }
    return flags;
}

namespace {

void dedup(std::vector<Flag>& flags) {
    std::set<std::string> seen;
    std::vector<Flag> out;
    for (auto& f : flags) {
        std::string key = f.device + "|" + f.hint_string() + "|" + f.sweep;
        if (seen.insert(key).second) out.push_back(std::move(f));
    }
    flags = std::move(out);
}

}  // namespace

DeepScanResult deep_scan(const ProbeContext& ctx, ToolCallLedger& ledger, int turn_cap) {
    const Topology& t = ctx.topo;
    DeepScanResult out;

    auto finish_phase = [&](PhaseReport&& rep) {
        for (auto& f : rep.flags) f.phase = rep.phase;
        out.phases.push_back(std::move(rep));
        if (!out.phases.back().clean()) {
            out.flags = out.phases.back().flags;
            return true;
        }
        return false;
    };
    auto out_of_turns = [&] {
        if (turn_cap > 0 && ledger.current_turn + 1 > turn_cap) {
            out.truncated = true;
            return true;
        }
        return false;
    };

    if (out_of_turns()) return out;
    {  // Phase A
        ++ledger.current_turn;
        PhaseReport rep;
        rep.phase = 'A';
        rep.sweeps_run = {"infra_sweep", "l2_snapshot"};
        auto f1 = infra_sweep(ctx, ledger);
        auto f2 = l2_snapshot(ctx, ledger);
        rep.flags.insert(rep.flags.end(), f1.begin(), f1.end());
        rep.flags.insert(rep.flags.end(), f2.begin(), f2.end());
        dedup(rep.flags);
        if (finish_phase(std::move(rep))) return out;
    }
    if (out_of_turns()) return out;
    {  // Phase B
        ++ledger.current_turn;
        PhaseReport rep;
        rep.phase = 'B';
        rep.sweeps_run = {"ospf_snapshot", "bgp_snapshot", "tc_snapshot"};
        for (auto* fn : {ospf_snapshot, bgp_snapshot, tc_snapshot}) {
            auto f = fn(ctx, ledger);
            rep.flags.insert(rep.flags.end(), f.begin(), f.end());
        }
        dedup(rep.flags);
        if (finish_phase(std::move(rep))) return out;
    }
    if (out_of_turns()) return out;
    {  // Phase C
        ++ledger.current_turn;
        PhaseReport rep;
        rep.phase = 'C';
        rep.sweeps_run = {"host_path_snapshot", "dhcp_link_history", "safe_reachability"};
        for (const auto& h : t.host_names()) {
            // Representative off-subnet target: the first planned endpoint
            // outside this host's own subnet.
            Ipv4 target = t.manifest.hosts.count(h) ? t.manifest.hosts.at(h).gateway
                                                    : Ipv4(0, 0, 0, 0);
            if (t.manifest.hosts.count(h)) {
                Prefix mine = Prefix{t.manifest.hosts.at(h).ip,
                                     t.manifest.hosts.at(h).prefix_len}
                                  .network();
                for (const auto& [o, plan] : t.manifest.hosts) {
                    if (!(Prefix{plan.ip, plan.prefix_len}.network() == mine)) {
                        target = plan.ip;
                        break;
                    }
                }
            }
            auto f = host_path_snapshot(ctx, h, target, ledger);
            rep.flags.insert(rep.flags.end(), f.begin(), f.end());
        }
        for (const auto& h : t.host_names()) {
            auto f = dhcp_link_history(ctx, h, ledger);
            rep.flags.insert(rep.flags.end(), f.begin(), f.end());
        }
        auto sr = safe_reachability(ctx, ledger);
        rep.flags.insert(rep.flags.end(), sr.flags.begin(), sr.flags.end());
        dedup(rep.flags);
        if (finish_phase(std::move(rep))) return out;
    }
    if (out_of_turns()) return out;
    {  // Phase D
        ++ledger.current_turn;
        PhaseReport rep;
        rep.phase = 'D';
        rep.sweeps_run = {"service_snapshot", "pressure_sweep"};
        for (const auto& h : t.host_names()) {
            auto f = service_snapshot(ctx, h, ledger);
            rep.flags.insert(rep.flags.end(), f.begin(), f.end());
        }
        auto f = pressure_sweep(ctx, ledger);
        rep.flags.insert(rep.flags.end(), f.begin(), f.end());
        dedup(rep.flags);
        finish_phase(std::move(rep));
    }
    return out;
}

std::vector<std::string> render_phase(const PhaseReport& report) {
    std::vector<std::string> lines;
    for (const auto& sweep : report.sweeps_run) {
        std::ostringstream os;
        os << "P" << report.phase << ": " << sweep << ": ";
        bool any = false;
        for (const auto& f : report.flags) {
            if (f.sweep != sweep) continue;
            if (any) os << ", ";
            os << "(" << f.device << ", " << f.hint_string() << ")";
            any = true;
        }
        if (!any) os << "clean";
        lines.push_back(os.str());
    }
    return lines;
}

}  // namespace netdiag
