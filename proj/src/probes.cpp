#include "netdiag/probes.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>

namespace netdiag {

namespace {

bool rule_matches(const AclRule& r, AclRule::Proto p, std::optional<int> dport,
                  std::optional<int> sport) {
    if (r.proto == AclRule::Proto::arp) return p == AclRule::Proto::arp;
    if (p == AclRule::Proto::arp) return false;
    if (r.proto != AclRule::Proto::any && r.proto != p) return false;
    if (r.dport && (!dport || *r.dport != *dport)) return false;
    if (r.sport && (!sport || *r.sport != *sport)) return false;
    return true;
}

bool acl_drops(const Device& d, const std::string& chain_name, AclRule::Proto p,
               std::optional<int> dport, std::optional<int> sport) {
    const AclChain* c = d.acl.chain(chain_name);
    if (!c) return false;
    for (const auto& r : c->rules)
        if (rule_matches(r, p, dport, sport)) return r.drop;
    return false;
}

bool blocks_arp(const Device& d) {
    for (const auto& c : d.acl.chains)
        for (const auto& r : c.rules)
            if (r.proto == AclRule::Proto::arp && r.drop) return true;
    return false;
}

// A broadcast segment seen from one port: every (device, interface) a frame
// can reach, with the survival probability of getting there.
struct SegPort {
    std::string dev;
    std::string iface;
    double delivery = 1.0;
};

std::vector<SegPort> segment_scan(const Topology& t, const std::string& dev0,
                                  const std::string& if0, int tick) {
    std::vector<SegPort> out;
    std::set<std::pair<std::string, std::string>> seen;
    std::deque<SegPort> q;
    q.push_back({dev0, if0, 1.0});
    while (!q.empty()) {
        SegPort cur = q.front();
        q.pop_front();
        if (!seen.insert({cur.dev, cur.iface}).second) continue;
        out.push_back(cur);
        const Device* d = t.device(cur.dev);
        if (!d || d->crashed) continue;
        const Interface* i = d->iface(cur.iface);
        if (!i) continue;
        if (i->bridge) {
            for (const auto& j : d->interfaces) {
                if (j.name == i->name || j.bridge != i->bridge) continue;
                if (j.admin_up && j.oper_up) q.push_back({cur.dev, j.name, cur.delivery});
            }
        }
        if (!i->admin_up || !i->oper_up) continue;
        if (const Link* l = t.link_of(cur.dev, cur.iface)) {
            if (!link_passes(*l, tick)) continue;
            const LinkEnd& peer = (l->a.device == cur.dev && l->a.iface == cur.iface) ? l->b : l->a;
            const Device* pd = t.device(peer.device);
            const Interface* pi = pd ? pd->iface(peer.iface) : nullptr;
            if (!pd || pd->crashed || !pi || !pi->admin_up || !pi->oper_up) continue;
            double del = cur.delivery * (1.0 - l->loss_percent / 100.0);
            if (i->qdisc.kind == Qdisc::Kind::corrupt)
                del *= 1.0 - i->qdisc.corrupt_percent / 100.0;  // corruption acts on egress
            q.push_back({peer.device, peer.iface, del});
        }
    }
    return out;
}

struct SegDelivery {
    bool found = false;
    std::string ip_owner;   // lexicographic ARP winner for the target address
    std::string final_dev;  // where frames actually land (switches follow the MAC)
    double delivery = 1.0;
    std::string fail;  // arp_unanswered | arp_filtered | stale_arp
};

SegDelivery deliver_in_segment(const Topology& t, const std::string& from_dev,
                               const std::string& out_iface, Ipv4 target, int tick) {
    SegDelivery r;
    auto ports = segment_scan(t, from_dev, out_iface, tick);
    std::sort(ports.begin(), ports.end(),
              [](const SegPort& x, const SegPort& y) { return x.dev < y.dev; });
    const SegPort* winner = nullptr;
    std::string winner_mac;
    for (const auto& p : ports) {
        if (p.dev == from_dev) continue;
        const Interface* i = t.device(p.dev)->iface(p.iface);
        if (i && i->addr && *i->addr == target) {
            winner = &p;
            winner_mac = i->mac;
            break;  // ports are name-sorted: first owner wins the ARP race
        }
    }
    if (!winner) {
        r.fail = "arp_unanswered";
        return r;
    }
    const Device& from = *t.device(from_dev);
    bool pinned = false;
    for (const auto& e : from.host.static_arp) {
        if (e.ip == target) {
            if (e.mac != winner_mac) {
                r.fail = "stale_arp";
                return r;
            }
            pinned = true;  // static entry: no ARP exchange needed
            break;
        }
    }
    if (!pinned && (blocks_arp(from) || blocks_arp(*t.device(winner->dev)))) {
        r.fail = "arp_filtered";
        return r;
    }
    // Frames chase the MAC; a duplicate address elsewhere on the segment
    // steals them (lexicographically first claimant, deterministically).
    const SegPort* landing = winner;
    for (const auto& p : ports) {
        const Interface* i = t.device(p.dev)->iface(p.iface);
        if (i && i->mac == winner_mac) {
            landing = &p;
            break;
        }
    }
    r.found = true;
    r.ip_owner = winner->dev;
    r.final_dev = landing->dev;
    r.delivery = landing->delivery;
    return r;
}

Ipv4 primary_ip_of(const Device& d) {
    const Interface* i = d.primary_iface();
    return (i && i->addr) ? *i->addr : Ipv4(0, 0, 0, 0);
}

}  // namespace

WalkResult path_walk(const ProbeContext& ctx, const std::string& src_dev, Ipv4 dst_ip,
                     AclRule::Proto proto, std::optional<int> dport, std::optional<int> sport,
                     int tick) {
    const Topology& t = ctx.topo;
    WalkResult r;
    r.path.push_back(src_dev);
    const Device* src = t.device(src_dev);
    if (!src || src->crashed) {
        r.reason = "host_down";
        return r;
    }
    std::string cur = src_dev;
    for (int hop = 0; hop < 32; ++hop) {
        const Device& d = *t.device(cur);
        if (d.owns_ip(dst_ip)) {
            if (cur != src_dev && acl_drops(d, "input", proto, dport, sport)) {
                r.reason = "acl_input";
                return r;
            }
            r.ok = true;
            return r;
        }
        const RibEntry* e = ctx.rib.lookup(cur, dst_ip);
        if (!e) {
            r.reason = "no_route";
            return r;
        }
        if (e->blackhole) {
            r.reason = "blackhole";
            return r;
        }
        if (acl_drops(d, cur == src_dev ? "output" : "forward", proto, dport, sport)) {
            r.reason = cur == src_dev ? "acl_output" : "acl_forward";
            return r;
        }
        Ipv4 next_ip = e->next_hop ? *e->next_hop : dst_ip;
        std::string oif;
        if (e->out_iface) {
            oif = *e->out_iface;
        } else {
            for (const auto& i : d.interfaces) {
                if (i.addr && Prefix{*i.addr, i.prefix_len}.contains(next_ip)) {
                    oif = i.name;
                    break;
                }
            }
        }
        if (oif.empty()) {
            r.reason = "no_egress";
            return r;
        }
        const Interface* oi = d.iface(oif);
        if (!oi || !iface_oper_up(t, d, *oi, tick)) {
            r.reason = "link_down";
            return r;
        }
        SegDelivery dl = deliver_in_segment(t, cur, oif, next_ip, tick);
        if (!dl.found) {
            r.reason = dl.fail;
            return r;
        }
        r.delivery *= dl.delivery;
        cur = dl.final_dev;
        r.path.push_back(cur);
        if (dl.final_dev != dl.ip_owner) {
            r.reason = "misdelivered";  // wrong NIC swallowed the frame
            return r;
        }
    }
    r.reason = "ttl_exceeded";
    return r;
}

PingOutcome ping_status(const ProbeContext& ctx, const std::string& src_dev, Ipv4 dst_ip,
                        int tick) {
    WalkResult fwd = path_walk(ctx, src_dev, dst_ip, AclRule::Proto::icmp, {}, {}, tick);
    if (!fwd.ok)
        return {fwd.reason == "misdelivered" ? "timeout" : "unreachable", 100};
    const std::string& dst_dev = fwd.path.back();
    Ipv4 src_ip = primary_ip_of(*ctx.topo.device(src_dev));
    WalkResult rev = path_walk(ctx, dst_dev, src_ip, AclRule::Proto::icmp, {}, {}, tick);
    if (!rev.ok || rev.path.back() != src_dev) return {"timeout", 100};
    double survival = fwd.delivery * rev.delivery;
    int rx = int(std::lround(10.0 * survival));
    if (rx >= 10) return {"ok", 0};
    if (rx <= 0) return {"timeout", 100};
    return {"loss", (10 - rx) * 10};
}

ResolveOutcome resolve_name(const ProbeContext& ctx, const std::string& src_dev,
                            const std::string& name, int tick) {
    const Topology& t = ctx.topo;
    ResolveOutcome out;
    const Device* src = t.device(src_dev);
    if (!src || src->crashed) {
        out.reason = "host_down";
        return out;
    }
    if (src->host.resolvers.empty()) {
        out.reason = "no_resolver_configured";
        return out;
    }
    std::string last = "no_usable_resolver";
    for (const auto& rs : src->host.resolvers) {
        auto ip = Ipv4::parse(rs);
        if (!ip) {
            last = "malformed_resolver";
            continue;
        }
        WalkResult fwd = path_walk(ctx, src_dev, *ip, AclRule::Proto::udp, 53, {}, tick);
        if (!fwd.ok) {
            last = "resolver_unreachable";
            continue;
        }
        const Device& pod = *t.device(fwd.path.back());
        const auto& svc = pod.services.dns;
        if (!svc || !svc->daemon_up || svc->listen_port != 53 || svc->listen_ip != *ip) {
            last = "resolver_not_listening";
            continue;
        }
        WalkResult rev =
            path_walk(ctx, pod.name, primary_ip_of(*src), AclRule::Proto::udp, {}, 53, tick);
        if (!rev.ok || rev.path.back() != src_dev) {
            last = "resolver_reply_lost";
            continue;
        }
        out.pod = pod.name;
        auto it = svc->zone.find(name);
        if (it == svc->zone.end()) {
            out.reason = "nxdomain";  // authoritative answer: no failover
            return out;
        }
        if (it->second == Ipv4(0, 0, 0, 0)) {
            out.reason = "null_record";
            return out;
        }
        out.ok = true;
        out.answer = it->second;
        return out;
    }
    out.reason = last;
    return out;
}

int ReachabilityMatrix::ok_count() const {
    int n = 0;
    for (const auto& e : entries)
        if (e.status == "ok") ++n;
    return n;
}

int ReachabilityMatrix::failing_count() const {
    int n = 0;
    for (const auto& e : entries)
        if (e.status != "ok" && e.status != "unknown") ++n;
    return n;
}

int ReachabilityMatrix::unknown_count() const {
    int n = 0;
    for (const auto& e : entries)
        if (e.status == "unknown") ++n;
    return n;
}

ReachabilityMatrix get_reachability(const ProbeContext& ctx, ToolCallLedger& ledger) {
    ledger.charge("get_reachability");
    const Topology& t = ctx.topo;
    int tick = ledger.current_turn;
    ReachabilityMatrix m;
    auto hosts = t.host_names();
    for (const auto& s : hosts) {
        for (const auto& d : hosts) {
            if (s == d) continue;
            ReachabilityEntry e;
            e.source = s;
            e.destination = d;
            ResolveOutcome res = resolve_name(ctx, s, d, tick);
            if (!res.ok) {
                e.status = "unknown";
                auto it = t.manifest.hosts.find(d);
                if (it != t.manifest.hosts.end()) e.dest_ip = it->second.ip;
                m.entries.push_back(std::move(e));
                continue;
            }
            e.dest_ip = res.answer;
            PingOutcome p = ping_status(ctx, s, res.answer, tick);
            e.status = p.status;
            e.tx = 10;
            e.rx = 10 - p.loss_percent / 10;
            e.loss_percent = p.loss_percent;
            m.entries.push_back(std::move(e));
        }
    }
    return m;
}

ReachabilityEntry ping_direct_ip(const ProbeContext& ctx, ToolCallLedger& ledger,
                                 const std::string& src, Ipv4 dst_ip) {
    ledger.charge("ping_direct_ip:" + src + ">" + dst_ip.str());
    ReachabilityEntry e;
    e.source = src;
    e.destination = dst_ip.str();
    e.dest_ip = dst_ip;
    PingOutcome p = ping_status(ctx, src, dst_ip, ledger.current_turn);
    e.status = p.status;
    e.tx = 10;
    e.rx = 10 - p.loss_percent / 10;
    e.loss_percent = p.loss_percent;
    return e;
}

const char* to_string(ProbeKind k) {
    switch (k) {
        case ProbeKind::list_ruleset: return "list_ruleset";
        case ProbeKind::iface_addr: return "iface_addr";
        case ProbeKind::route_table: return "route_table";
        case ProbeKind::route_get: return "route_get";
        case ProbeKind::arp_table: return "arp_table";
        case ProbeKind::resolver_config: return "resolver_config";
        case ProbeKind::ospf_neighbors: return "ospf_neighbors";
        case ProbeKind::ospf_config: return "ospf_config";
        case ProbeKind::bgp_summary: return "bgp_summary";
        case ProbeKind::bgp_config: return "bgp_config";
        case ProbeKind::qdisc_state: return "qdisc_state";
        case ProbeKind::process_list: return "process_list";
        case ProbeKind::socket_list: return "socket_list";
        case ProbeKind::dhcp_link_log: return "dhcp_link_log";
        case ProbeKind::dns_lookup: return "dns_lookup";
        case ProbeKind::http_timing: return "http_timing";
        case ProbeKind::resource_stats: return "resource_stats";
    }
    return "?";
}

namespace {

ProbeResult view_ruleset(const Device& d) {
    RulesetView v;
    v.chains = d.acl.chains;
    v.frag_drop = d.acl.frag_drop;
    return v;
}

ProbeResult view_ifaces(const Topology& t, const Device& d, int tick) {
    IfaceView v;
    for (const auto& i : d.interfaces) {
        IfaceEntry e;
        e.name = i.name;
        e.mac = i.mac;
        e.addr = i.addr;
        e.prefix_len = i.prefix_len;
        e.admin_up = i.admin_up;
        e.oper_up = iface_oper_up(t, d, i, tick);
        e.carrier = iface_carrier(t, d, i);
        e.carrier_transitions = iface_carrier_transitions(t, d, i, tick);
        e.qdisc = i.qdisc;
        e.bridge = i.bridge;
        v.interfaces.push_back(std::move(e));
    }
    return v;
}

ProbeResult view_routes(const ProbeContext& ctx, const Device& d) {
    RouteTableView v;
    auto it = ctx.rib.by_device.find(d.name);
    if (it != ctx.rib.by_device.end()) {
        for (const auto& e : it->second)
            v.routes.push_back({e.prefix, to_string(e.origin), e.next_hop, e.blackhole});
    }
    return v;
}

ProbeResult view_route_get(const ProbeContext& ctx, const Device& d, const std::string& param) {
    RouteGetView v;
    auto ip = Ipv4::parse(param);
    if (!ip) return v;
    if (const RibEntry* e = ctx.rib.lookup(d.name, *ip)) {
        v.has_route = true;
        v.prefix = e->prefix;
        v.next_hop = e->next_hop;
        v.blackhole = e->blackhole;
    }
    return v;
}

ProbeResult view_arp(const Topology& t, const Device& d, int tick) {
    ArpTableView v;
    std::set<uint32_t> have;
    bool self_filtered = blocks_arp(d);
    for (const auto& i : d.interfaces) {
        if (!i.addr || !iface_oper_up(t, d, i, tick)) continue;
        if (self_filtered) continue;  // a host that filters ARP learns nothing
        for (const auto& p : segment_scan(t, d.name, i.name, tick)) {
            if (p.dev == d.name) continue;
            const Interface* pi = t.device(p.dev)->iface(p.iface);
            if (!pi || !pi->addr) continue;
            if (blocks_arp(*t.device(p.dev))) continue;  // they never answer
            // Same dedup a kernel cache does: first (name-ordered) claimant
            // of an address is the one whose answer sticks.
            if (have.insert(pi->addr->v).second) v.entries.push_back({*pi->addr, pi->mac, false});
        }
    }
    for (const auto& e : d.host.static_arp) {
        std::erase_if(v.entries, [&](const ArpEntry& x) { return x.ip == e.ip; });
        v.entries.push_back({e.ip, e.mac, true});
    }
    std::sort(v.entries.begin(), v.entries.end(),
              [](const ArpEntry& x, const ArpEntry& y) { return x.ip.v < y.ip.v; });
    return v;
}

ProbeResult view_resolvers(const Device& d) {
    ResolverView v;
    v.resolvers = d.host.resolvers;
    v.gateway = d.host.gateway;
    v.dhcp_managed = d.host.dhcp_managed;
    if (d.host.lease) {
        v.lease_dns = d.host.lease->dns;
        v.lease_gateway = d.host.lease->gateway;
    }
    return v;
}

ProbeResult view_ospf_neighbors(const Topology& t, const Device& d) {
    OspfNeighborsView v;
    v.daemon_up = d.routing.ospf && d.routing.ospf->daemon_up;
    for (const auto& adj : ospf_adjacencies(t)) {
        if (adj.dev_a == d.name)
            v.neighbors.push_back({adj.dev_b, adj.iface_a, adj.area, "Full"});
        else if (adj.dev_b == d.name)
            v.neighbors.push_back({adj.dev_a, adj.iface_b, adj.area, "Full"});
    }
    std::sort(v.neighbors.begin(), v.neighbors.end(),
              [](const OspfNeighborEntry& x, const OspfNeighborEntry& y) {
                  return x.neighbor < y.neighbor;
              });
    return v;
}

ProbeResult view_ospf_config(const Device& d) {
    OspfConfigView v;
    if (d.routing.ospf) {
        v.configured = true;
        v.daemon_up = d.routing.ospf->daemon_up;
        v.areas = d.routing.ospf->areas;
        v.advertised = d.routing.ospf->advertised;
    }
    return v;
}

ProbeResult view_bgp_summary(const Topology& t, const Device& d) {
    BgpSummaryView v;
    v.daemon_up = d.routing.bgp && d.routing.bgp->daemon_up;
    for (const auto& s : bgp_sessions(t)) {
        if (s.dev_a == d.name)
            v.sessions.push_back({s.addr_b, s.dev_b, 0, s.established, s.down_reason});
        else if (s.dev_b == d.name)
            v.sessions.push_back({s.addr_a, s.dev_a, 0, s.established, s.down_reason});
    }
    if (d.routing.bgp) {
        for (auto& e : v.sessions)
            for (const auto& n : d.routing.bgp->neighbors)
                if (n.peer_ip == e.peer_ip) e.remote_asn = n.remote_asn;
    }
    std::sort(v.sessions.begin(), v.sessions.end(),
              [](const BgpSessionEntry& x, const BgpSessionEntry& y) {
                  return x.peer_device < y.peer_device;
              });
    return v;
}

ProbeResult view_bgp_config(const Device& d) {
    BgpConfigView v;
    if (d.routing.bgp) {
        v.configured = true;
        v.daemon_up = d.routing.bgp->daemon_up;
        v.local_asn = d.routing.bgp->local_asn;
        v.neighbors = d.routing.bgp->neighbors;
        v.advertised = d.routing.bgp->advertised;
    }
    return v;
}

ProbeResult view_qdisc(const Device& d) {
    QdiscView v;
    for (const auto& i : d.interfaces) v.entries.push_back({i.name, i.qdisc});
    return v;
}

ProbeResult view_processes(const Device& d) {
    ProcessListView v;
    v.processes.push_back({1, "init"});
    v.processes.push_back({7, "sshd"});
    bool ospf_up = d.routing.ospf && d.routing.ospf->daemon_up;
    bool bgp_up = d.routing.bgp && d.routing.bgp->daemon_up;
    if (ospf_up || bgp_up) {
        v.processes.push_back({15, "watchfrr"});
        v.processes.push_back({17, "zebra"});
    }
    if (ospf_up) v.processes.push_back({19, "ospfd"});
    if (bgp_up) v.processes.push_back({21, "bgpd"});
    if (d.services.dns && d.services.dns->daemon_up) v.processes.push_back({29, "named"});
    if (d.services.http && d.services.http->daemon_up) v.processes.push_back({31, "httpd"});
    if (d.services.dhcp && d.services.dhcp->daemon_up) v.processes.push_back({37, "dhcpd"});
    if (d.services.lb) v.processes.push_back({41, "lbd"});
    int pid = 1000;
    for (const auto& s : d.res.stress_processes) v.processes.push_back({pid++, s});
    std::sort(v.processes.begin(), v.processes.end(),
              [](const ProcessEntry& x, const ProcessEntry& y) { return x.pid < y.pid; });
    return v;
}

ProbeResult view_sockets(const Device& d) {
    SocketListView v;
    Ipv4 self = primary_ip_of(d);
    if (d.services.dns && d.services.dns->daemon_up) {
        v.listeners.push_back({"udp", d.services.dns->listen_ip, d.services.dns->listen_port, "named"});
        v.listeners.push_back({"tcp", d.services.dns->listen_ip, d.services.dns->listen_port, "named"});
    }
    if (d.services.http && d.services.http->daemon_up)
        v.listeners.push_back({"tcp", self, d.services.http->port, "httpd"});
    if (d.services.dhcp && d.services.dhcp->daemon_up)
        v.listeners.push_back({"udp", self, 67, "dhcpd"});
    if (d.routing.bgp && d.routing.bgp->daemon_up)
        v.listeners.push_back({"tcp", self, 179, "bgpd"});
    std::sort(v.listeners.begin(), v.listeners.end(), [](const SocketEntry& x, const SocketEntry& y) {
        return std::tie(x.proto, x.port) < std::tie(y.proto, y.port);
    });
    v.open_count = d.res.open_sockets;
    return v;
}

ProbeResult view_dhcp_log(const Topology& t, const Device& d, int tick) {
    DhcpLinkLogView v;
    if (const Interface* i = d.primary_iface())
        v.carrier_transitions = iface_carrier_transitions(t, d, *i, tick);
    if (d.services.dhcp) {
        // On a server the same probe reads the pool configuration and daemon state.
        v.server_daemon_up = d.services.dhcp->daemon_up;
        v.served = d.services.dhcp->subnets;
        for (auto& s : v.served)
            v.events.push_back("pool " + s.prefix.str() + " gw=" + s.gateway.str() +
                               " dns=" + s.dns.str());
        if (!v.server_daemon_up) v.events.push_back("dhcpd not running");
        return v;
    }
    if (!d.host.dhcp_managed) {
        v.events.push_back("static configuration; no dhcp activity");
        return v;
    }
    if (v.carrier_transitions > 1) {
        char buf[96];
        std::snprintf(buf, sizeof buf, "carrier changed %d times; lease renegotiated",
                      v.carrier_transitions);
        v.events.push_back(buf);
    }
    if (d.host.lease) {
        const DhcpLease& l = *d.host.lease;
        v.lease_present = true;
        v.lease_gateway = l.gateway;
        v.lease_dns = l.dns;
        v.events.push_back("ACK ip=" + l.ip.str() + " gw=" + l.gateway.str() + " dns=" +
                           l.dns.str());
    } else {
        v.discover_retries = true;
        v.events.push_back("DISCOVER retries exhausted; no offer received");
    }
    return v;
}

ProbeResult view_dns_lookup(const Device& d, const std::string& name) {
    DnsLookupView v;
    const auto& svc = d.services.dns;
    if (!svc) {
        v.rcode = "refused";
        return v;
    }
    v.latency_ms = svc->lookup_latency_ms;
    if (!svc->daemon_up) {
        v.rcode = "refused";
        v.latency_ms = 0;
        return v;
    }
    if (svc->listen_port != 53 || !d.owns_ip(svc->listen_ip)) {
        v.rcode = "unreachable";  // nothing answering on the advertised address
        v.latency_ms = 0;
        return v;
    }
    if (name.empty()) {
        // Zone self-audit (axfr-style): report the first null record, if any.
        for (const auto& [rec, addr] : svc->zone) {
            if (addr == Ipv4(0, 0, 0, 0)) {
                v.rcode = "noerror";
                v.answer = addr;
                v.ok = false;
                return v;
            }
        }
        v.rcode = "noerror";
        v.ok = true;
        return v;
    }
    auto it = svc->zone.find(name);
    if (it == svc->zone.end()) {
        v.rcode = "nxdomain";
        return v;
    }
    v.rcode = "noerror";
    v.answer = it->second;  // 0.0.0.0 = poisoned record, caller's problem to spot
    v.ok = !(it->second == Ipv4(0, 0, 0, 0));
    return v;
}

ProbeResult view_http(const Device& d) {
    HttpTimingView v;
    const auto& svc = d.services.http;
    if (!svc || !svc->daemon_up) {
        v.status = "refused";
        return v;
    }
    if (acl_drops(d, "input", AclRule::Proto::tcp, svc->port, {})) {
        v.status = "timeout";
        return v;
    }
    v.status = "ok";
    v.latency_ms = 10 + d.res.app_delay_ms;
    if (d.services.lb && d.services.lb->overloaded) v.latency_ms += 2000;
    return v;
}

ProbeResult view_resources(const Device& d) {
    ResourceStatsView v;
    v.cpu_load = d.res.cpu_load;
    v.open_sockets = d.res.open_sockets;
    v.stress_processes = d.res.stress_processes;
    v.app_delay_ms = d.res.app_delay_ms;
    return v;
}

}  // namespace

ProbeResult run_probe(const ProbeContext& ctx, ToolCallLedger& ledger, const std::string& device,
                      ProbeKind kind, const std::string& param) {
    std::string call = std::string(to_string(kind)) + ":" + device;
    if (!param.empty()) call += ":" + param;
    ledger.charge(call);
    int tick = ledger.current_turn;
    const Device* d = ctx.topo.device(device);
    if (!d || d->crashed) return Unresponsive{};
    switch (kind) {
        case ProbeKind::list_ruleset: return view_ruleset(*d);
        case ProbeKind::iface_addr: return view_ifaces(ctx.topo, *d, tick);
        case ProbeKind::route_table: return view_routes(ctx, *d);
        case ProbeKind::route_get: return view_route_get(ctx, *d, param);
        case ProbeKind::arp_table: return view_arp(ctx.topo, *d, tick);
        case ProbeKind::resolver_config: return view_resolvers(*d);
        case ProbeKind::ospf_neighbors: return view_ospf_neighbors(ctx.topo, *d);
        case ProbeKind::ospf_config: return view_ospf_config(*d);
        case ProbeKind::bgp_summary: return view_bgp_summary(ctx.topo, *d);
        case ProbeKind::bgp_config: return view_bgp_config(*d);
        case ProbeKind::qdisc_state: return view_qdisc(*d);
        case ProbeKind::process_list: return view_processes(*d);
        case ProbeKind::socket_list: return view_sockets(*d);
        case ProbeKind::dhcp_link_log: return view_dhcp_log(ctx.topo, *d, tick);
        case ProbeKind::dns_lookup: return view_dns_lookup(*d, param);
        case ProbeKind::http_timing: return view_http(*d);
        case ProbeKind::resource_stats: return view_resources(*d);
    }
    return Unresponsive{};
}

}  // namespace netdiag
