#include "netdiag/converge.hpp"

#include <algorithm>

namespace netdiag {
namespace {

bool link_steady_up(const Link& l) {
    return l.state == LinkState::up || l.state == LinkState::flapping;
}

bool iface_steady_up(const Interface& i) { return i.admin_up && i.oper_up; }

// Does any input/forward/output rule drop this protocol (optionally a port)?
bool acl_drops_proto(const Device& d, AclRule::Proto proto, std::optional<int> port) {
    for (auto& c : d.acl.chains) {
        if (c.name == "arp_filter") continue;
        for (auto& r : c.rules) {
            if (!r.drop || r.proto != proto) continue;
            if (!port) return true;
            if ((r.dport && *r.dport == *port) || (r.sport && *r.sport == *port)) return true;
            if (!r.dport && !r.sport) return true;
        }
    }
    return false;
}

}  // namespace

int origin_rank(RouteOrigin o) {
    switch (o) {
        case RouteOrigin::connected: return 0;
        case RouteOrigin::static_route: return 1;
        case RouteOrigin::ospf: return 2;
        default: return 3;
    }
}

const char* to_string(RouteOrigin o) {
    switch (o) {
        case RouteOrigin::connected: return "connected";
        case RouteOrigin::static_route: return "static";
        case RouteOrigin::ospf: return "ospf";
        default: return "bgp";
    }
}

const RibEntry* Rib::lookup(const std::string& device, Ipv4 dst) const {
    auto it = by_device.find(device);
    if (it == by_device.end()) return nullptr;
    const RibEntry* best = nullptr;
    for (auto& e : it->second) {
        if (!e.prefix.contains(dst)) continue;
        if (!best || e.prefix.len > best->prefix.len ||
            (e.prefix.len == best->prefix.len && origin_rank(e.origin) < origin_rank(best->origin)))
            best = &e;
    }
    return best;
}

std::vector<OspfAdjacency> ospf_adjacencies(const Topology& t) {
    std::vector<OspfAdjacency> out;
    for (auto& l : t.links) {
        if (!link_steady_up(l)) continue;
        const Device* da = t.device(l.a.device);
        const Device* db = t.device(l.b.device);
        if (!da || !db || da->crashed || db->crashed) continue;
        if (!da->routing.ospf || !db->routing.ospf) continue;
        if (!da->routing.ospf->daemon_up || !db->routing.ospf->daemon_up) continue;
        const Interface* ia = da->iface(l.a.iface);
        const Interface* ib = db->iface(l.b.iface);
        if (!ia || !ib || !iface_steady_up(*ia) || !iface_steady_up(*ib)) continue;
        auto aa = da->routing.ospf->areas.find(ia->name);
        auto ab = db->routing.ospf->areas.find(ib->name);
        if (aa == da->routing.ospf->areas.end() || ab == db->routing.ospf->areas.end()) continue;
        if (aa->second != ab->second) continue;
        if (acl_drops_proto(*da, AclRule::Proto::ospf, std::nullopt) ||
            acl_drops_proto(*db, AclRule::Proto::ospf, std::nullopt))
            continue;
        out.push_back(OspfAdjacency{da->name, ia->name, db->name, ib->name, aa->second});
    }
    return out;
}

std::vector<BgpSession> bgp_sessions(const Topology& t) {
    std::vector<BgpSession> out;
    for (auto& l : t.links) {
        const Device* da = t.device(l.a.device);
        const Device* db = t.device(l.b.device);
        if (!da || !db || !da->routing.bgp || !db->routing.bgp) continue;
        const Interface* ia = da->iface(l.a.iface);
        const Interface* ib = db->iface(l.b.iface);
        if (!ia || !ib || !ia->addr || !ib->addr) continue;

        // A session attempt exists when either side lists the other's address.
        const BgpNeighbor* na = nullptr;
        for (auto& n : da->routing.bgp->neighbors)
            if (n.peer_ip == *ib->addr) na = &n;
        const BgpNeighbor* nb = nullptr;
        for (auto& n : db->routing.bgp->neighbors)
            if (n.peer_ip == *ia->addr) nb = &n;
        if (!na && !nb) continue;

        BgpSession s;
        s.dev_a = da->name;
        s.dev_b = db->name;
        s.addr_a = *ia->addr;
        s.addr_b = *ib->addr;
        if (!na || !nb)
            s.down_reason = "peer not configured";
        else if (!da->routing.bgp->daemon_up || !db->routing.bgp->daemon_up)
            s.down_reason = "daemon down";
        else if (na->remote_asn != db->routing.bgp->local_asn ||
                 nb->remote_asn != da->routing.bgp->local_asn)
            s.down_reason = "asn mismatch";
        else if (!link_steady_up(l) || !iface_steady_up(*ia) || !iface_steady_up(*ib))
            s.down_reason = "link down";
        else if (acl_drops_proto(*da, AclRule::Proto::tcp, 179) ||
                 acl_drops_proto(*db, AclRule::Proto::tcp, 179))
            s.down_reason = "tcp/179 filtered";
        else
            s.established = true;
        out.push_back(std::move(s));
    }
    return out;
}

Rib converge(const Topology& t) {
    Rib rib;

    // Connected and static routes.
    for (auto& [name, d] : t.devices) {
        auto& entries = rib.by_device[name];
        for (auto& i : d.interfaces) {
            if (!i.addr || i.prefix_len == 0) continue;
            entries.push_back(RibEntry{Prefix{*i.addr, i.prefix_len}.network(),
                                       RouteOrigin::connected, std::nullopt, i.name, false});
        }
        for (auto& s : d.routing.statics)
            entries.push_back(
                RibEntry{s.prefix.network(), RouteOrigin::static_route, s.next_hop, std::nullopt,
                         s.blackhole});
        // Host default route; dropped when the gateway is outside every
        // connected prefix (the kernel would refuse to install it).
        if (d.kind == DeviceKind::host && d.host.gateway) {
            for (auto& i : d.interfaces) {
                if (!i.addr || i.prefix_len == 0) continue;
                if (Prefix{*i.addr, i.prefix_len}.contains(*d.host.gateway)) {
                    entries.push_back(RibEntry{Prefix{Ipv4(0), 0}, RouteOrigin::static_route,
                                               d.host.gateway, i.name, false});
                    break;
                }
            }
        }
    }

    // OSPF: hop-count shortest path from each advertiser over the adjacency
    // graph; ties break toward the lexicographically first neighbor.
    auto adjacency = ospf_adjacencies(t);
    std::map<std::string, std::vector<std::pair<std::string, std::string>>> nbr;  // dev -> (peer, local iface)
    for (auto& a : adjacency) {
        nbr[a.dev_a].emplace_back(a.dev_b, a.iface_a);
        nbr[a.dev_b].emplace_back(a.dev_a, a.iface_b);
    }
    for (auto& [dev, list] : nbr) std::sort(list.begin(), list.end());

    std::vector<std::pair<std::string, Prefix>> ospf_adverts;
    for (auto& [name, d] : t.devices)
        if (d.routing.ospf && d.routing.ospf->daemon_up)
            for (auto& p : d.routing.ospf->advertised) ospf_adverts.emplace_back(name, p);

    for (auto& [origin_dev, prefix] : ospf_adverts) {
        // BFS distances from the advertiser.
        std::map<std::string, int> dist;
        dist[origin_dev] = 0;
        std::vector<std::string> queue = {origin_dev};
        for (size_t qi = 0; qi < queue.size(); ++qi) {
            auto cur = queue[qi];
            for (auto& [peer, iface] : nbr[cur]) {
                if (dist.count(peer)) continue;
                dist[peer] = dist[cur] + 1;
                queue.push_back(peer);
            }
        }
        for (auto& [dev, dd] : dist) {
            if (dev == origin_dev) continue;
            // Next hop: adjacent neighbor closer to the advertiser, first by name.
            for (auto& [peer, iface] : nbr[dev]) {
                auto it = dist.find(peer);
                if (it == dist.end() || it->second != dd - 1) continue;
                // Address of the peer on the shared link.
                const Device* pd = t.device(peer);
                const Link* l = nullptr;
                for (auto& cand : t.links)
                    if (((cand.a.device == dev && cand.a.iface == iface) ||
                         (cand.b.device == dev && cand.b.iface == iface)))
                        l = &cand;
                if (!l || !pd) continue;
                const auto& peer_end = l->a.device == peer ? l->a : l->b;
                const Interface* pi = pd->iface(peer_end.iface);
                if (!pi || !pi->addr) continue;
                rib.by_device[dev].push_back(RibEntry{prefix.network(), RouteOrigin::ospf,
                                                      *pi->addr, iface, false});
                break;
            }
        }
    }

    // BGP: path-vector propagation over established sessions to a fixpoint.
    auto sessions = bgp_sessions(t);
    struct Peering {
        std::string peer;
        Ipv4 peer_addr;
    };
    std::map<std::string, std::vector<Peering>> peers;
    for (auto& s : sessions) {
        if (!s.established) continue;
        peers[s.dev_a].push_back(Peering{s.dev_b, s.addr_b});
        peers[s.dev_b].push_back(Peering{s.dev_a, s.addr_a});
    }
    for (auto& [dev, list] : peers)
        std::sort(list.begin(), list.end(),
                  [](const Peering& x, const Peering& y) { return x.peer < y.peer; });

    struct BgpRoute {
        std::vector<uint32_t> as_path;  // path as seen by the holder
        std::string learned_from;       // empty at the origin
        Ipv4 next_hop;
    };
    std::map<std::string, std::map<Prefix, BgpRoute>> table;
    for (auto& [name, d] : t.devices)
        if (d.routing.bgp && d.routing.bgp->daemon_up)
            for (auto& p : d.routing.bgp->advertised)
                table[name][p.network()] = BgpRoute{{}, "", Ipv4(0)};

    auto better = [](const BgpRoute& a, const BgpRoute& b) {
        if (a.as_path.size() != b.as_path.size()) return a.as_path.size() < b.as_path.size();
        if (a.as_path != b.as_path) return a.as_path < b.as_path;
        return a.learned_from < b.learned_from;
    };

    bool changed = true;
    while (changed) {
        changed = false;
        for (auto& [dev, routes] : table) {
            const Device* dd = t.device(dev);
            uint32_t my_asn = dd->routing.bgp->local_asn;
            for (auto& [prefix, route] : routes) {
                for (auto& p : peers[dev]) {
                    const Device* pd = t.device(p.peer);
                    uint32_t peer_asn = pd->routing.bgp->local_asn;
                    // Advertise to the peer with our ASN prepended.
                    std::vector<uint32_t> path = {my_asn};
                    path.insert(path.end(), route.as_path.begin(), route.as_path.end());
                    if (std::find(path.begin(), path.end(), peer_asn) != path.end()) continue;
                    // Our own address on the peering: find the session record.
                    Ipv4 my_addr(0);
                    for (auto& s : sessions) {
                        if (!s.established) continue;
                        if (s.dev_a == dev && s.dev_b == p.peer) my_addr = s.addr_a;
                        if (s.dev_b == dev && s.dev_a == p.peer) my_addr = s.addr_b;
                    }
                    BgpRoute cand{path, dev, my_addr};
                    auto& peer_routes = table[p.peer];
                    auto it = peer_routes.find(prefix);
                    if (it == peer_routes.end()) {
                        peer_routes[prefix] = cand;
                        changed = true;
                    } else if (!it->second.learned_from.empty() && better(cand, it->second)) {
                        // never displace a locally-originated route
                        if (cand.as_path != it->second.as_path ||
                            cand.learned_from != it->second.learned_from) {
                            it->second = cand;
                            changed = true;
                        }
                    }
                }
            }
        }
    }

    for (auto& [dev, routes] : table) {
        for (auto& [prefix, route] : routes) {
            if (route.learned_from.empty()) continue;  // locally originated
            // Out interface: the one whose subnet covers the next hop.
            const Device* dd = t.device(dev);
            std::optional<std::string> oif;
            for (auto& i : dd->interfaces)
                if (i.addr && Prefix{*i.addr, i.prefix_len}.contains(route.next_hop)) oif = i.name;
            rib.by_device[dev].push_back(
                RibEntry{prefix, RouteOrigin::bgp, route.next_hop, oif, false});
        }
    }

    for (auto& [dev, entries] : rib.by_device)
        std::sort(entries.begin(), entries.end(), [](const RibEntry& a, const RibEntry& b) {
            if (a.prefix.len != b.prefix.len) return a.prefix.len > b.prefix.len;
            if (!(a.prefix == b.prefix)) return a.prefix < b.prefix;
            return origin_rank(a.origin) < origin_rank(b.origin);
        });
    return rib;
}

}  // namespace netdiag
