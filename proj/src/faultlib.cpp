#include "netdiag/faultlib.hpp"

#include <algorithm>
#include <set>

#include "netdiag/thresholds.hpp"

namespace netdiag {

namespace {

const Ipv4 kBogusDns(10, 99, 99, 99);
const char* kBogusMac = "02:de:ad:be:ef:99";

bool has_role(const Topology& t, const std::string& dev, const std::string& role) {
    auto it = t.manifest.roles.find(dev);
    if (it == t.manifest.roles.end()) return false;
    return std::find(it->second.begin(), it->second.end(), role) != it->second.end();
}

bool is_plain_client(const Topology& t, const std::string& dev) {
    const Device* d = t.device(dev);
    return d && d->kind == DeviceKind::host && !t.manifest.roles.count(dev);
}

std::vector<std::string> plain_clients(const Topology& t) {
    std::vector<std::string> out;
    for (const auto& h : t.host_names())
        if (is_plain_client(t, h)) out.push_back(h);
    return out;
}

std::vector<std::string> role_hosts(const Topology& t, const std::string& role) {
    std::vector<std::string> out;
    for (const auto& h : t.host_names())
        if (has_role(t, h, role)) out.push_back(h);
    return out;
}

std::vector<std::string> routers_where(const Topology& t,
                                       bool (*pred)(const Device&)) {
    std::vector<std::string> out;
    for (const auto& [name, d] : t.devices)
        if (d.kind == DeviceKind::router && pred(d)) out.push_back(name);
    return out;
}

bool any_router(const Device&) { return true; }
bool has_bgp(const Device& d) { return bool(d.routing.bgp); }
bool has_ospf(const Device& d) { return bool(d.routing.ospf); }
bool has_frr(const Device& d) { return d.routing.bgp || d.routing.ospf; }
bool advertises_bgp(const Device& d) { return d.routing.bgp && !d.routing.bgp->advertised.empty(); }

std::vector<std::string> router_router_links(const Topology& t) {
    std::vector<std::string> out;
    for (const auto& l : t.links) {
        const Device* a = t.device(l.a.device);
        const Device* b = t.device(l.b.device);
        if (a && b && a->kind == DeviceKind::router && b->kind == DeviceKind::router)
            out.push_back(l.id);
    }
    return out;
}

std::vector<std::string> gateway_routers(const Topology& t) {
    std::set<std::string> s;
    for (const auto& [host, gw] : t.manifest.gateway_router) s.insert(gw);
    return {s.begin(), s.end()};
}

Prefix plan_subnet(const Topology& t, const std::string& host) {
    const HostPlan& p = t.manifest.hosts.at(host);
    return Prefix{p.ip, p.prefix_len}.network();
}

// Lexicographically first other endpoint sharing the target's subnet.
std::optional<std::string> subnet_sibling(const Topology& t, const std::string& host) {
    if (!t.manifest.hosts.count(host)) return std::nullopt;
    Prefix mine = plan_subnet(t, host);
    for (const auto& [name, plan] : t.manifest.hosts) {
        if (name == host) continue;
        if (Prefix{plan.ip, plan.prefix_len}.network() == mine) return name;
    }
    return std::nullopt;
}

// The router-side interface serving a host subnet (where incast pressure bites).
std::string host_facing_iface(const Topology& t, const Device& router) {
    for (const auto& i : router.interfaces) {
        if (!i.addr) continue;
        for (const auto& [host, plan] : t.manifest.hosts)
            if (plan.gateway == *i.addr) return i.name;
    }
    return "";
}

void add_rule(Device& d, const std::string& chain, AclRule r) {
    AclChain* c = d.acl.chain(chain);
    if (!c) {
        d.acl.chains.push_back({chain, {}});
        c = &d.acl.chains.back();
    }
    c->rules.push_back(r);
}

AclRule rule(AclRule::Proto p, std::optional<int> dport = {}, std::optional<int> sport = {}) {
    AclRule r;
    r.proto = p;
    r.dport = dport;
    r.sport = sport;
    r.drop = true;
    return r;
}

// First p2p interface (by name) this router runs the protocol on.
std::string first_p2p_area_iface(const Device& d) {
    if (!d.routing.ospf) return "";
    for (const auto& [iface, area] : d.routing.ospf->areas) {
        const Interface* i = d.iface(iface);
        if (i && i->prefix_len == 30) return iface;
    }
    return "";
}

// Other advertised /24 holders, for hijack/leak victims.
std::optional<std::string> first_other_advertiser(const Topology& t, const std::string& self) {
    for (const auto& [name, d] : t.devices) {
        if (name == self) continue;
        if (d.routing.bgp && !d.routing.bgp->advertised.empty()) return name;
    }
    return std::nullopt;
}

std::vector<std::string> dhcp_clients_in(const Topology& t, const Prefix& subnet) {
    std::vector<std::string> out;
    for (const auto& h : t.host_names()) {
        const Device& d = *t.device(h);
        if (!d.host.dhcp_managed || !d.host.lease) continue;
        if (d.host.lease->subnet.network() == subnet.network()) out.push_back(h);
    }
    return out;
}

void strip_lease(Device& d) {
    d.host.lease.reset();
    if (Interface* i = d.primary_iface()) i->addr.reset();
    d.host.gateway.reset();
    d.host.resolvers.clear();
}

}  // namespace

std::vector<std::string> enumerate_targets(const Topology& t, FaultLabel label) {
    switch (label) {
        case FaultLabel::link_detach:
        case FaultLabel::link_down:
        case FaultLabel::link_flap:
        case FaultLabel::link_bandwidth_throttling:
        case FaultLabel::link_high_packet_corruption:
            return router_router_links(t);

        case FaultLabel::incast_traffic_network_limitation: {
            std::vector<std::string> out;
            for (const auto& g : gateway_routers(t))
                if (!host_facing_iface(t, *t.device(g)).empty()) out.push_back(g);
            return out;
        }

        case FaultLabel::mac_address_conflict:
        case FaultLabel::host_ip_conflict: {
            std::vector<std::string> out;
            for (const auto& h : plain_clients(t))
                if (subnet_sibling(t, h)) out.push_back(h);
            return out;
        }

        case FaultLabel::host_wrong_ip:
        case FaultLabel::host_wrong_gateway:
        case FaultLabel::host_wrong_netmask:
        case FaultLabel::host_missing_ip:
        case FaultLabel::host_incorrect_dns:
        case FaultLabel::host_static_arp:
        case FaultLabel::arp_acl_block:
        case FaultLabel::sender_resource_contention:
        case FaultLabel::sender_application_delay:
        case FaultLabel::host_crash:
            return plain_clients(t);

        case FaultLabel::host_static_blackhole: {
            std::vector<std::string> out;
            for (const auto& h : plain_clients(t)) {
                Prefix mine = plan_subnet(t, h);
                for (const auto& [name, plan] : t.manifest.hosts) {
                    if (!(Prefix{plan.ip, plan.prefix_len}.network() == mine)) {
                        out.push_back(h);
                        break;
                    }
                }
            }
            return out;
        }

        case FaultLabel::icmp_acl_block:
        case FaultLabel::link_fragmentation_disabled:
            return routers_where(t, any_router);

        case FaultLabel::http_acl_block:
        case FaultLabel::web_dos_attack:
            return role_hosts(t, "http");

        case FaultLabel::dns_port_blocked:
        case FaultLabel::dns_service_down:
        case FaultLabel::dns_record_error:
        case FaultLabel::dns_lookup_latency:
            return role_hosts(t, "dns");

        case FaultLabel::bgp_acl_block:
        case FaultLabel::bgp_asn_misconfig:
            return routers_where(t, has_bgp);

        case FaultLabel::bgp_missing_route_advertisement:
            return routers_where(t, advertises_bgp);

        case FaultLabel::bgp_hijacking:
        case FaultLabel::bgp_blackhole_route_leak: {
            std::vector<std::string> out;
            for (const auto& r : routers_where(t, has_bgp))
                if (first_other_advertiser(t, r)) out.push_back(r);
            return out;
        }

        case FaultLabel::ospf_acl_block:
        case FaultLabel::frr_service_down:
            return label == FaultLabel::frr_service_down ? routers_where(t, has_frr)
                                                         : routers_where(t, has_ospf);

        case FaultLabel::ospf_neighbor_missing:
        case FaultLabel::ospf_area_misconfiguration: {
            std::vector<std::string> out;
            for (const auto& r : routers_where(t, has_ospf))
                if (!first_p2p_area_iface(*t.device(r)).empty()) out.push_back(r);
            return out;
        }

        case FaultLabel::dhcp_service_down:
        case FaultLabel::dhcp_missing_subnet:
        case FaultLabel::dhcp_spoofed_subnet:
        case FaultLabel::dhcp_spoofed_dns: {
            std::vector<std::string> out;
            for (const auto& h : role_hosts(t, "dhcp")) {
                const auto& svc = t.device(h)->services.dhcp;
                if (svc && !svc->subnets.empty()) out.push_back(h);
            }
            return out;
        }

        case FaultLabel::load_balancer_overload:
            return role_hosts(t, "lb");

        case FaultLabel::receiver_resource_contention: {
            std::vector<std::string> out;
            for (const auto& h : t.host_names())
                if (t.manifest.roles.count(h)) out.push_back(h);
            return out;
        }
    }
    return {};
}

InjectionResult inject(const Topology& t, FaultLabel label, const std::string& target,
                       uint64_t seed) {
    (void)seed;  // mutations are canonical; the seed only varies the topology
    auto targets = enumerate_targets(t, label);
    if (std::find(targets.begin(), targets.end(), target) == targets.end())
        throw FaultError(to_string(label) + " not injectable on '" + target + "'");

    InjectionResult out{t, {}};
    Topology& m = out.topo;
    out.truth.is_anomaly = true;
    out.truth.labels = {to_string(label)};
    out.truth.devices = {target};

    auto link_endpoints = [&](const std::string& id) {
        Link* l = m.link_by_id(id);
        std::vector<std::string> devs = {l->a.device, l->b.device};
        std::sort(devs.begin(), devs.end());
        return devs;
    };

    switch (label) {
        case FaultLabel::link_detach:
            m.link_by_id(target)->state = LinkState::detached;
            out.truth.devices = link_endpoints(target);
            break;
        case FaultLabel::link_down:
            m.link_by_id(target)->state = LinkState::down;
            out.truth.devices = link_endpoints(target);
            break;
        case FaultLabel::link_flap:
            m.link_by_id(target)->state = LinkState::flapping;
            out.truth.devices = link_endpoints(target);
            break;

        case FaultLabel::mac_address_conflict: {
            const std::string sib = *subnet_sibling(m, target);
            m.device(target)->primary_iface()->mac = m.device(sib)->primary_iface()->mac;
            break;
        }
        case FaultLabel::host_ip_conflict: {
            const std::string sib = *subnet_sibling(m, target);
            m.device(target)->primary_iface()->addr = m.manifest.hosts.at(sib).ip;
            break;
        }
        case FaultLabel::host_wrong_ip:
            m.device(target)->primary_iface()->addr =
                Ipv4{m.manifest.hosts.at(target).ip.v + 100};
            break;
        case FaultLabel::host_wrong_gateway: {
            Prefix net = plan_subnet(m, target);
            m.device(target)->host.gateway = Ipv4{net.addr.v + 254};
            break;
        }
        case FaultLabel::host_wrong_netmask:
            m.device(target)->primary_iface()->prefix_len = 30;
            break;
        case FaultLabel::host_missing_ip:
            m.device(target)->primary_iface()->addr.reset();
            break;
        case FaultLabel::host_incorrect_dns:
            m.device(target)->host.resolvers = {"dns.corp.invalid"};
            break;
        case FaultLabel::host_static_arp: {
            Device& d = *m.device(target);
            d.host.static_arp.push_back({*d.host.gateway, kBogusMac, true});
            break;
        }

        case FaultLabel::arp_acl_block: {
            Device& d = *m.device(target);
            add_rule(d, "input", rule(AclRule::Proto::arp));
            add_rule(d, "output", rule(AclRule::Proto::arp));
            break;
        }
        case FaultLabel::icmp_acl_block: {
            Device& d = *m.device(target);
            for (const char* c : {"input", "forward", "output"})
                add_rule(d, c, rule(AclRule::Proto::icmp));
            break;
        }
        case FaultLabel::http_acl_block:
            add_rule(*m.device(target), "input", rule(AclRule::Proto::tcp, 80));
            break;
        case FaultLabel::dns_port_blocked: {
            Device& d = *m.device(target);
            add_rule(d, "input", rule(AclRule::Proto::udp, 53));
            add_rule(d, "input", rule(AclRule::Proto::tcp, 53));
            break;
        }
        case FaultLabel::bgp_acl_block: {
            Device& d = *m.device(target);
            for (const char* c : {"input", "forward", "output"}) {
                add_rule(d, c, rule(AclRule::Proto::tcp, 179));
                add_rule(d, c, rule(AclRule::Proto::tcp, {}, 179));
            }
            break;
        }
        case FaultLabel::ospf_acl_block: {
            Device& d = *m.device(target);
            add_rule(d, "input", rule(AclRule::Proto::ospf));
            add_rule(d, "output", rule(AclRule::Proto::ospf));
            break;
        }
        case FaultLabel::link_fragmentation_disabled:
            m.device(target)->acl.frag_drop = true;
            break;

        case FaultLabel::link_bandwidth_throttling: {
            Link* l = m.link_by_id(target);
            Interface* i = m.device(l->a.device)->iface(l->a.iface);
            i->qdisc = {Qdisc::Kind::rate_limit, kThrottleRateKbps, 0};
            out.truth.devices = {l->a.device};
            break;
        }
        case FaultLabel::link_high_packet_corruption: {
            Link* l = m.link_by_id(target);
            Interface* i = m.device(l->a.device)->iface(l->a.iface);
            i->qdisc = {Qdisc::Kind::corrupt, 0, kCorruptPercent};
            out.truth.devices = {l->a.device};
            break;
        }
        case FaultLabel::incast_traffic_network_limitation: {
            Device& d = *m.device(target);
            Interface* i = d.iface(host_facing_iface(m, d));
            i->qdisc = {Qdisc::Kind::rate_limit, kIncastRateKbps, 0};
            break;
        }

        case FaultLabel::ospf_neighbor_missing: {
            OspfConfig& o = *m.device(target)->routing.ospf;
            o.areas.erase(first_p2p_area_iface(*m.device(target)));
            break;
        }
        case FaultLabel::frr_service_down: {
            Device& d = *m.device(target);
            if (d.routing.ospf) d.routing.ospf->daemon_up = false;
            if (d.routing.bgp) d.routing.bgp->daemon_up = false;
            break;
        }
        case FaultLabel::ospf_area_misconfiguration: {
            Device& d = *m.device(target);
            d.routing.ospf->areas[first_p2p_area_iface(d)] = 99;
            break;
        }

        case FaultLabel::bgp_asn_misconfig:
            m.device(target)->routing.bgp->local_asn += 10000;
            break;
        case FaultLabel::bgp_missing_route_advertisement:
            m.device(target)->routing.bgp->advertised.clear();
            break;
        case FaultLabel::bgp_hijacking: {
            const std::string victim = *first_other_advertiser(m, target);
            Prefix p = m.device(victim)->routing.bgp->advertised.front();
            m.device(target)->routing.bgp->advertised.push_back(Prefix{p.addr, 25}.network());
            break;
        }
        case FaultLabel::bgp_blackhole_route_leak: {
            const std::string victim = *first_other_advertiser(m, target);
            Prefix p = m.device(victim)->routing.bgp->advertised.front();
            Prefix leak = Prefix{p.addr, 25}.network();
            Device& d = *m.device(target);
            d.routing.bgp->advertised.push_back(leak);
            d.routing.statics.push_back({leak, std::nullopt, true});
            break;
        }
        case FaultLabel::host_static_blackhole: {
            Device& d = *m.device(target);
            Prefix mine = plan_subnet(m, target);
            for (const auto& [name, plan] : m.manifest.hosts) {
                Prefix net = Prefix{plan.ip, plan.prefix_len}.network();
                if (!(net == mine)) {
                    d.routing.statics.push_back({net, std::nullopt, true});
                    break;
                }
            }
            break;
        }

        case FaultLabel::dhcp_service_down: {
            Device& d = *m.device(target);
            d.services.dhcp->daemon_up = false;
            for (const auto& sub : d.services.dhcp->subnets)
                for (const auto& c : dhcp_clients_in(m, sub.prefix)) strip_lease(*m.device(c));
            break;
        }
        case FaultLabel::dhcp_missing_subnet: {
            Device& d = *m.device(target);
            DhcpSubnet gone = d.services.dhcp->subnets.front();
            d.services.dhcp->subnets.erase(d.services.dhcp->subnets.begin());
            for (const auto& c : dhcp_clients_in(m, gone.prefix)) strip_lease(*m.device(c));
            break;
        }
        case FaultLabel::dhcp_spoofed_subnet: {
            Device& d = *m.device(target);
            DhcpSubnet& sub = d.services.dhcp->subnets.front();
            sub.gateway = Ipv4{sub.prefix.network().addr.v + 254};
            for (const auto& c : dhcp_clients_in(m, sub.prefix)) {
                Device& cd = *m.device(c);
                cd.host.lease->gateway = sub.gateway;
                cd.host.gateway = sub.gateway;  // renewal picked up the spoof
            }
            break;
        }
        case FaultLabel::dhcp_spoofed_dns: {
            Device& d = *m.device(target);
            DhcpSubnet& sub = d.services.dhcp->subnets.front();
            sub.dns = kBogusDns;
            for (const auto& c : dhcp_clients_in(m, sub.prefix)) {
                Device& cd = *m.device(c);
                cd.host.lease->dns = kBogusDns;
                cd.host.resolvers = {kBogusDns.str()};
            }
            break;
        }

        case FaultLabel::dns_service_down:
            m.device(target)->services.dns->daemon_up = false;
            break;
        case FaultLabel::dns_record_error: {
            DnsService& svc = *m.device(target)->services.dns;
            for (auto& [name, ip] : svc.zone) {
                if (is_plain_client(m, name)) {
                    ip = Ipv4(0, 0, 0, 0);
                    break;
                }
            }
            break;
        }
        case FaultLabel::dns_lookup_latency:
            m.device(target)->services.dns->lookup_latency_ms = kDnsLatencyInjectMs;
            break;

        case FaultLabel::load_balancer_overload:
            m.device(target)->services.lb->overloaded = true;
            break;

        case FaultLabel::sender_resource_contention: {
            Device& d = *m.device(target);
            d.res.cpu_load = kCpuInjectSender;
            d.res.stress_processes = {"stress_cpu_0", "stress_cpu_1"};
            break;
        }
        case FaultLabel::receiver_resource_contention: {
            Device& d = *m.device(target);
            d.res.cpu_load = kCpuInjectReceiver;
            d.res.stress_processes = {"stress_cpu_0", "stress_cpu_1"};
            break;
        }
        case FaultLabel::sender_application_delay:
            m.device(target)->res.app_delay_ms = kAppDelayInjectMs;
            break;
        case FaultLabel::web_dos_attack:
            m.device(target)->res.open_sockets = kSocketInjectCount;
            break;

        case FaultLabel::host_crash: {
            Device& d = *m.device(target);
            d.crashed = true;
            for (auto& i : d.interfaces) i.oper_up = false;
            if (d.services.dns) d.services.dns->daemon_up = false;
            if (d.services.http) d.services.http->daemon_up = false;
            if (d.services.dhcp) d.services.dhcp->daemon_up = false;
            break;
        }
    }
    std::sort(out.truth.devices.begin(), out.truth.devices.end());
    return out;
}

namespace {

// Manifestation predicates, deliberately written as standalone structural
// scans rather than reusing the mutation code above.

bool any_link_state(const Topology& t, LinkState s) {
    for (const auto& l : t.links)
        if (l.state == s) return true;
    return false;
}

bool drop_rule_exists(const Device& d, AclRule::Proto p, std::optional<int> port,
                      const char* chain = nullptr) {
    for (const auto& c : d.acl.chains) {
        if (chain && c.name != chain) continue;
        for (const auto& r : c.rules) {
            if (!r.drop || r.proto != p) continue;
            if (!port || (r.dport && *r.dport == *port) || (r.sport && *r.sport == *port))
                return true;
        }
    }
    return false;
}

struct Pred {
    bool fired = false;
    std::string why;
};

Pred check_label(const Topology& t, FaultLabel label) {
    auto hit = [](const std::string& w) { return Pred{true, w}; };
    auto miss = [](const std::string& w) { return Pred{false, w}; };

    switch (label) {
        case FaultLabel::link_detach:
            return any_link_state(t, LinkState::detached) ? hit("") : miss("no detached link");
        case FaultLabel::link_down:
            return any_link_state(t, LinkState::down) ? hit("") : miss("all links up");
        case FaultLabel::link_flap:
            return any_link_state(t, LinkState::flapping) ? hit("") : miss("no flapping link");

        case FaultLabel::mac_address_conflict: {
            std::map<std::string, int> seen;
            for (const auto& [n, d] : t.devices)
                for (const auto& i : d.interfaces)
                    if (++seen[i.mac] == 2) return hit("");
            return miss("all interface MACs unique");
        }
        case FaultLabel::host_ip_conflict: {
            std::set<uint32_t> seen;
            for (const auto& [n, d] : t.devices)
                for (const auto& i : d.interfaces)
                    if (i.addr && !seen.insert(i.addr->v).second) return hit("");
            return miss("all addresses unique");
        }
        case FaultLabel::host_wrong_ip:
            for (const auto& [h, plan] : t.manifest.hosts) {
                const Interface* i = t.device(h)->primary_iface();
                if (i && i->addr && !(*i->addr == plan.ip)) return hit("");
            }
            return miss("every endpoint address matches the plan");
        case FaultLabel::host_wrong_gateway:
            for (const auto& [h, plan] : t.manifest.hosts) {
                const auto& gw = t.device(h)->host.gateway;
                if (gw && !(*gw == plan.gateway)) return hit("");
            }
            return miss("every gateway matches the plan");
        case FaultLabel::host_wrong_netmask:
            for (const auto& [h, plan] : t.manifest.hosts) {
                const Interface* i = t.device(h)->primary_iface();
                if (i && i->addr && i->prefix_len != plan.prefix_len) return hit("");
            }
            return miss("every netmask matches the plan");
        case FaultLabel::host_missing_ip:
            for (const auto& [h, plan] : t.manifest.hosts) {
                const Device& d = *t.device(h);
                // A managed endpoint whose lease vanished too is the dhcp
                // family's turf; a bare missing address is this label's.
                if (d.crashed || (d.host.dhcp_managed && !d.host.lease)) continue;
                const Interface* i = d.primary_iface();
                if (!i || !i->addr) return hit("");
            }
            return miss("every configured endpoint has its address");
        case FaultLabel::host_incorrect_dns:
            for (const auto& h : t.host_names())
                for (const auto& r : t.device(h)->host.resolvers)
                    if (!Ipv4::parse(r)) return hit("");
            return miss("all resolver entries parse");
        case FaultLabel::host_static_arp:
            for (const auto& h : t.host_names()) {
                for (const auto& e : t.device(h)->host.static_arp) {
                    const Device* owner = t.owner_of(e.ip);
                    if (!owner) return hit("");
                    bool matches = false;
                    for (const auto& i : owner->interfaces)
                        if (i.addr && *i.addr == e.ip && i.mac == e.mac) matches = true;
                    if (!matches) return hit("");
                }
            }
            return miss("no stale static arp entry");

        case FaultLabel::arp_acl_block:
            for (const auto& [n, d] : t.devices)
                if (drop_rule_exists(d, AclRule::Proto::arp, {})) return hit("");
            return miss("no arp filter");
        case FaultLabel::icmp_acl_block:
            for (const auto& [n, d] : t.devices)
                if (drop_rule_exists(d, AclRule::Proto::icmp, {})) return hit("");
            return miss("no icmp filter");
        case FaultLabel::http_acl_block:
            for (const auto& [n, d] : t.devices)
                if (has_role(t, n, "http") && drop_rule_exists(d, AclRule::Proto::tcp, 80))
                    return hit("");
            return miss("no tcp/80 filter on a web endpoint");
        case FaultLabel::dns_port_blocked:
            for (const auto& [n, d] : t.devices) {
                if (!has_role(t, n, "dns")) continue;
                if (drop_rule_exists(d, AclRule::Proto::udp, 53) ||
                    drop_rule_exists(d, AclRule::Proto::tcp, 53))
                    return hit("");
            }
            return miss("no port-53 filter on a resolver");
        case FaultLabel::bgp_acl_block:
            for (const auto& [n, d] : t.devices) {
                if (drop_rule_exists(d, AclRule::Proto::tcp, 179, "input") &&
                    drop_rule_exists(d, AclRule::Proto::tcp, 179, "forward") &&
                    drop_rule_exists(d, AclRule::Proto::tcp, 179, "output"))
                    return hit("");
            }
            return miss("no tcp/179 filter across input/forward/output");
        case FaultLabel::ospf_acl_block:
            for (const auto& [n, d] : t.devices)
                if (drop_rule_exists(d, AclRule::Proto::ospf, {})) return hit("");
            return miss("no ospf filter");
        case FaultLabel::link_fragmentation_disabled:
            for (const auto& [n, d] : t.devices)
                if (d.acl.frag_drop) return hit("");
            return miss("fragmentation intact everywhere");

        case FaultLabel::link_bandwidth_throttling:
            for (const auto& [n, d] : t.devices)
                for (const auto& i : d.interfaces)
                    if (i.qdisc.kind == Qdisc::Kind::rate_limit &&
                        i.qdisc.rate_kbps == kThrottleRateKbps)
                        return hit("");
            return miss("no throttling queue");
        case FaultLabel::link_high_packet_corruption:
            for (const auto& [n, d] : t.devices)
                for (const auto& i : d.interfaces)
                    if (i.qdisc.kind == Qdisc::Kind::corrupt &&
                        i.qdisc.corrupt_percent >= kCorruptPercent)
                        return hit("");
            return miss("no corrupting queue");
        case FaultLabel::incast_traffic_network_limitation:
            for (const auto& [n, d] : t.devices)
                for (const auto& i : d.interfaces)
                    if (i.qdisc.kind == Qdisc::Kind::rate_limit &&
                        i.qdisc.rate_kbps == kIncastRateKbps)
                        return hit("");
            return miss("no shared-egress limit");

        case FaultLabel::ospf_neighbor_missing:
            for (const auto& l : t.links) {
                const Device* a = t.device(l.a.device);
                const Device* b = t.device(l.b.device);
                if (!a || !b || !a->routing.ospf || !b->routing.ospf) continue;
                bool a_has = a->routing.ospf->areas.count(l.a.iface);
                bool b_has = b->routing.ospf->areas.count(l.b.iface);
                if (a_has != b_has) return hit("");
            }
            return miss("every protocol link configured on both ends");
        case FaultLabel::frr_service_down:
            for (const auto& [n, d] : t.devices) {
                if (!d.routing.ospf && !d.routing.bgp) continue;
                bool ospf_down = !d.routing.ospf || !d.routing.ospf->daemon_up;
                bool bgp_down = !d.routing.bgp || !d.routing.bgp->daemon_up;
                if (ospf_down && bgp_down && !d.crashed) return hit("");
            }
            return miss("routing daemons healthy");
        case FaultLabel::ospf_area_misconfiguration:
            for (const auto& l : t.links) {
                const Device* a = t.device(l.a.device);
                const Device* b = t.device(l.b.device);
                if (!a || !b || !a->routing.ospf || !b->routing.ospf) continue;
                auto ia = a->routing.ospf->areas.find(l.a.iface);
                auto ib = b->routing.ospf->areas.find(l.b.iface);
                if (ia != a->routing.ospf->areas.end() && ib != b->routing.ospf->areas.end() &&
                    ia->second != ib->second)
                    return hit("");
            }
            return miss("all areas agree");

        case FaultLabel::bgp_asn_misconfig:
            for (const auto& [n, d] : t.devices) {
                if (!d.routing.bgp) continue;
                for (const auto& nb : d.routing.bgp->neighbors) {
                    const Device* peer = t.owner_of(nb.peer_ip);
                    if (peer && peer->routing.bgp &&
                        peer->routing.bgp->local_asn != nb.remote_asn)
                        return hit("");
                }
            }
            return miss("all peer ASNs agree");
        case FaultLabel::bgp_missing_route_advertisement: {
            for (const auto& [host, gw] : t.manifest.gateway_router) {
                const Device* r = t.device(gw);
                if (r && r->routing.bgp && r->routing.bgp->advertised.empty()) return hit("");
            }
            return miss("every edge speaker advertises its subnet");
        }
        case FaultLabel::bgp_hijacking:
            for (const auto& [n, d] : t.devices) {
                if (!d.routing.bgp) continue;
                for (const auto& p : d.routing.bgp->advertised) {
                    for (const auto& [on, od] : t.devices) {
                        if (on == n || !od.routing.bgp) continue;
                        for (const auto& q : od.routing.bgp->advertised) {
                            if (p.len > q.len && q.contains(p.addr)) {
                                bool blackholed = false;
                                for (const auto& s : d.routing.statics)
                                    if (s.blackhole && s.prefix.network() == p.network())
                                        blackholed = true;
                                if (!blackholed) return hit("");
                            }
                        }
                    }
                }
            }
            return miss("no foreign more-specific advertisement");
        case FaultLabel::bgp_blackhole_route_leak:
            for (const auto& [n, d] : t.devices) {
                if (!d.routing.bgp) continue;
                for (const auto& p : d.routing.bgp->advertised)
                    for (const auto& s : d.routing.statics)
                        if (s.blackhole && s.prefix.network() == p.network()) return hit("");
            }
            return miss("no advertised blackhole");
        case FaultLabel::host_static_blackhole:
            for (const auto& h : t.host_names())
                for (const auto& s : t.device(h)->routing.statics)
                    if (s.blackhole) return hit("");
            return miss("no endpoint blackhole route");

        case FaultLabel::dhcp_service_down:
            for (const auto& [n, d] : t.devices)
                if (d.services.dhcp && !d.services.dhcp->daemon_up && !d.crashed) return hit("");
            return miss("all lease services up");
        case FaultLabel::dhcp_missing_subnet: {
            for (const auto& h : t.host_names()) {
                const Device& d = *t.device(h);
                if (!d.host.dhcp_managed || d.host.lease) continue;
                Prefix mine = plan_subnet(t, h);
                bool served = false;
                for (const auto& [n, sd] : t.devices)
                    if (sd.services.dhcp && sd.services.dhcp->daemon_up)
                        for (const auto& sub : sd.services.dhcp->subnets)
                            if (sub.prefix.network() == mine) served = true;
                bool any_up = false;
                for (const auto& [n, sd] : t.devices)
                    if (sd.services.dhcp && sd.services.dhcp->daemon_up) any_up = true;
                if (!served && any_up) return hit("");
            }
            return miss("every managed subnet served");
        }
        case FaultLabel::dhcp_spoofed_subnet:
            for (const auto& [n, d] : t.devices) {
                if (!d.services.dhcp) continue;
                for (const auto& sub : d.services.dhcp->subnets) {
                    for (const auto& [h, plan] : t.manifest.hosts) {
                        if (sub.prefix.contains(plan.ip) && !(sub.gateway == plan.gateway))
                            return hit("");
                    }
                }
            }
            return miss("all offered gateways match the plan");
        case FaultLabel::dhcp_spoofed_dns: {
            std::set<uint32_t> pods;
            for (const auto& h : role_hosts(t, "dns")) pods.insert(t.manifest.hosts.at(h).ip.v);
            for (const auto& [n, d] : t.devices)
                if (d.services.dhcp)
                    for (const auto& sub : d.services.dhcp->subnets)
                        if (!pods.count(sub.dns.v)) return hit("");
            return miss("all offered resolvers are real");
        }

        case FaultLabel::dns_service_down:
            for (const auto& [n, d] : t.devices)
                if (d.services.dns && !d.services.dns->daemon_up && !d.crashed) return hit("");
            return miss("all resolvers up");
        case FaultLabel::dns_record_error:
            for (const auto& [n, d] : t.devices)
                if (d.services.dns)
                    for (const auto& [name, ip] : d.services.dns->zone)
                        if (ip == Ipv4(0, 0, 0, 0)) return hit("");
            return miss("no poisoned record");
        case FaultLabel::dns_lookup_latency:
            for (const auto& [n, d] : t.devices)
                if (d.services.dns && d.services.dns->lookup_latency_ms > kDnsLatencyThresholdMs)
                    return hit("");
            return miss("lookup latency nominal");

        case FaultLabel::load_balancer_overload:
            for (const auto& [n, d] : t.devices)
                if (d.services.lb && d.services.lb->overloaded) return hit("");
            return miss("balancer healthy");

        case FaultLabel::sender_resource_contention:
            for (const auto& h : t.host_names())
                if (!t.manifest.roles.count(h) && t.device(h)->res.cpu_load > kCpuThreshold)
                    return hit("");
            return miss("client cpu nominal");
        case FaultLabel::receiver_resource_contention:
            for (const auto& h : t.host_names())
                if (t.manifest.roles.count(h) && t.device(h)->res.cpu_load > kCpuThreshold &&
                    !t.device(h)->res.stress_processes.empty())
                    return hit("");
            return miss("service cpu nominal");
        case FaultLabel::sender_application_delay:
            for (const auto& h : t.host_names())
                if (t.device(h)->res.app_delay_ms > kAppDelayThresholdMs) return hit("");
            return miss("application timing nominal");
        case FaultLabel::web_dos_attack:
            for (const auto& h : t.host_names())
                if (has_role(t, h, "http") &&
                    t.device(h)->res.open_sockets > kSocketSpikeThreshold)
                    return hit("");
            return miss("socket counts nominal");

        case FaultLabel::host_crash:
            for (const auto& [n, d] : t.devices)
                if (d.crashed) return hit("");
            return miss("no dead device");
    }
    return miss("unknown label");
}

}  // namespace

VerifyResult verify_injection(const Topology& t, const GroundTruth& truth) {
    if (!truth.is_anomaly || truth.labels.empty())
        return {false, "ground truth carries no fault"};
    auto label = label_from_string(truth.labels.front());
    if (!label) return {false, "unknown label '" + truth.labels.front() + "'"};
    Pred p = check_label(t, *label);
    if (!p.fired) return {false, p.why};
    return {true, ""};
}

bool verify_benign(const Topology& t, std::string* firing) {
    for (FaultLabel label : all_labels()) {
        if (check_label(t, label).fired) {
            if (firing) *firing = to_string(label);
            return false;
        }
    }
    return true;
}

}  // namespace netdiag
