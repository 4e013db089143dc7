#include "netdiag/topology_json.hpp"

#include <nlohmann/json.hpp>

namespace netdiag {

using json = nlohmann::ordered_json;

namespace {

json ip_j(Ipv4 ip) { return ip.str(); }
json opt_ip_j(const std::optional<Ipv4>& ip) { return ip ? json(ip->str()) : json(nullptr); }

Ipv4 ip_p(const json& j) { return *Ipv4::parse(j.get<std::string>()); }
std::optional<Ipv4> opt_ip_p(const json& j) {
    return j.is_null() ? std::nullopt : std::make_optional(ip_p(j));
}

const char* proto_name(AclRule::Proto p) {
    switch (p) {
        case AclRule::Proto::any: return "any";
        case AclRule::Proto::tcp: return "tcp";
        case AclRule::Proto::udp: return "udp";
        case AclRule::Proto::icmp: return "icmp";
        case AclRule::Proto::ospf: return "ospf";
        default: return "arp";
    }
}

AclRule::Proto proto_parse(const std::string& s) {
    if (s == "any") return AclRule::Proto::any;
    if (s == "tcp") return AclRule::Proto::tcp;
    if (s == "udp") return AclRule::Proto::udp;
    if (s == "icmp") return AclRule::Proto::icmp;
    if (s == "ospf") return AclRule::Proto::ospf;
    return AclRule::Proto::arp;
}

json qdisc_j(const Qdisc& q) {
    json j;
    switch (q.kind) {
        case Qdisc::Kind::fifo: j["kind"] = "fifo"; break;
        case Qdisc::Kind::rate_limit:
            j["kind"] = "rate_limit";
            j["rate_kbps"] = q.rate_kbps;
            break;
        case Qdisc::Kind::corrupt:
            j["kind"] = "corrupt";
            j["corrupt_percent"] = q.corrupt_percent;
            break;
    }
    return j;
}

Qdisc qdisc_p(const json& j) {
    Qdisc q;
    auto kind = j.at("kind").get<std::string>();
    if (kind == "rate_limit") {
        q.kind = Qdisc::Kind::rate_limit;
        q.rate_kbps = j.at("rate_kbps").get<int>();
    } else if (kind == "corrupt") {
        q.kind = Qdisc::Kind::corrupt;
        q.corrupt_percent = j.at("corrupt_percent").get<int>();
    }
    return q;
}

json device_j(const Device& d) {
    json j;
    j["kind"] = to_string(d.kind);
    j["crashed"] = d.crashed;

    json ifs = json::array();
    for (auto& i : d.interfaces) {
        json ji;
        ji["name"] = i.name;
        ji["mac"] = i.mac;
        ji["addr"] = opt_ip_j(i.addr);
        ji["prefix_len"] = i.prefix_len;
        ji["admin_up"] = i.admin_up;
        ji["oper_up"] = i.oper_up;
        ji["bridge"] = i.bridge ? json(*i.bridge) : json(nullptr);
        ji["qdisc"] = qdisc_j(i.qdisc);
        ifs.push_back(std::move(ji));
    }
    j["interfaces"] = std::move(ifs);

    json routing;
    json statics = json::array();
    for (auto& s : d.routing.statics) {
        json js;
        js["prefix"] = s.prefix.str();
        js["next_hop"] = opt_ip_j(s.next_hop);
        js["blackhole"] = s.blackhole;
        statics.push_back(std::move(js));
    }
    routing["statics"] = std::move(statics);
    if (d.routing.ospf) {
        json o;
        o["daemon_up"] = d.routing.ospf->daemon_up;
        json areas = json::object();
        for (auto& [iface, area] : d.routing.ospf->areas) areas[iface] = area;
        o["areas"] = std::move(areas);
        json adv = json::array();
        for (auto& p : d.routing.ospf->advertised) adv.push_back(p.str());
        o["advertised"] = std::move(adv);
        routing["ospf"] = std::move(o);
    } else {
        routing["ospf"] = nullptr;
    }
    if (d.routing.bgp) {
        json bg;
        bg["daemon_up"] = d.routing.bgp->daemon_up;
        bg["local_asn"] = d.routing.bgp->local_asn;
        json nb = json::array();
        for (auto& n : d.routing.bgp->neighbors) {
            json jn;
            jn["peer_ip"] = ip_j(n.peer_ip);
            jn["remote_asn"] = n.remote_asn;
            nb.push_back(std::move(jn));
        }
        bg["neighbors"] = std::move(nb);
        json adv = json::array();
        for (auto& p : d.routing.bgp->advertised) adv.push_back(p.str());
        bg["advertised"] = std::move(adv);
        routing["bgp"] = std::move(bg);
    } else {
        routing["bgp"] = nullptr;
    }
    j["routing"] = std::move(routing);

    json acl;
    json chains = json::array();
    for (auto& c : d.acl.chains) {
        json jc;
        jc["name"] = c.name;
        json rules = json::array();
        for (auto& r : c.rules) {
            json jr;
            jr["proto"] = proto_name(r.proto);
            jr["dport"] = r.dport ? json(*r.dport) : json(nullptr);
            jr["sport"] = r.sport ? json(*r.sport) : json(nullptr);
            jr["drop"] = r.drop;
            rules.push_back(std::move(jr));
        }
        jc["rules"] = std::move(rules);
        chains.push_back(std::move(jc));
    }
    acl["chains"] = std::move(chains);
    acl["frag_drop"] = d.acl.frag_drop;
    j["acl"] = std::move(acl);

    json host;
    host["resolvers"] = d.host.resolvers;
    host["gateway"] = opt_ip_j(d.host.gateway);
    json arp = json::array();
    for (auto& e : d.host.static_arp) {
        json je;
        je["ip"] = ip_j(e.ip);
        je["mac"] = e.mac;
        je["static"] = e.is_static;
        arp.push_back(std::move(je));
    }
    host["static_arp"] = std::move(arp);
    host["dhcp_managed"] = d.host.dhcp_managed;
    if (d.host.lease) {
        json jl;
        jl["ip"] = ip_j(d.host.lease->ip);
        jl["gateway"] = ip_j(d.host.lease->gateway);
        jl["dns"] = ip_j(d.host.lease->dns);
        jl["subnet"] = d.host.lease->subnet.str();
        host["lease"] = std::move(jl);
    } else {
        host["lease"] = nullptr;
    }
    j["host"] = std::move(host);

    json services;
    if (d.services.dns) {
        json s;
        s["daemon_up"] = d.services.dns->daemon_up;
        s["listen_ip"] = ip_j(d.services.dns->listen_ip);
        s["listen_port"] = d.services.dns->listen_port;
        json zone = json::object();
        for (auto& [name, ip] : d.services.dns->zone) zone[name] = ip.str();
        s["zone"] = std::move(zone);
        s["lookup_latency_ms"] = d.services.dns->lookup_latency_ms;
        services["dns"] = std::move(s);
    } else {
        services["dns"] = nullptr;
    }
    if (d.services.http) {
        json s;
        s["daemon_up"] = d.services.http->daemon_up;
        s["port"] = d.services.http->port;
        services["http"] = std::move(s);
    } else {
        services["http"] = nullptr;
    }
    if (d.services.dhcp) {
        json s;
        s["daemon_up"] = d.services.dhcp->daemon_up;
        json subnets = json::array();
        for (auto& sn : d.services.dhcp->subnets) {
            json js;
            js["prefix"] = sn.prefix.str();
            js["gateway"] = ip_j(sn.gateway);
            js["dns"] = ip_j(sn.dns);
            subnets.push_back(std::move(js));
        }
        s["subnets"] = std::move(subnets);
        services["dhcp"] = std::move(s);
    } else {
        services["dhcp"] = nullptr;
    }
    if (d.services.lb) {
        json s;
        s["backends"] = d.services.lb->backends;
        s["overloaded"] = d.services.lb->overloaded;
        services["lb"] = std::move(s);
    } else {
        services["lb"] = nullptr;
    }
    j["services"] = std::move(services);

    json res;
    res["cpu_load"] = d.res.cpu_load;
    res["open_sockets"] = d.res.open_sockets;
    res["stress_processes"] = d.res.stress_processes;
    res["app_delay_ms"] = d.res.app_delay_ms;
    j["resources"] = std::move(res);
    return j;
}

Device device_p(const std::string& name, const json& j) {
    Device d;
    d.name = name;
    auto kind = j.at("kind").get<std::string>();
    d.kind = kind == "router" ? DeviceKind::router
                              : (kind == "switch" ? DeviceKind::sw : DeviceKind::host);
    d.crashed = j.at("crashed").get<bool>();

    for (auto& ji : j.at("interfaces")) {
        Interface i;
        i.name = ji.at("name").get<std::string>();
        i.mac = ji.at("mac").get<std::string>();
        i.addr = opt_ip_p(ji.at("addr"));
        i.prefix_len = ji.at("prefix_len").get<int>();
        i.admin_up = ji.at("admin_up").get<bool>();
        i.oper_up = ji.at("oper_up").get<bool>();
        if (!ji.at("bridge").is_null()) i.bridge = ji.at("bridge").get<std::string>();
        i.qdisc = qdisc_p(ji.at("qdisc"));
        d.interfaces.push_back(std::move(i));
    }

    auto& routing = j.at("routing");
    for (auto& js : routing.at("statics")) {
        StaticRoute s;
        s.prefix = *Prefix::parse(js.at("prefix").get<std::string>());
        s.next_hop = opt_ip_p(js.at("next_hop"));
        s.blackhole = js.at("blackhole").get<bool>();
        d.routing.statics.push_back(s);
    }
    if (!routing.at("ospf").is_null()) {
        OspfConfig o;
        o.daemon_up = routing.at("ospf").at("daemon_up").get<bool>();
        for (auto& [iface, area] : routing.at("ospf").at("areas").items())
            o.areas[iface] = area.get<int>();
        for (auto& p : routing.at("ospf").at("advertised"))
            o.advertised.push_back(*Prefix::parse(p.get<std::string>()));
        d.routing.ospf = std::move(o);
    }
    if (!routing.at("bgp").is_null()) {
        BgpConfig bg;
        auto& jb = routing.at("bgp");
        bg.daemon_up = jb.at("daemon_up").get<bool>();
        bg.local_asn = jb.at("local_asn").get<uint32_t>();
        for (auto& jn : jb.at("neighbors"))
            bg.neighbors.push_back(
                BgpNeighbor{ip_p(jn.at("peer_ip")), jn.at("remote_asn").get<uint32_t>()});
        for (auto& p : jb.at("advertised"))
            bg.advertised.push_back(*Prefix::parse(p.get<std::string>()));
        d.routing.bgp = std::move(bg);
    }

    for (auto& jc : j.at("acl").at("chains")) {
        AclChain c;
        c.name = jc.at("name").get<std::string>();
        for (auto& jr : jc.at("rules")) {
            AclRule r;
            r.proto = proto_parse(jr.at("proto").get<std::string>());
            if (!jr.at("dport").is_null()) r.dport = jr.at("dport").get<int>();
            if (!jr.at("sport").is_null()) r.sport = jr.at("sport").get<int>();
            r.drop = jr.at("drop").get<bool>();
            c.rules.push_back(r);
        }
        d.acl.chains.push_back(std::move(c));
    }
    d.acl.frag_drop = j.at("acl").at("frag_drop").get<bool>();

    auto& host = j.at("host");
    d.host.resolvers = host.at("resolvers").get<std::vector<std::string>>();
    d.host.gateway = opt_ip_p(host.at("gateway"));
    for (auto& je : host.at("static_arp"))
        d.host.static_arp.push_back(
            ArpEntry{ip_p(je.at("ip")), je.at("mac").get<std::string>(), je.at("static").get<bool>()});
    d.host.dhcp_managed = host.at("dhcp_managed").get<bool>();
    if (!host.at("lease").is_null()) {
        auto& jl = host.at("lease");
        d.host.lease = DhcpLease{ip_p(jl.at("ip")), ip_p(jl.at("gateway")), ip_p(jl.at("dns")),
                                 *Prefix::parse(jl.at("subnet").get<std::string>())};
    }

    auto& services = j.at("services");
    if (!services.at("dns").is_null()) {
        DnsService s;
        auto& js = services.at("dns");
        s.daemon_up = js.at("daemon_up").get<bool>();
        s.listen_ip = ip_p(js.at("listen_ip"));
        s.listen_port = js.at("listen_port").get<int>();
        for (auto& [zn, zip] : js.at("zone").items()) s.zone[zn] = *Ipv4::parse(zip.get<std::string>());
        s.lookup_latency_ms = js.at("lookup_latency_ms").get<int>();
        d.services.dns = std::move(s);
    }
    if (!services.at("http").is_null()) {
        HttpService s;
        s.daemon_up = services.at("http").at("daemon_up").get<bool>();
        s.port = services.at("http").at("port").get<int>();
        d.services.http = s;
    }
    if (!services.at("dhcp").is_null()) {
        DhcpService s;
        s.daemon_up = services.at("dhcp").at("daemon_up").get<bool>();
        for (auto& js : services.at("dhcp").at("subnets"))
            s.subnets.push_back(DhcpSubnet{*Prefix::parse(js.at("prefix").get<std::string>()),
                                           ip_p(js.at("gateway")), ip_p(js.at("dns"))});
        d.services.dhcp = std::move(s);
    }
    if (!services.at("lb").is_null()) {
        LbService s;
        s.backends = services.at("lb").at("backends").get<std::vector<std::string>>();
        s.overloaded = services.at("lb").at("overloaded").get<bool>();
        d.services.lb = std::move(s);
    }

    auto& res = j.at("resources");
    d.res.cpu_load = res.at("cpu_load").get<double>();
    d.res.open_sockets = res.at("open_sockets").get<int>();
    d.res.stress_processes = res.at("stress_processes").get<std::vector<std::string>>();
    d.res.app_delay_ms = res.at("app_delay_ms").get<int>();
    return d;
}

}  // namespace

json topology_to_json(const Topology& t) {
    json j;
    j["scenario"] = t.scenario;
    j["size"] = t.size;
    j["seed"] = t.seed;

    json devices = json::object();
    for (auto& [name, d] : t.devices) devices[name] = device_j(d);
    j["devices"] = std::move(devices);

    json links = json::array();
    for (auto& l : t.links) {
        json jl;
        jl["id"] = l.id;
        jl["a"] = json{{"device", l.a.device}, {"iface", l.a.iface}};
        jl["b"] = json{{"device", l.b.device}, {"iface", l.b.iface}};
        jl["state"] = to_string(l.state);
        jl["loss_percent"] = l.loss_percent;
        links.push_back(std::move(jl));
    }
    j["links"] = std::move(links);

    json manifest;
    json kinds = json::object();
    for (auto& [name, k] : t.manifest.kinds) kinds[name] = to_string(k);
    manifest["kinds"] = std::move(kinds);
    json hosts = json::object();
    for (auto& [name, plan] : t.manifest.hosts) {
        json jp;
        jp["ip"] = plan.ip.str();
        jp["prefix_len"] = plan.prefix_len;
        jp["gateway"] = plan.gateway.str();
        hosts[name] = std::move(jp);
    }
    manifest["hosts"] = std::move(hosts);
    json mlinks = json::array();
    for (auto& [a, bb] : t.manifest.links) mlinks.push_back(json::array({a, bb}));
    manifest["links"] = std::move(mlinks);
    json roles = json::object();
    for (auto& [name, r] : t.manifest.roles) roles[name] = r;
    manifest["roles"] = std::move(roles);
    json gw = json::object();
    for (auto& [name, r] : t.manifest.gateway_router) gw[name] = r;
    manifest["gateway_router"] = std::move(gw);
    json macs = json::object();
    for (auto& [name, m2] : t.manifest.macs) macs[name] = m2;
    manifest["macs"] = std::move(macs);
    j["manifest"] = std::move(manifest);
    return j;
}

Topology topology_from_json(const json& j) {
    Topology t;
    t.scenario = j.at("scenario").get<std::string>();
    t.size = j.at("size").get<std::string>();
    t.seed = j.at("seed").get<uint64_t>();
    for (auto& [name, jd] : j.at("devices").items()) t.devices.emplace(name, device_p(name, jd));
    for (auto& jl : j.at("links")) {
        Link l;
        l.id = jl.at("id").get<std::string>();
        l.a = {jl.at("a").at("device").get<std::string>(), jl.at("a").at("iface").get<std::string>()};
        l.b = {jl.at("b").at("device").get<std::string>(), jl.at("b").at("iface").get<std::string>()};
        auto st = jl.at("state").get<std::string>();
        l.state = st == "up" ? LinkState::up
                             : (st == "down" ? LinkState::down
                                             : (st == "detached" ? LinkState::detached
                                                                 : LinkState::flapping));
        l.loss_percent = jl.at("loss_percent").get<int>();
        t.links.push_back(std::move(l));
    }
    auto& m = j.at("manifest");
    for (auto& [name, k] : m.at("kinds").items()) {
        auto ks = k.get<std::string>();
        t.manifest.kinds[name] = ks == "router" ? DeviceKind::router
                                                : (ks == "switch" ? DeviceKind::sw : DeviceKind::host);
    }
    for (auto& [name, jp] : m.at("hosts").items())
        t.manifest.hosts[name] =
            HostPlan{*Ipv4::parse(jp.at("ip").get<std::string>()), jp.at("prefix_len").get<int>(),
                     *Ipv4::parse(jp.at("gateway").get<std::string>())};
    for (auto& jl : m.at("links"))
        t.manifest.links.emplace_back(jl.at(0).get<std::string>(), jl.at(1).get<std::string>());
    for (auto& [name, r] : m.at("roles").items())
        t.manifest.roles[name] = r.get<std::vector<std::string>>();
    for (auto& [name, r] : m.at("gateway_router").items())
        t.manifest.gateway_router[name] = r.get<std::string>();
    for (auto& [name, r] : m.at("macs").items()) t.manifest.macs[name] = r.get<std::string>();
    return t;
}

std::string topology_to_string(const Topology& t) { return topology_to_json(t).dump(2) + "\n"; }

Topology topology_from_string(const std::string& text) {
    return topology_from_json(json::parse(text));
}

}  // namespace netdiag
