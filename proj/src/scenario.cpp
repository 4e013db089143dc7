#include "netdiag/scenario.hpp"

#include <algorithm>
#include <cstdio>

namespace netdiag {
namespace {

uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

uint64_t fnv1a(const std::string& s) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

// Locally-administered MAC derived from (seed, device, iface).
std::string make_mac(uint64_t seed, const std::string& dev, const std::string& iface) {
    uint64_t h = splitmix64(seed ^ fnv1a(dev + "/" + iface));
    char buf[18];
    std::snprintf(buf, sizeof buf, "02:%02x:%02x:%02x:%02x:%02x", unsigned(h >> 32) & 0xff,
                  unsigned(h >> 24) & 0xff, unsigned(h >> 16) & 0xff, unsigned(h >> 8) & 0xff,
                  unsigned(h) & 0xff);
    return buf;
}

struct Builder {
    Topology t;
    int p2p_count = 0;

    explicit Builder(std::string scenario, std::string size, uint64_t seed) {
        t.scenario = std::move(scenario);
        t.size = std::move(size);
        t.seed = seed;
    }

    Device& add_device(const std::string& name, DeviceKind kind) {
        Device d;
        d.name = name;
        d.kind = kind;
        if (kind == DeviceKind::router) d.res.open_sockets = 40;
        return t.devices.emplace(name, std::move(d)).first->second;
    }

    Interface& add_iface(Device& d, const std::string& name, std::optional<Ipv4> addr,
                         int prefix_len, std::optional<std::string> bridge = std::nullopt) {
        Interface i;
        i.name = name;
        i.mac = make_mac(t.seed, d.name, name);
        i.addr = addr;
        i.prefix_len = prefix_len;
        i.bridge = std::move(bridge);
        d.interfaces.push_back(std::move(i));
        return d.interfaces.back();
    }

    void add_link(const std::string& da, const std::string& ia, const std::string& db,
                  const std::string& ib) {
        Link l;
        l.a = {da, ia};
        l.b = {db, ib};
        l.id = Link::make_id(l.a, l.b);
        t.links.push_back(std::move(l));
    }

    // Next /30 out of 172.16.0.0/16; first address goes to the "a" side.
    std::pair<Ipv4, Ipv4> next_p2p() {
        int n = p2p_count++;
        Ipv4 base(172, 16, n / 64, (n % 64) * 4);
        return {Ipv4(base.v + 1), Ipv4(base.v + 2)};
    }

    // Wire two routers point to point; returns the two addresses (a side, b side).
    std::pair<Ipv4, Ipv4> p2p(Device& a, const std::string& ia, Device& b, const std::string& ib) {
        auto [ipa, ipb] = next_p2p();
        add_iface(a, ia, ipa, 30);
        add_iface(b, ib, ipb, 30);
        add_link(a.name, ia, b.name, ib);
        return {ipa, ipb};
    }

    // Sort links by id so serialization order never depends on build order.
    void finish_links() {
        std::sort(t.links.begin(), t.links.end(),
                  [](const Link& x, const Link& y) { return x.id < y.id; });
    }
};

struct HostSpec {
    std::string name;
    std::string role;  // client | dns | web | dhcp | lb
};

// Attach a subnet's hosts behind an L2 segment. If `sw` is null the gateway
// router bridges its own host ports (integrated ToR); otherwise the hosts hang
// off the dedicated access switch.
void build_subnet(Builder& b, Device& gw, Device* sw, int subnet_idx,
                  const std::vector<HostSpec>& hosts) {
    Prefix subnet{Ipv4(10, subnet_idx, 0, 0), 24};
    Ipv4 gw_ip(10, subnet_idx, 0, 1);
    if (sw) {
        b.add_iface(gw, "eth_hosts", gw_ip, 24);
        b.add_iface(*sw, "port0", std::nullopt, 0, "br0");
        b.add_link(gw.name, "eth_hosts", sw->name, "port0");
    } else {
        b.add_iface(gw, "eth_hosts", gw_ip, 24, "br0");
    }

    int next_service = 2;   // pods and servers sit low in the subnet
    int next_client = 10;   // clients start at .10
    int port = 1;
    for (const auto& h : hosts) {
        Device& d = b.add_device(h.name, DeviceKind::host);
        int last = h.role == "client" ? next_client++ : next_service++;
        Ipv4 ip(10, subnet_idx, 0, last);
        b.add_iface(d, "eth0", ip, 24);
        d.host.gateway = gw_ip;
        if (sw) {
            std::string p = "port" + std::to_string(port);
            b.add_iface(*sw, p, std::nullopt, 0, "br0");
            b.add_link(d.name, "eth0", sw->name, p);
        } else {
            std::string p = "swp" + std::to_string(port);
            b.add_iface(gw, p, std::nullopt, 0, "br0");
            b.add_link(d.name, "eth0", gw.name, p);
        }
        ++port;

        if (h.role == "dns") {
            DnsService s;
            s.listen_ip = ip;
            d.services.dns = s;
        } else if (h.role == "web") {
            d.services.http = HttpService{};
        } else if (h.role == "lb") {
            d.services.lb = LbService{};
            d.services.http = HttpService{};  // fronts the web tier
        } else if (h.role == "dhcp") {
            d.services.dhcp = DhcpService{};
        }
        b.t.manifest.hosts[h.name] = HostPlan{ip, 24, gw_ip};
        b.t.manifest.gateway_router[h.name] = gw.name;
    }
}

// Fill zones, resolvers, leases, manifest once all devices exist.
void finalize(Builder& b) {
    Topology& t = b.t;

    std::vector<std::pair<std::string, Ipv4>> pods;  // pod name -> address
    std::vector<std::string> webs;
    for (auto& [name, d] : t.devices) {
        if (d.services.dns) pods.emplace_back(name, d.services.dns->listen_ip);
        if (d.services.http && !d.services.lb) webs.push_back(name);
    }
    std::sort(pods.begin(), pods.end());

    std::map<std::string, Ipv4> zone;
    for (auto& [name, plan] : t.manifest.hosts) zone[name] = plan.ip;

    std::vector<std::string> resolver_list;
    for (auto& [pn, ip] : pods) resolver_list.push_back(ip.str());

    for (auto& [name, d] : t.devices) {
        if (d.kind != DeviceKind::host) continue;
        d.host.resolvers = resolver_list;
        if (d.services.dns) d.services.dns->zone = zone;
        if (d.services.lb) d.services.lb->backends = webs;
    }

    // DHCP servers manage the client subnets they are assigned; leases mirror
    // the server's configuration.
    std::vector<std::string> dhcp_servers;
    for (auto& [name, d] : t.devices)
        if (d.services.dhcp) dhcp_servers.push_back(name);
    std::sort(dhcp_servers.begin(), dhcp_servers.end());
    if (!dhcp_servers.empty() && !pods.empty()) {
        std::vector<Prefix> subnets;
        for (auto& [name, plan] : t.manifest.hosts) {
            Prefix p{Ipv4(plan.ip.v & Prefix{plan.ip, plan.prefix_len}.mask()), plan.prefix_len};
            if (std::find(subnets.begin(), subnets.end(), p) == subnets.end()) subnets.push_back(p);
        }
        std::sort(subnets.begin(), subnets.end());
        Ipv4 lease_dns = pods.front().second;
        for (size_t i = 0; i < subnets.size(); ++i) {
            auto& server = dhcp_servers[i * dhcp_servers.size() / subnets.size()];
            Ipv4 gw(subnets[i].addr.v | 1);
            t.devices.at(server).services.dhcp->subnets.push_back(
                DhcpSubnet{subnets[i], gw, lease_dns});
        }
        for (auto& [name, d] : t.devices) {
            if (d.kind != DeviceKind::host || d.services.dns || d.services.http ||
                d.services.dhcp || d.services.lb)
                continue;  // only plain clients take leases
            auto& plan = t.manifest.hosts.at(name);
            d.host.dhcp_managed = true;
            d.host.lease = DhcpLease{plan.ip, plan.gateway, lease_dns,
                                     Prefix{Ipv4(plan.ip.v & Prefix{plan.ip, 24}.mask()), 24}};
        }
    }

    for (auto& [name, d] : t.devices) {
        t.manifest.kinds[name] = d.kind;
        std::vector<std::string> roles;
        if (d.services.dns) roles.push_back("dns");
        if (d.services.http) roles.push_back("http");
        if (d.services.dhcp) {
            roles.push_back("dhcp");
            // Record which subnets this server is meant to serve.
            for (auto& s : d.services.dhcp->subnets)
                roles.push_back("dhcp-subnet:" + s.prefix.str());
        }
        if (d.services.lb) roles.push_back("lb");
        if (!roles.empty()) t.manifest.roles[name] = roles;
        if (const Interface* pi = d.primary_iface()) t.manifest.macs[name] = pi->mac;
    }
    for (auto& l : t.links) t.manifest.links.emplace_back(l.a.device, l.b.device);
    std::sort(t.manifest.links.begin(), t.manifest.links.end());
}

// --- clos_bgp: two-tier leaf/spine fabric running eBGP, service pods on the
// first few leaves. Spine group g owns ASN 65000+g, leaf k owns 65100+k.

Topology build_clos(const std::string& size, uint64_t seed) {
    int groups, spines_per_group, leaves;
    if (size == "small") {
        groups = 1;
        spines_per_group = 2;
        leaves = 3;
    } else if (size == "medium") {
        groups = 2;
        spines_per_group = 2;
        leaves = 6;
    } else {
        groups = 3;
        spines_per_group = 4;
        leaves = 24;
    }

    Builder b("clos_bgp", size, seed);

    std::vector<std::string> spine_names;
    for (int g = 1; g <= groups; ++g)
        for (int i = 1; i <= spines_per_group; ++i) {
            std::string name = "spine_router_" + std::to_string(g) + "_" + std::to_string(i);
            Device& s = b.add_device(name, DeviceKind::router);
            s.routing.bgp = BgpConfig{true, uint32_t(65000 + g), {}, {}};
            spine_names.push_back(name);
        }

    for (int k = 1; k <= leaves; ++k) {
        Device& leaf = b.add_device("leaf_router_" + std::to_string(k), DeviceKind::router);
        leaf.routing.bgp = BgpConfig{true, uint32_t(65100 + k), {}, {Prefix{Ipv4(10, k, 0, 0), 24}}};
    }

    // Full bipartite fabric; leaf side gets .2 of each /30.
    for (int k = 1; k <= leaves; ++k) {
        Device& leaf = *b.t.device("leaf_router_" + std::to_string(k));
        int s = 0;
        for (int g = 1; g <= groups; ++g)
            for (int i = 1; i <= spines_per_group; ++i, ++s) {
                Device& spine = *b.t.device(spine_names[size_t(s)]);
                std::string si = "eth_l" + std::to_string(k);
                std::string li = "eth_s" + std::to_string(g) + "_" + std::to_string(i);
                auto [spine_ip, leaf_ip] = b.p2p(spine, si, leaf, li);
                spine.routing.bgp->neighbors.push_back(BgpNeighbor{leaf_ip, uint32_t(65100 + k)});
                leaf.routing.bgp->neighbors.push_back(BgpNeighbor{spine_ip, uint32_t(65000 + g)});
            }
    }

    // Host placement: one service pod on each of the first leaves, then
    // clients filled sequentially (lower leaves get the extra one).
    // dns_podN lands on leaf N so pod addresses read 10.N.0.2.
    std::vector<std::pair<std::string, std::string>> services;  // role, name
    if (size == "small")
        services = {{"dns", "dns_pod1"}, {"web", "web_server_0"}};
    else
        services = {{"dns", "dns_pod1"}, {"dns", "dns_pod2"}, {"web", "web_server_0"},
                    {"web", "web_server_1"}, {"lb", "lb_0"}};

    int total_clients = size == "small" ? 3 : size == "medium" ? 12 : 60;
    int base = total_clients / leaves;
    int extra = total_clients % leaves;  // first `extra` leaves get one more
    int client_idx = 0;
    for (int k = 1; k <= leaves; ++k) {
        std::vector<HostSpec> hosts;
        if (size_t(k - 1) < services.size())
            hosts.push_back({services[size_t(k - 1)].second, services[size_t(k - 1)].first});
        int n = base + (k <= extra ? 1 : 0);
        for (int c = 0; c < n; ++c) hosts.push_back({"client_" + std::to_string(client_idx++), "client"});
        Device& leaf = *b.t.device("leaf_router_" + std::to_string(k));
        build_subnet(b, leaf, nullptr, k, hosts);
    }

    b.finish_links();
    finalize(b);
    return std::move(b.t);
}

// --- campus_ospf_service: core/distribution OSPF tree, access switches, DHCP
// managed clients. Backbone links in area 0, each distribution subnet in its
// own area.

Topology build_campus(const std::string& size, uint64_t seed) {
    int cores, dists;
    if (size == "small") {
        cores = 1;
        dists = 2;
    } else if (size == "medium") {
        cores = 2;
        dists = 4;
    } else {
        cores = 4;
        dists = 12;
    }

    Builder b("campus_ospf_service", size, seed);

    for (int c = 1; c <= cores; ++c) {
        Device& core = b.add_device("core_router_" + std::to_string(c), DeviceKind::router);
        core.routing.ospf = OspfConfig{true, {}, {}};
    }
    // Core ring when there is more than one core.
    for (int c = 1; c <= cores && cores > 1; ++c) {
        int n = c % cores + 1;
        if (cores == 2 && c == 2) break;  // avoid a duplicate pair
        Device& x = *b.t.device("core_router_" + std::to_string(c));
        Device& y = *b.t.device("core_router_" + std::to_string(n));
        std::string xi = "eth_c" + std::to_string(n);
        std::string yi = "eth_c" + std::to_string(c);
        b.p2p(x, xi, y, yi);
        x.routing.ospf->areas[xi] = 0;
        y.routing.ospf->areas[yi] = 0;
    }

    for (int k = 1; k <= dists; ++k) {
        Device& dist = b.add_device("dist_router_" + std::to_string(k), DeviceKind::router);
        dist.routing.ospf = OspfConfig{true, {}, {Prefix{Ipv4(10, k, 0, 0), 24}}};
        // Each distribution router uplinks to one core (two at larger sizes).
        std::vector<int> uplinks;
        if (cores == 1)
            uplinks = {1};
        else
            uplinks = {(k - 1) % cores + 1, k % cores + 1};
        for (int c : uplinks) {
            Device& core = *b.t.device("core_router_" + std::to_string(c));
            std::string ci = "eth_d" + std::to_string(k);
            std::string di = "eth_c" + std::to_string(c);
            b.p2p(core, ci, dist, di);
            core.routing.ospf->areas[ci] = 0;
            dist.routing.ospf->areas[di] = 0;
        }
    }

    // Service placement by subnet index.
    auto service_for_subnet = [&](int k) -> std::vector<HostSpec> {
        if (size == "small") {
            if (k == 1) return {{"dhcp_server_1", "dhcp"}};
            return {{"dns_pod1", "dns"}, {"web_server_0", "web"}};
        }
        if (size == "medium") {
            switch (k) {
                case 1: return {{"dhcp_server_1", "dhcp"}};
                case 2: return {{"dns_pod1", "dns"}};
                case 3: return {{"dns_pod2", "dns"}, {"web_server_0", "web"}};
                default: return {};
            }
        }
        switch (k) {
            case 1: return {{"dhcp_server_1", "dhcp"}};
            case 2: return {{"dhcp_server_2", "dhcp"}};
            case 3: return {{"dns_pod1", "dns"}};
            case 4: return {{"dns_pod2", "dns"}};
            case 5: return {{"dns_pod3", "dns"}};
            case 6: return {{"web_server_0", "web"}};
            case 7: return {{"web_server_1", "web"}};
            default: return {};
        }
    };
    auto clients_for_subnet = [&](int k) {
        if (size == "small") return k == 1 ? 2 : 1;
        if (size == "medium") return 3;
        return k <= 7 ? 6 : 5;
    };

    int client_idx = 0;
    for (int k = 1; k <= dists; ++k) {
        Device& dist = *b.t.device("dist_router_" + std::to_string(k));
        Device& sw = b.add_device("access_switch_" + std::to_string(k), DeviceKind::sw);
        std::vector<HostSpec> hosts = service_for_subnet(k);
        for (int c = 0; c < clients_for_subnet(k); ++c)
            hosts.push_back({"client_" + std::to_string(client_idx++), "client"});
        build_subnet(b, dist, &sw, k, hosts);
        dist.routing.ospf->areas["eth_hosts"] = k;
    }

    b.finish_links();
    finalize(b);
    return std::move(b.t);
}

// --- isp_static: a provider ring with static routes pinned at generation
// time; no routing daemons anywhere.

Topology build_isp(const std::string& size, uint64_t seed) {
    int routers = size == "small" ? 5 : size == "medium" ? 9 : 34;
    int host_subnets = size == "small" ? 4 : size == "medium" ? 8 : 30;

    Builder b("isp_static", size, seed);

    auto rname = [](int k) { return "isp_router_" + std::to_string(k); };
    for (int k = 1; k <= routers; ++k) b.add_device(rname(k), DeviceKind::router);

    // Ring wiring; remember which p2p address faces which neighbor.
    std::map<std::pair<int, int>, Ipv4> addr_toward;  // (from,to) -> "to" side address
    for (int k = 1; k <= routers; ++k) {
        int n = k % routers + 1;
        Device& x = *b.t.device(rname(k));
        Device& y = *b.t.device(rname(n));
        auto [xip, yip] = b.p2p(x, "eth_r" + std::to_string(n), y, "eth_r" + std::to_string(k));
        addr_toward[{k, n}] = yip;
        addr_toward[{n, k}] = xip;
    }

    auto services_for = [&](int k) -> std::vector<HostSpec> {
        if (size == "small") {
            if (k == 1) return {{"dns_pod1", "dns"}};
            if (k == 3) return {{"web_server_0", "web"}};
            return {};
        }
        if (size == "medium") {
            switch (k) {
                case 1: return {{"dns_pod1", "dns"}};
                case 2: return {{"dns_pod2", "dns"}};
                case 3: return {{"web_server_0", "web"}};
                case 4: return {{"web_server_1", "web"}};
                default: return {};
            }
        }
        switch (k) {
            case 1: return {{"dns_pod1", "dns"}};
            case 2: return {{"dns_pod2", "dns"}};
            case 3: return {{"dns_pod3", "dns"}};
            case 4: return {{"web_server_0", "web"}};
            case 5: return {{"web_server_1", "web"}};
            case 6: return {{"web_server_2", "web"}};
            default: return {};
        }
    };
    auto clients_for = [&](int k) {
        if (size == "small") return 1;
        if (size == "medium") return k == 2 || k == 4 || k == 5 || k == 6 || k == 7 ? 2 : 1;
        return k == 1 ? 3 : 2;
    };

    int client_idx = 0;
    for (int k = 1; k <= host_subnets; ++k) {
        Device& r = *b.t.device(rname(k));
        std::vector<HostSpec> hosts = services_for(k);
        for (int c = 0; c < clients_for(k); ++c)
            hosts.push_back({"client_" + std::to_string(client_idx++), "client"});
        build_subnet(b, r, nullptr, k, hosts);
    }

    // Static routes: BFS over the ring from every router to every host subnet;
    // ties break toward the lower neighbor index so paths are pinned.
    auto neighbors = [&](int k) {
        std::vector<int> ns = {k == 1 ? routers : k - 1, k % routers + 1};
        std::sort(ns.begin(), ns.end());
        return ns;
    };
    for (int from = 1; from <= routers; ++from) {
        std::vector<int> dist(size_t(routers) + 1, -1);
        std::vector<int> first_hop(size_t(routers) + 1, 0);
        dist[size_t(from)] = 0;
        std::vector<int> queue = {from};
        for (size_t qi = 0; qi < queue.size(); ++qi) {
            int cur = queue[qi];
            for (int n : neighbors(cur)) {
                if (dist[size_t(n)] != -1) continue;
                dist[size_t(n)] = dist[size_t(cur)] + 1;
                first_hop[size_t(n)] = cur == from ? n : first_hop[size_t(cur)];
                queue.push_back(n);
            }
        }
        Device& r = *b.t.device(rname(from));
        for (int to = 1; to <= host_subnets; ++to) {
            if (to == from) continue;
            int hop = first_hop[size_t(to)];
            r.routing.statics.push_back(
                StaticRoute{Prefix{Ipv4(10, to, 0, 0), 24}, addr_toward[{from, hop}], false});
        }
    }

    b.finish_links();
    finalize(b);
    return std::move(b.t);
}

}  // namespace

Topology build_scenario(const std::string& scenario, const std::string& size, uint64_t seed) {
    if (std::find(size_classes().begin(), size_classes().end(), size) == size_classes().end())
        throw ScenarioError("unknown size class: " + size);
    if (scenario == "clos_bgp") return build_clos(size, seed);
    if (scenario == "campus_ospf_service") return build_campus(size, seed);
    if (scenario == "isp_static") return build_isp(size, seed);
    throw ScenarioError("unknown scenario class: " + scenario);
}

}  // namespace netdiag
