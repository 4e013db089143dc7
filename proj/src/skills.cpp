#include "netdiag/skills.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "netdiag/thresholds.hpp"

namespace netdiag {

namespace detail {
const std::map<std::string, std::string>& embedded_skill_files();
}

// ---------------------------------------------------------------------------
// Symptom
// ---------------------------------------------------------------------------

namespace {

const char* cluster_name(ClusterKind c) {
    switch (c) {
        case ClusterKind::none: return "none";
        case ClusterKind::host: return "host";
        case ClusterKind::dst: return "dst";
        case ClusterKind::src: return "src";
        case ClusterKind::src_partial: return "src-partial";
        case ClusterKind::subnet: return "subnet";
        case ClusterKind::path: return "path";
        case ClusterKind::resolver: return "resolver";
        case ClusterKind::record: return "record";
    }
    return "?";
}

std::string join(const std::vector<std::string>& v, const std::string& sep) {
    std::string out;
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) out += sep;
        out += v[i];
    }
    return out;
}

}  // namespace

std::string Symptom::describe() const {
    std::string out;
    if (kind == SymptomKind::scan_flag) {
        out = "flag";
        if (hint) out += std::string(" ") + to_string(*hint);
        else if (family) out += std::string(" family=") + to_string(*family);
    } else {
        out = cluster_name(cluster);
    }
    out += " {" + join(devices, ",") + "}";
    if (row_count > 0) out += " rows=" + std::to_string(row_count);
    return out;
}

// ---------------------------------------------------------------------------
// Parsing
// ---------------------------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
    size_t a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    size_t b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> tokens(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream is(line);
    std::string t;
    while (is >> t) out.push_back(t);
    return out;
}

[[noreturn]] void fail(const std::string& file, int line, const std::string& msg) {
    throw SkillError(file + ".skill:" + std::to_string(line) + ": " + msg);
}

ProbeKind probe_kind_from(const std::string& file, int line, const std::string& s) {
    static const std::map<std::string, ProbeKind> kinds = {
        {"list_ruleset", ProbeKind::list_ruleset},
        {"iface_addr", ProbeKind::iface_addr},
        {"route_table", ProbeKind::route_table},
        {"route_get", ProbeKind::route_get},
        {"arp_table", ProbeKind::arp_table},
        {"resolver_config", ProbeKind::resolver_config},
        {"ospf_neighbors", ProbeKind::ospf_neighbors},
        {"ospf_config", ProbeKind::ospf_config},
        {"bgp_summary", ProbeKind::bgp_summary},
        {"bgp_config", ProbeKind::bgp_config},
        {"qdisc_state", ProbeKind::qdisc_state},
        {"process_list", ProbeKind::process_list},
        {"socket_list", ProbeKind::socket_list},
        {"dhcp_link_log", ProbeKind::dhcp_link_log},
        {"dns_lookup", ProbeKind::dns_lookup},
        {"http_timing", ProbeKind::http_timing},
        {"resource_stats", ProbeKind::resource_stats},
    };
    auto it = kinds.find(s);
    if (it == kinds.end()) fail(file, line, "unknown probe kind '" + s + "'");
    return it->second;
}

bool valid_candidates(const std::string& s) {
    return s == "symptom" || s == "routers" || s == "hosts" || s == "subnet-peers" ||
           s.rfind("role:", 0) == 0;
}

}  // namespace

Skill parse_skill(const std::string& name, const std::string& text) {
    Skill sk;
    std::istringstream is(text);
    std::string raw;
    int ln = 0;
    enum class State { top, signals, fingerprint } state = State::top;
    Fingerprint fp;
    bool saw_localize = false;

    while (std::getline(is, raw)) {
        ++ln;
        std::string line = trim(raw);
        if (line.empty() || line[0] == '#') continue;
        auto tk = tokens(line);

        if (state == State::signals) {
            if (line == "end") state = State::top;
            else sk.signals.push_back(line);
            continue;
        }

        if (state == State::fingerprint) {
            if (tk[0] == "probe") {
                if (tk.size() < 2) fail(name, ln, "probe needs a kind");
                std::string param = tk.size() > 2 ? line.substr(line.find(tk[2])) : "";
                fp.plan.emplace_back(probe_kind_from(name, ln, tk[1]), param);
            } else if (tk[0] == "match") {
                std::string atom;
                bool negated = false;
                if (tk.size() == 3 && tk[1] == "not") {
                    atom = tk[2];
                    negated = true;
                } else if (tk.size() == 2) {
                    atom = tk[1];
                } else {
                    fail(name, ln, "match takes one atom, optionally negated with 'not'");
                }
                if (!atom_requirements().count(atom))
                    fail(name, ln, "unknown atom '" + atom + "'");
                fp.atoms.emplace_back(atom, negated);
            } else if (tk[0] == "candidates") {
                if (tk.size() != 2 || !valid_candidates(tk[1]))
                    fail(name, ln, "bad candidates selector");
                fp.candidates = tk[1];
            } else if (tk[0] == "localize") {
                if (tk.size() != 2 || tk[1] != "matched")
                    fail(name, ln, "only 'localize matched' is supported");
                saw_localize = true;
            } else if (tk[0] == "end") {
                if (fp.plan.empty()) fail(name, ln, "fingerprint has no probe plan");
                if (fp.atoms.empty()) fail(name, ln, "fingerprint has no match predicate");
                if (!saw_localize) fail(name, ln, "fingerprint has no localize rule");
                sk.fingerprints.push_back(fp);
                state = State::top;
            } else {
                fail(name, ln, "unexpected '" + tk[0] + "' inside fingerprint");
            }
            continue;
        }

        // top level
        if (tk[0] == "skill") {
            if (tk.size() != 2) fail(name, ln, "skill takes one id");
            sk.id = tk[1];
        } else if (tk[0] == "family") {
            if (tk.size() != 2) fail(name, ln, "family takes one name");
            sk.family = tk[1];
        } else if (tk[0] == "signals") {
            state = State::signals;
        } else if (tk[0] == "fingerprint") {
            if (tk.size() != 2) fail(name, ln, "fingerprint takes one label");
            auto lbl = label_from_string(tk[1]);
            if (!lbl) fail(name, ln, "unknown fault label '" + tk[1] + "'");
            fp = Fingerprint{};
            fp.label = *lbl;
            saw_localize = false;
            state = State::fingerprint;
        } else if (tk[0] == "delegate") {
            if (tk.size() != 3) fail(name, ln, "delegate takes <label> <skill>");
            auto lbl = label_from_string(tk[1]);
            if (!lbl) fail(name, ln, "unknown fault label '" + tk[1] + "'");
            sk.delegates.push_back({*lbl, tk[2]});
        } else if (tk[0] == "stop") {
            if (tk.size() != 2 || tk[1] != "first-full-match")
                fail(name, ln, "only 'stop first-full-match' is supported");
            sk.stop = tk[1];
        } else if (tk[0] == "escalate") {
            if (tk.size() != 2 || tk[1] != "return-to-index")
                fail(name, ln, "only 'escalate return-to-index' is supported");
            sk.escalate = tk[1];
        } else {
            fail(name, ln, "unexpected '" + tk[0] + "'");
        }
    }
    if (state != State::top) fail(name, ln, "unterminated block");
    if (sk.id.empty()) fail(name, 1, "missing skill id");
    if (sk.id != name) fail(name, 1, "skill id '" + sk.id + "' does not match file name");
    if (sk.family.empty()) fail(name, 1, "missing family");
    if (sk.family != "utility" && !family_from_string(sk.family))
        fail(name, 1, "unknown family '" + sk.family + "'");
    if (sk.is_utility() && !sk.fingerprints.empty())
        fail(name, 1, "utility skills cannot own fingerprints");
    return sk;
}

const std::map<std::string, std::vector<ProbeKind>>& atom_requirements() {
    static const std::map<std::string, std::vector<ProbeKind>> reqs = {
        {"ruleset_drops_arp", {ProbeKind::list_ruleset}},
        {"ruleset_drops_ospf", {ProbeKind::list_ruleset}},
        {"ruleset_drops_bgp", {ProbeKind::list_ruleset}},
        {"ruleset_drops_http", {ProbeKind::list_ruleset}},
        {"ruleset_drops_dns", {ProbeKind::list_ruleset}},
        {"ruleset_drops_icmp", {ProbeKind::list_ruleset}},
        {"frag_drop_set", {ProbeKind::list_ruleset}},
        {"iface_down_carrier", {ProbeKind::iface_addr}},
        {"iface_down_nocarrier", {ProbeKind::iface_addr}},
        {"iface_flapping", {ProbeKind::iface_addr}},
        {"addr_missing", {ProbeKind::iface_addr}},
        {"addr_mismatch", {ProbeKind::iface_addr}},
        {"addr_conflict", {ProbeKind::iface_addr}},
        {"netmask_mismatch", {ProbeKind::iface_addr}},
        {"gateway_mismatch", {ProbeKind::resolver_config}},
        {"lease_sourced_gateway", {ProbeKind::resolver_config}},
        {"static_gateway_arp", {ProbeKind::arp_table}},
        {"resolver_malformed", {ProbeKind::resolver_config}},
        {"mac_foreign", {ProbeKind::iface_addr}},
        {"arp_mirrors_own_mac", {ProbeKind::arp_table, ProbeKind::iface_addr}},
        {"dhcp_managed", {ProbeKind::resolver_config}},
        {"dhcp_starved", {ProbeKind::resolver_config, ProbeKind::dhcp_link_log}},
        {"dhcp_daemon_down", {ProbeKind::dhcp_link_log}},
        {"dhcp_pool_missing_subnet", {ProbeKind::dhcp_link_log}},
        {"dhcp_pool_gateway_mismatch", {ProbeKind::dhcp_link_log}},
        {"dhcp_pool_dns_foreign", {ProbeKind::dhcp_link_log}},
        {"dns_daemon_down", {ProbeKind::dns_lookup}},
        {"dns_zone_poisoned", {ProbeKind::dns_lookup}},
        {"dns_latency_high", {ProbeKind::dns_lookup}},
        {"http_latency_high", {ProbeKind::http_timing}},
        {"unresponsive", {ProbeKind::process_list}},
        {"frr_stack_down", {ProbeKind::process_list, ProbeKind::ospf_config, ProbeKind::bgp_config}},
        {"ospf_iface_unconfigured", {ProbeKind::ospf_config, ProbeKind::iface_addr}},
        {"ospf_area_nonzero", {ProbeKind::ospf_config, ProbeKind::iface_addr}},
        {"bgp_peer_asn_majority_mismatch", {ProbeKind::bgp_summary}},
        {"bgp_gateway_no_advertisement", {ProbeKind::bgp_config}},
        {"bgp_foreign_more_specific", {ProbeKind::bgp_config}},
        {"bgp_leak_blackholed", {ProbeKind::bgp_config, ProbeKind::route_table}},
        {"host_route_blackhole", {ProbeKind::route_table}},
        {"qdisc_corrupt", {ProbeKind::qdisc_state}},
        {"qdisc_rate_p2p", {ProbeKind::qdisc_state, ProbeKind::iface_addr}},
        {"qdisc_rate_edge", {ProbeKind::qdisc_state, ProbeKind::iface_addr}},
        {"cpu_pressure", {ProbeKind::resource_stats}},
        {"stress_present", {ProbeKind::resource_stats}},
        {"is_client", {}},
        {"is_service_host", {}},
        {"sockets_spike", {ProbeKind::socket_list}},
        {"app_delay_high", {ProbeKind::resource_stats}},
    };
    return reqs;
}

SkillSet parse_skill_set(const std::map<std::string, std::string>& files) {
    SkillSet set;
    for (const auto& [name, text] : files) {
        Skill sk = parse_skill(name, text);
        if (set.skills.count(sk.id)) throw SkillError("duplicate skill id '" + sk.id + "'");
        set.skills.emplace(sk.id, std::move(sk));
    }

    // Ownership: every catalog label claimed by exactly one fingerprint.
    for (const auto& [id, sk] : set.skills) {
        for (const auto& fp : sk.fingerprints) {
            auto [it, fresh] = set.owner.emplace(fp.label, id);
            if (!fresh)
                throw SkillError(std::string("label '") + to_string(fp.label) +
                                 "' owned by both '" + it->second + "' and '" + id + "'");
        }
    }
    std::vector<std::string> missing;
    for (FaultLabel l : all_labels())
        if (!set.owner.count(l)) missing.push_back(to_string(l));
    if (!missing.empty())
        throw SkillError("labels owned by no skill: " + join(missing, ", "));

    for (const auto& [id, sk] : set.skills) {
        for (const auto& d : sk.delegates) {
            auto it = set.owner.find(d.label);
            if (it == set.owner.end() || it->second != d.owner_skill)
                throw SkillError("skill '" + id + "' delegates '" +
                                 std::string(to_string(d.label)) + "' to '" + d.owner_skill +
                                 "', which does not own it");
            if (d.owner_skill == id)
                throw SkillError("skill '" + id + "' delegates to itself");
        }
        // Atoms known and backed by declared probes.
        for (const auto& fp : sk.fingerprints) {
            std::set<ProbeKind> planned;
            for (auto& [k, param] : fp.plan) planned.insert(k);
            for (const auto& [atom, neg] : fp.atoms) {
                auto it = atom_requirements().find(atom);
                if (it == atom_requirements().end())
                    throw SkillError("skill '" + id + "': unknown atom '" + atom + "'");
                for (ProbeKind k : it->second)
                    if (!planned.count(k))
                        throw SkillError("skill '" + id + "': atom '" + atom +
                                         "' needs probe '" + to_string(k) +
                                         "' missing from the plan");
            }
        }
    }

    // Family skills must exist for every family so the index can always route.
    for (FaultFamily f : all_families())
        if (!set.skills.count(to_string(f)))
            throw SkillError(std::string("no skill file for family '") + to_string(f) + "'");
    return set;
}

const std::map<std::string, std::string>& builtin_skill_files() {
    return detail::embedded_skill_files();
}

SkillSet load_builtin_skills() { return parse_skill_set(builtin_skill_files()); }

SkillSet load_skills_from_dir(const std::string& dir) {
    namespace fs = std::filesystem;
    std::map<std::string, std::string> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        if (e.path().extension() != ".skill") continue;
        std::ifstream in(e.path());
        std::ostringstream ss;
        ss << in.rdbuf();
        files[e.path().stem().string()] = ss.str();
    }
    if (files.empty()) throw SkillError("no .skill files in '" + dir + "'");
    return parse_skill_set(files);
}

const Skill* SkillSet::by_id(const std::string& id) const {
    auto it = skills.find(id);
    return it == skills.end() ? nullptr : &it->second;
}

const Fingerprint* SkillSet::fingerprint_for(FaultLabel label) const {
    auto it = owner.find(label);
    if (it == owner.end()) return nullptr;
    const Skill& sk = skills.at(it->second);
    for (const auto& fp : sk.fingerprints)
        if (fp.label == label) return &fp;
    return nullptr;
}

// ---------------------------------------------------------------------------
// Manifest helpers shared by atoms and the index.
// ---------------------------------------------------------------------------

namespace {

bool has_role(const Manifest& m, const std::string& dev, const std::string& role) {
    auto it = m.roles.find(dev);
    if (it == m.roles.end()) return false;
    return std::find(it->second.begin(), it->second.end(), role) != it->second.end();
}

bool plain_client(const Manifest& m, const std::string& dev) {
    auto k = m.kinds.find(dev);
    return k != m.kinds.end() && k->second == DeviceKind::host && !m.roles.count(dev);
}

const HostPlan* plan_of(const Manifest& m, const std::string& dev) {
    auto it = m.hosts.find(dev);
    return it == m.hosts.end() ? nullptr : &it->second;
}

std::set<uint32_t> role_plan_ips(const Manifest& m, const std::string& role) {
    std::set<uint32_t> out;
    for (const auto& [name, plan] : m.hosts)
        if (has_role(m, name, role)) out.insert(plan.ip.v);
    return out;
}

std::set<uint32_t> gateway_plan_ips(const Manifest& m) {
    std::set<uint32_t> out;
    for (const auto& [name, plan] : m.hosts) out.insert(plan.gateway.v);
    return out;
}

bool is_gateway_router(const Manifest& m, const std::string& dev) {
    for (const auto& [host, gw] : m.gateway_router)
        if (gw == dev) return true;
    return false;
}

Prefix plan_net(const HostPlan& p) { return Prefix{p.ip, p.prefix_len}.network(); }

// The live access interface: first entry carrying an address.
const IfaceEntry* primary_entry(const IfaceView& v) {
    for (const auto& e : v.interfaces)
        if (e.addr) return &e;
    return v.interfaces.empty() ? nullptr : &v.interfaces[0];
}

}  // namespace

// ---------------------------------------------------------------------------
// Atom evaluation
// ---------------------------------------------------------------------------

namespace {

struct AtomInput {
    const ProbeContext& ctx;
    const std::string& device;
    const Symptom& symptom;
    const std::map<std::pair<ProbeKind, std::string>, ProbeResult>& results;
};

template <typename T>
const T* view_of(const AtomInput& in, ProbeKind kind) {
    for (const auto& [key, res] : in.results)
        if (key.first == kind)
            if (const T* v = std::get_if<T>(&res)) return v;
    return nullptr;
}

bool any_unresponsive(const AtomInput& in) {
    for (const auto& [key, res] : in.results)
        if (std::holds_alternative<Unresponsive>(res)) return true;
    return false;
}

bool drops(const RulesetView& v, AclRule::Proto proto, std::optional<int> port) {
    for (const auto& c : v.chains)
        for (const auto& r : c.rules) {
            if (!r.drop) continue;
            if (r.proto != proto && r.proto != AclRule::Proto::any) continue;
            if (port && !(r.dport == *port || r.sport == *port)) continue;
            if (!port && r.proto == AclRule::Proto::any) continue;  // too generic to blame
            return true;
        }
    return false;
}

bool eval_atom(const std::string& atom, const AtomInput& in) {
    const Manifest& m = in.ctx.topo.manifest;

    if (atom == "unresponsive") return any_unresponsive(in);
    if (any_unresponsive(in)) return false;  // dead boxes match nothing else

    // --- manifest-only atoms ---
    if (atom == "is_client") return plain_client(m, in.device);
    if (atom == "is_service_host")
        return has_role(m, in.device, "dns") || has_role(m, in.device, "http") ||
               has_role(m, in.device, "dhcp") || has_role(m, in.device, "lb");

    // --- rulesets ---
    if (atom.rfind("ruleset_drops_", 0) == 0 || atom == "frag_drop_set") {
        const auto* v = view_of<RulesetView>(in, ProbeKind::list_ruleset);
        if (!v) return false;
        if (atom == "frag_drop_set") return v->frag_drop;
        if (atom == "ruleset_drops_arp") return drops(*v, AclRule::Proto::arp, {});
        if (atom == "ruleset_drops_ospf") return drops(*v, AclRule::Proto::ospf, {});
        if (atom == "ruleset_drops_icmp") return drops(*v, AclRule::Proto::icmp, {});
        if (atom == "ruleset_drops_bgp") return drops(*v, AclRule::Proto::tcp, 179);
        if (atom == "ruleset_drops_http") return drops(*v, AclRule::Proto::tcp, 80);
        if (atom == "ruleset_drops_dns")
            return drops(*v, AclRule::Proto::udp, 53) || drops(*v, AclRule::Proto::tcp, 53);
        return false;
    }

    // --- interfaces ---
    if (atom == "iface_down_carrier" || atom == "iface_down_nocarrier" ||
        atom == "iface_flapping" || atom == "addr_missing" || atom == "addr_mismatch" ||
        atom == "addr_conflict" || atom == "netmask_mismatch" || atom == "mac_foreign") {
        const auto* v = view_of<IfaceView>(in, ProbeKind::iface_addr);
        if (!v) return false;
        if (atom == "iface_down_carrier" || atom == "iface_down_nocarrier") {
            for (const auto& e : v->interfaces) {
                if (!e.addr || !e.admin_up || e.oper_up) continue;
                if (atom == "iface_down_carrier" && e.carrier) return true;
                if (atom == "iface_down_nocarrier" && !e.carrier) return true;
            }
            return false;
        }
        if (atom == "iface_flapping") {
            for (const auto& e : v->interfaces)
                if (e.addr && e.carrier_transitions >= kFlapTransitionThreshold) return true;
            return false;
        }
        const HostPlan* plan = plan_of(m, in.device);
        const IfaceEntry* pe = primary_entry(*v);
        if (atom == "addr_missing") return pe == nullptr || !pe->addr;
        if (!plan || !pe || !pe->addr) return false;
        if (atom == "addr_mismatch") return !(*pe->addr == plan->ip);
        if (atom == "addr_conflict") {
            if (*pe->addr == plan->ip) return false;
            for (const auto& [other, oplan] : m.hosts)
                if (other != in.device && oplan.ip == *pe->addr) return true;
            return false;
        }
        if (atom == "netmask_mismatch")
            return *pe->addr == plan->ip && pe->prefix_len != plan->prefix_len;
        if (atom == "mac_foreign") {
            auto it = m.macs.find(in.device);
            return it != m.macs.end() && !pe->mac.empty() && pe->mac != it->second;
        }
        return false;
    }

    // --- arp ---
    if (atom == "static_gateway_arp" || atom == "arp_mirrors_own_mac") {
        const auto* v = view_of<ArpTableView>(in, ProbeKind::arp_table);
        if (!v) return false;
        if (atom == "static_gateway_arp") {
            const HostPlan* plan = plan_of(m, in.device);
            if (!plan) return false;
            for (const auto& e : v->entries)
                if (e.is_static && e.ip == plan->gateway) return true;
            return false;
        }
        // arp_mirrors_own_mac: a neighbor resolves to our own hardware address.
        const auto* iv = view_of<IfaceView>(in, ProbeKind::iface_addr);
        const IfaceEntry* pe = iv ? primary_entry(*iv) : nullptr;
        if (!pe || pe->mac.empty()) return false;
        for (const auto& e : v->entries)
            if (e.mac == pe->mac) return true;
        return false;
    }

    // --- host network config ---
    if (atom == "gateway_mismatch" || atom == "lease_sourced_gateway" ||
        atom == "resolver_malformed" || atom == "dhcp_managed") {
        const auto* v = view_of<ResolverView>(in, ProbeKind::resolver_config);
        if (!v) return false;
        if (atom == "dhcp_managed") return v->dhcp_managed;
        if (atom == "resolver_malformed") {
            if (v->resolvers.empty()) return true;
            for (const auto& r : v->resolvers)
                if (!Ipv4::parse(r)) return true;
            return false;
        }
        const HostPlan* plan = plan_of(m, in.device);
        if (!plan) return false;
        if (atom == "gateway_mismatch") return !v->gateway || !(*v->gateway == plan->gateway);
        // lease_sourced_gateway: the bad gateway came from the lease.
        return v->lease_gateway && v->gateway && *v->lease_gateway == *v->gateway &&
               !(*v->gateway == plan->gateway);
    }

    // --- dhcp state ---
    if (atom.rfind("dhcp_", 0) == 0) {
        const auto* v = view_of<DhcpLinkLogView>(in, ProbeKind::dhcp_link_log);
        if (!v) return false;
        if (atom == "dhcp_starved") {
            const auto* rv = view_of<ResolverView>(in, ProbeKind::resolver_config);
            return rv && rv->dhcp_managed && !v->lease_present;
        }
        if (atom == "dhcp_daemon_down")
            return has_role(m, in.device, "dhcp") && !v->server_daemon_up;
        if (atom == "dhcp_pool_missing_subnet") {
            auto it = m.roles.find(in.device);
            if (it == m.roles.end()) return false;
            for (const auto& role : it->second) {
                if (role.rfind("dhcp-subnet:", 0) != 0) continue;
                auto want = Prefix::parse(role.substr(12));
                if (!want) continue;
                bool served = false;
                for (const auto& s : v->served)
                    if (s.prefix.network() == want->network()) served = true;
                if (!served) return true;
            }
            return false;
        }
        if (atom == "dhcp_pool_gateway_mismatch") {
            for (const auto& s : v->served)
                for (const auto& [host, plan] : m.hosts)
                    if (plan_net(plan) == s.prefix.network() && !(s.gateway == plan.gateway))
                        return true;
            return false;
        }
        if (atom == "dhcp_pool_dns_foreign") {
            auto pods = role_plan_ips(m, "dns");
            for (const auto& s : v->served)
                if (!pods.count(s.dns.v)) return true;
            return false;
        }
        return false;
    }

    // --- dns service ---
    if (atom.rfind("dns_", 0) == 0) {
        const auto* v = view_of<DnsLookupView>(in, ProbeKind::dns_lookup);
        if (!v) return false;
        if (atom == "dns_daemon_down") return v->rcode == "refused";
        if (atom == "dns_zone_poisoned")
            return v->rcode == "noerror" && !v->ok && v->answer && *v->answer == Ipv4(0, 0, 0, 0);
        if (atom == "dns_latency_high")
            return v->rcode == "noerror" && v->latency_ms > kDnsLatencyThresholdMs;
        return false;
    }

    // --- http / lb ---
    if (atom == "http_latency_high") {
        const auto* v = view_of<HttpTimingView>(in, ProbeKind::http_timing);
        return v && v->status == "ok" && v->latency_ms > kHttpLatencyThresholdMs;
    }

    // --- routing stacks ---
    if (atom == "frr_stack_down") {
        const auto* p = view_of<ProcessListView>(in, ProbeKind::process_list);
        const auto* oc = view_of<OspfConfigView>(in, ProbeKind::ospf_config);
        const auto* bc = view_of<BgpConfigView>(in, ProbeKind::bgp_config);
        if (!p) return false;
        bool configured = (oc && oc->configured) || (bc && bc->configured);
        if (!configured) return false;
        for (const auto& pr : p->processes)
            if (pr.name == "zebra") return false;
        return true;
    }
    if (atom == "ospf_iface_unconfigured" || atom == "ospf_area_nonzero") {
        const auto* oc = view_of<OspfConfigView>(in, ProbeKind::ospf_config);
        const auto* iv = view_of<IfaceView>(in, ProbeKind::iface_addr);
        if (!oc || !iv || !oc->configured || !oc->daemon_up) return false;
        for (const auto& e : iv->interfaces) {
            if (!e.addr || e.prefix_len != 30) continue;  // point-to-point legs only
            auto it = oc->areas.find(e.name);
            if (atom == "ospf_iface_unconfigured" && it == oc->areas.end()) return true;
            if (atom == "ospf_area_nonzero" && it != oc->areas.end() && it->second != 0)
                return true;
        }
        return false;
    }
    if (atom == "bgp_peer_asn_majority_mismatch") {
        const auto* v = view_of<BgpSummaryView>(in, ProbeKind::bgp_summary);
        if (!v || !v->daemon_up || v->sessions.empty()) return false;
        int bad = 0;
        for (const auto& s : v->sessions)
            if (!s.established && s.reason.find("asn") != std::string::npos) ++bad;
        return 2 * bad > int(v->sessions.size());
    }
    if (atom == "bgp_gateway_no_advertisement") {
        const auto* v = view_of<BgpConfigView>(in, ProbeKind::bgp_config);
        return v && v->configured && v->daemon_up && v->advertised.empty() &&
               is_gateway_router(m, in.device);
    }
    if (atom == "bgp_foreign_more_specific" || atom == "bgp_leak_blackholed") {
        const auto* v = view_of<BgpConfigView>(in, ProbeKind::bgp_config);
        if (!v || !v->configured) return false;
        for (const auto& p : v->advertised) {
            bool foreign = false;
            for (const auto& [host, plan] : m.hosts) {
                Prefix net = plan_net(plan);
                if (p.len <= net.len || !net.contains(p.addr)) continue;
                auto gw = m.gateway_router.find(host);
                if (gw != m.gateway_router.end() && gw->second != in.device) foreign = true;
            }
            if (!foreign) continue;
            if (atom == "bgp_foreign_more_specific") return true;
            const auto* rt = view_of<RouteTableView>(in, ProbeKind::route_table);
            if (!rt) return false;
            for (const auto& r : rt->routes)
                if (r.blackhole && r.prefix.network() == p.network()) return true;
        }
        return false;
    }
    if (atom == "host_route_blackhole") {
        const auto* v = view_of<RouteTableView>(in, ProbeKind::route_table);
        if (!v) return false;
        for (const auto& r : v->routes)
            if (r.blackhole) return true;
        return false;
    }

    // --- queues ---
    if (atom.rfind("qdisc_", 0) == 0) {
        const auto* v = view_of<QdiscView>(in, ProbeKind::qdisc_state);
        if (!v) return false;
        if (atom == "qdisc_corrupt") {
            for (const auto& e : v->entries)
                if (e.qdisc.kind == Qdisc::Kind::corrupt) return true;
            return false;
        }
        const auto* iv = view_of<IfaceView>(in, ProbeKind::iface_addr);
        if (!iv) return false;
        auto gw_ips = gateway_plan_ips(m);
        for (const auto& e : v->entries) {
            if (e.qdisc.kind != Qdisc::Kind::rate_limit) continue;
            bool edge = false;
            for (const auto& ie : iv->interfaces)
                if (ie.name == e.iface && ie.addr && gw_ips.count(ie.addr->v)) edge = true;
            if (atom == "qdisc_rate_edge" && edge) return true;
            if (atom == "qdisc_rate_p2p" && !edge) return true;
        }
        return false;
    }

    // --- endpoint pressure ---
    if (atom == "cpu_pressure" || atom == "stress_present" || atom == "app_delay_high") {
        const auto* v = view_of<ResourceStatsView>(in, ProbeKind::resource_stats);
        if (!v) return false;
        if (atom == "cpu_pressure") return v->cpu_load >= kCpuThreshold;
        if (atom == "stress_present") return !v->stress_processes.empty();
        return v->app_delay_ms >= kAppDelayThresholdMs;
    }
    if (atom == "sockets_spike") {
        const auto* v = view_of<SocketListView>(in, ProbeKind::socket_list);
        return v && v->open_count >= kSocketSpikeThreshold;
    }

    throw SkillError("unknown atom '" + atom + "'");
}

}  // namespace

// ---------------------------------------------------------------------------
// Candidates, ordering, execution
// ---------------------------------------------------------------------------

std::vector<std::string> resolve_candidates(const ProbeContext& ctx, const Fingerprint& fp,
                                            const Symptom& s) {
    const Manifest& m = ctx.topo.manifest;
    std::set<std::string> out;

    if (fp.candidates == "routers") {
        for (const auto& [name, k] : m.kinds)
            if (k == DeviceKind::router) out.insert(name);
    } else if (fp.candidates == "hosts") {
        for (const auto& [name, plan] : m.hosts) out.insert(name);
    } else if (fp.candidates.rfind("role:", 0) == 0) {
        std::string role = fp.candidates.substr(5);
        for (const auto& [name, roles] : m.roles)
            if (has_role(m, name, role)) out.insert(name);
    } else if (fp.candidates == "subnet-peers") {
        std::set<uint32_t> nets;
        for (const auto& d : s.devices)
            if (const HostPlan* p = plan_of(m, d)) nets.insert(plan_net(*p).addr.v);
        for (const auto& [name, plan] : m.hosts)
            if (nets.count(plan_net(plan).addr.v)) out.insert(name);
    } else {  // symptom
        for (const auto& d : s.devices) out.insert(d);
        if (out.empty()) {
            // No evidence devices: fall back to the family's device class.
            FaultFamily f = family_of(fp.label);
            bool router_side = f == FaultFamily::link || f == FaultFamily::acl ||
                               f == FaultFamily::tc || f == FaultFamily::ospf ||
                               f == FaultFamily::bgp;
            for (const auto& [name, k] : m.kinds)
                if ((k == DeviceKind::router) == router_side &&
                    (router_side || k == DeviceKind::host))
                    out.insert(name);
        }
    }
    return {out.begin(), out.end()};
}

std::vector<const Fingerprint*> fingerprint_order(const SkillSet& set, const Skill& skill,
                                                  std::optional<FaultLabel> hint) {
    std::vector<const Fingerprint*> out;
    auto push = [&](const Fingerprint* fp) {
        if (fp && std::find(out.begin(), out.end(), fp) == out.end()) out.push_back(fp);
    };
    if (hint) {
        // The hinted label's fingerprint leads when this skill owns or delegates it.
        for (const auto& fp : skill.fingerprints)
            if (fp.label == *hint) push(&fp);
        for (const auto& d : skill.delegates)
            if (d.label == *hint) push(set.fingerprint_for(d.label));
    }
    for (const auto& fp : skill.fingerprints) push(&fp);
    for (const auto& d : skill.delegates) push(set.fingerprint_for(d.label));
    return out;
}

std::optional<SkillMatch> attempt_fingerprint(const ProbeContext& ctx, ToolCallLedger& ledger,
                                              const Fingerprint& fp, const Symptom& s) {
    std::vector<std::string> matched;
    std::string why;
    for (const auto& dev : resolve_candidates(ctx, fp, s)) {
        std::map<std::pair<ProbeKind, std::string>, ProbeResult> results;
        for (const auto& [kind, param] : fp.plan)
            results.emplace(std::make_pair(kind, param), run_probe(ctx, ledger, dev, kind, param));
        AtomInput in{ctx, dev, s, results};
        bool all = true;
        for (const auto& [atom, negated] : fp.atoms) {
            bool v = eval_atom(atom, in);
            if (v == negated) {
                all = false;
                break;
            }
        }
        if (all) {
            matched.push_back(dev);
            if (why.empty()) {
                for (const auto& [atom, negated] : fp.atoms) {
                    if (!why.empty()) why += " & ";
                    why += (negated ? "!" : "") + atom;
                }
            }
        }
    }
    if (matched.empty()) return std::nullopt;
    std::sort(matched.begin(), matched.end());
    return SkillMatch{fp.label, matched, why};
}

// ---------------------------------------------------------------------------
// Fault index
// ---------------------------------------------------------------------------

namespace {

template <typename T>
const T* probe_as(const ProbeContext& ctx, ToolCallLedger& ledger, ProbeResult& store,
                  const std::string& dev, ProbeKind kind, const std::string& param = "") {
    store = run_probe(ctx, ledger, dev, kind, param);
    return std::get_if<T>(&store);
}

// Which label a drop ruleset points at, for guard hints.
std::optional<FaultLabel> acl_hint(const RulesetView& v) {
    if (drops(v, AclRule::Proto::arp, {})) return FaultLabel::arp_acl_block;
    if (drops(v, AclRule::Proto::ospf, {})) return FaultLabel::ospf_acl_block;
    if (drops(v, AclRule::Proto::tcp, 179)) return FaultLabel::bgp_acl_block;
    if (drops(v, AclRule::Proto::tcp, 80)) return FaultLabel::http_acl_block;
    if (drops(v, AclRule::Proto::udp, 53) || drops(v, AclRule::Proto::tcp, 53))
        return FaultLabel::dns_port_blocked;
    if (drops(v, AclRule::Proto::icmp, {})) return FaultLabel::icmp_acl_block;
    if (v.frag_drop) return FaultLabel::link_fragmentation_disabled;
    return std::nullopt;
}

bool any_drop_rules(const RulesetView& v) {
    if (v.frag_drop) return true;
    for (const auto& c : v.chains)
        for (const auto& r : c.rules)
            if (r.drop) return true;
    return false;
}

Route route_host_guards(const ProbeContext& ctx, ToolCallLedger& ledger, const Symptom& s,
                        const std::string& rule) {
    const Manifest& m = ctx.topo.manifest;
    const std::string& h = s.devices.front();
    ProbeResult store;

    // Dead box?
    {
        store = run_probe(ctx, ledger, h, ProbeKind::process_list);
        if (std::holds_alternative<Unresponsive>(store))
            return {"host_crash", FaultLabel::host_crash, rule};
    }

    const HostPlan* plan = plan_of(m, h);
    bool managed = false;

    // Address against the plan.
    if (const auto* iv = probe_as<IfaceView>(ctx, ledger, store, h, ProbeKind::iface_addr)) {
        const IfaceEntry* pe = primary_entry(*iv);
        ProbeResult rstore;
        const auto* rv =
            probe_as<ResolverView>(ctx, ledger, rstore, h, ProbeKind::resolver_config);
        managed = rv && rv->dhcp_managed;
        if (!pe || !pe->addr) {
            // A managed host with no lease was starved by its server; one
            // still holding a lease dropped the address itself.
            if (managed && rv && !rv->lease_gateway) return {"dhcp", std::nullopt, rule};
            return {"host_ip", FaultLabel::host_missing_ip, rule};
        }
        if (plan && !(*pe->addr == plan->ip)) {
            for (const auto& [other, oplan] : m.hosts)
                if (other != h && oplan.ip == *pe->addr)
                    return {"host_ip", FaultLabel::host_ip_conflict, rule};
            return {"host_ip", FaultLabel::host_wrong_ip, rule};
        }
        if (plan && pe->prefix_len != plan->prefix_len)
            return {"host_ip", FaultLabel::host_wrong_netmask, rule};
        // Gateway against the plan.
        if (rv && plan && (!rv->gateway || !(*rv->gateway == plan->gateway))) {
            if (rv->lease_gateway && rv->gateway && *rv->lease_gateway == *rv->gateway)
                return {"dhcp", FaultLabel::dhcp_spoofed_subnet, rule};
            return {"host_ip", FaultLabel::host_wrong_gateway, rule};
        }
    }

    // Poisoned neighbor table.
    std::string own_mac;
    if (auto mit = m.macs.find(h); mit != m.macs.end()) own_mac = mit->second;
    if (const auto* av = probe_as<ArpTableView>(ctx, ledger, store, h, ProbeKind::arp_table)) {
        if (plan) {
            for (const auto& e : av->entries) {
                if (e.is_static && e.ip == plan->gateway)
                    return {"host_ip", FaultLabel::host_static_arp, rule};
                if (e.ip == plan->ip) return {"host_ip", FaultLabel::host_ip_conflict, rule};
                if (!own_mac.empty() && e.mac == own_mac)
                    return {"mac_conflict", FaultLabel::mac_address_conflict, rule};
            }
        }
    }

    // Local packet filters.
    if (const auto* fv = probe_as<RulesetView>(ctx, ledger, store, h, ProbeKind::list_ruleset)) {
        if (auto hint = acl_hint(*fv)) return {"acl", hint, rule};
        if (any_drop_rules(*fv)) return {"acl", std::nullopt, rule};
    }

    // Self-inflicted null route toward the failing destination.
    std::optional<Ipv4> target = s.sample_dst_ip;
    if (!target && plan) {
        for (const auto& [other, oplan] : m.hosts)
            if (!(plan_net(oplan) == plan_net(*plan))) {
                target = oplan.ip;
                break;
            }
    }
    if (target) {
        if (const auto* gv = probe_as<RouteGetView>(ctx, ledger, store, h, ProbeKind::route_get,
                                                    target->str())) {
            if (gv->blackhole) return {"bgp", FaultLabel::host_static_blackhole, rule};
        }
    }

    if (managed) return {"dhcp", std::nullopt, rule};
    return {"broad-search", std::nullopt, rule};
}

}  // namespace

Route map_symptom(const ProbeContext& ctx, ToolCallLedger& ledger, const Symptom& s,
                  const SkillSet& skills) {
    const Manifest& m = ctx.topo.manifest;
    ProbeResult store;

    // R1: an adjacency-loss flag may really be a dead link under the routing.
    if (s.kind == SymptomKind::scan_flag && s.hint == FaultLabel::ospf_neighbor_missing &&
        !s.devices.empty()) {
        if (const auto* iv = probe_as<IfaceView>(ctx, ledger, store, s.devices.front(),
                                                 ProbeKind::iface_addr)) {
            for (const auto& e : iv->interfaces) {
                if (!e.addr || !e.admin_up) continue;
                if (e.carrier_transitions >= kFlapTransitionThreshold)
                    return {"link", FaultLabel::link_flap, "R1"};
                if (!e.oper_up)
                    return {"link",
                            e.carrier ? FaultLabel::link_down : FaultLabel::link_detach, "R1"};
            }
        }
        return {"ospf", FaultLabel::ospf_neighbor_missing, "R1"};
    }

    // R2: labeled flags go straight to the owning skill.
    if (s.kind == SymptomKind::scan_flag && s.hint) {
        auto it = skills.owner.find(*s.hint);
        if (it != skills.owner.end()) return {it->second, s.hint, "R2"};
    }

    // R3: family-only flags go to the family skill.
    if (s.kind == SymptomKind::scan_flag && s.family)
        return {to_string(*s.family), std::nullopt, "R3"};

    // R4: resolution failures split host config / lease spoofing / dns service.
    if (s.cluster == ClusterKind::record)
        return {"dns", FaultLabel::dns_record_error, "R4"};
    if (s.cluster == ClusterKind::resolver && !s.devices.empty()) {
        const std::string& src = s.sample_src.value_or(s.devices.front());
        if (const auto* rv =
                probe_as<ResolverView>(ctx, ledger, store, src, ProbeKind::resolver_config)) {
            bool malformed = rv->resolvers.empty();
            std::vector<Ipv4> parsed;
            for (const auto& r : rv->resolvers) {
                auto ip = Ipv4::parse(r);
                if (!ip) malformed = true;
                else parsed.push_back(*ip);
            }
            if (malformed) return {"host_ip", FaultLabel::host_incorrect_dns, "R4"};
            auto pods = role_plan_ips(m, "dns");
            bool foreign = false;
            for (const auto& ip : parsed)
                if (!pods.count(ip.v)) foreign = true;
            if (foreign && rv->lease_dns)
                return {"dhcp", FaultLabel::dhcp_spoofed_dns, "R4"};
            return {"dns", std::nullopt, "R4"};
        }
        return {"dns", std::nullopt, "R4"};
    }

    // R5/R6: single-host clusters walk the host-side guard chain.
    if ((s.cluster == ClusterKind::host || s.cluster == ClusterKind::dst ||
         s.cluster == ClusterKind::src || s.cluster == ClusterKind::src_partial) &&
        !s.devices.empty())
        return route_host_guards(ctx, ledger, s, "R5");

    // R7: shared-transit clusters inspect each transit candidate in order.
    if (s.cluster == ClusterKind::path) {
        int inspected = 0;
        for (const auto& c : s.devices) {
            if (++inspected > 8) break;
            if (m.kinds.count(c) && m.kinds.at(c) == DeviceKind::host) continue;
            if (const auto* iv =
                    probe_as<IfaceView>(ctx, ledger, store, c, ProbeKind::iface_addr)) {
                for (const auto& e : iv->interfaces) {
                    if (!e.addr || !e.admin_up) continue;
                    if (e.carrier_transitions >= kFlapTransitionThreshold)
                        return {"link", FaultLabel::link_flap, "R7"};
                    if (!e.oper_up)
                        return {"link",
                                e.carrier ? FaultLabel::link_down : FaultLabel::link_detach,
                                "R7"};
                }
            }
            if (const auto* qv =
                    probe_as<QdiscView>(ctx, ledger, store, c, ProbeKind::qdisc_state)) {
                for (const auto& e : qv->entries) {
                    if (e.qdisc.kind == Qdisc::Kind::corrupt)
                        return {"tc", FaultLabel::link_high_packet_corruption, "R7"};
                    if (e.qdisc.kind == Qdisc::Kind::rate_limit)
                        return {"tc", std::nullopt, "R7"};
                }
            }
            if (const auto* fv =
                    probe_as<RulesetView>(ctx, ledger, store, c, ProbeKind::list_ruleset)) {
                if (auto hint = acl_hint(*fv)) return {"acl", hint, "R7"};
                if (any_drop_rules(*fv)) return {"acl", std::nullopt, "R7"};
            }
            if (const auto* bv =
                    probe_as<BgpSummaryView>(ctx, ledger, store, c, ProbeKind::bgp_summary)) {
                if (!bv->sessions.empty() || bv->daemon_up) {
                    if (!bv->daemon_up) return {"bgp", FaultLabel::frr_service_down, "R7"};
                    bool down = false, asn = false;
                    for (const auto& e : bv->sessions) {
                        if (!e.established) down = true;
                        if (!e.established && e.reason.find("asn") != std::string::npos)
                            asn = true;
                    }
                    if (asn) return {"bgp", FaultLabel::bgp_asn_misconfig, "R7"};
                    if (down) return {"bgp", std::nullopt, "R7"};
                }
            }
            if (const auto* ov = probe_as<OspfNeighborsView>(ctx, ledger, store, c,
                                                             ProbeKind::ospf_neighbors)) {
                ProbeResult cstore;
                const auto* oc =
                    probe_as<OspfConfigView>(ctx, ledger, cstore, c, ProbeKind::ospf_config);
                if (oc && oc->configured) {
                    if (!oc->daemon_up) return {"ospf", FaultLabel::frr_service_down, "R7"};
                    int expected = 0;
                    for (const auto& [a, b] : m.links) {
                        const std::string& peer = a == c ? b : (b == c ? a : "");
                        if (!peer.empty() && m.kinds.count(peer) &&
                            m.kinds.at(peer) == DeviceKind::router)
                            ++expected;
                    }
                    if (int(ov->neighbors.size()) < expected)
                        return {"ospf", std::nullopt, "R7"};
                }
            }
        }
        return {"broad-search", std::nullopt, "R7"};
    }

    // R8: a whole subnet cut off points at its gateway's control plane.
    if (s.cluster == ClusterKind::subnet && !s.devices.empty()) {
        std::string gw;
        for (const auto& d : s.devices) {
            auto gwit = m.gateway_router.find(d);
            if (gwit != m.gateway_router.end()) {
                gw = gwit->second;
                break;
            }
        }
        if (!gw.empty()) {
            if (const auto* fv =
                    probe_as<RulesetView>(ctx, ledger, store, gw, ProbeKind::list_ruleset)) {
                if (auto hint = acl_hint(*fv)) return {"acl", hint, "R8"};
            }
            if (const auto* bc =
                    probe_as<BgpConfigView>(ctx, ledger, store, gw, ProbeKind::bgp_config)) {
                if (bc->configured) {
                    if (bc->advertised.empty() && bc->daemon_up)
                        return {"bgp", FaultLabel::bgp_missing_route_advertisement, "R8"};
                    return {"bgp", std::nullopt, "R8"};
                }
            }
            if (const auto* oc =
                    probe_as<OspfConfigView>(ctx, ledger, store, gw, ProbeKind::ospf_config)) {
                if (oc->configured) return {"ospf", std::nullopt, "R8"};
            }
            if (const auto* iv =
                    probe_as<IfaceView>(ctx, ledger, store, gw, ProbeKind::iface_addr)) {
                for (const auto& e : iv->interfaces)
                    if (e.addr && e.admin_up && !e.oper_up)
                        return {"link",
                                e.carrier ? FaultLabel::link_down : FaultLabel::link_detach,
                                "R8"};
            }
        }
        return {"broad-search", std::nullopt, "R8"};
    }

    return {"broad-search", std::nullopt, "fallback"};
}

// ---------------------------------------------------------------------------
// Submissions
// ---------------------------------------------------------------------------

Submission canonicalize(const SkillMatch& match) {
    Submission s;
    s.is_anomaly = true;
    s.labels = {to_string(match.label)};
    s.devices = match.devices;
    std::sort(s.devices.begin(), s.devices.end());
    s.devices.erase(std::unique(s.devices.begin(), s.devices.end()), s.devices.end());
    return s;
}

Submission benign_submission() { return Submission{false, {}, {}}; }

}  // namespace netdiag
