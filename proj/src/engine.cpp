#include "netdiag/engine.hpp"

#include <algorithm>
#include <map>
#include <queue>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace netdiag {

// ---------------------------------------------------------------------------
// Trace rendering
// ---------------------------------------------------------------------------

std::vector<std::string> SessionTrace::lines() const {
    std::vector<std::string> out;
    out.reserve(events.size());
    for (const auto& e : events)
        out.push_back("T" + std::to_string(e.turn) + " " + e.kind + ": " + e.detail);
    return out;
}

std::string SessionTrace::text() const {
    std::string out;
    for (const auto& l : lines()) {
        out += l;
        out += '\n';
    }
    std::ostringstream tail;
    tail << "-- outcome: " << outcome << "; turns " << turns_used << "; tool calls "
         << tool_calls << "\n";
    return out + tail.str();
}

std::string SessionTrace::json() const {
    nlohmann::json j;
    j["outcome"] = outcome;
    j["turns_used"] = turns_used;
    j["tool_calls"] = tool_calls;
    j["events"] = nlohmann::json::array();
    for (const auto& e : events)
        j["events"].push_back({{"turn", e.turn}, {"kind", e.kind}, {"detail", e.detail}});
    return j.dump(2);
}

// ---------------------------------------------------------------------------
// Structural paths
// ---------------------------------------------------------------------------

namespace {

std::map<std::string, int> bfs_dist(const std::map<std::string, std::vector<std::string>>& adj,
                                    const std::string& start) {
    std::map<std::string, int> dist;
    std::queue<std::string> q;
    dist[start] = 0;
    q.push(start);
    while (!q.empty()) {
        std::string cur = q.front();
        q.pop();
        auto it = adj.find(cur);
        if (it == adj.end()) continue;
        for (const auto& nb : it->second)
            if (!dist.count(nb)) {
                dist[nb] = dist[cur] + 1;
                q.push(nb);
            }
    }
    return dist;
}

std::map<std::string, std::vector<std::string>> wiring_adjacency(const Manifest& m) {
    std::map<std::string, std::vector<std::string>> adj;
    for (const auto& [a, b] : m.links) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    return adj;
}

}  // namespace

std::vector<std::string> shortest_path_dag(const Manifest& m, const std::string& src,
                                           const std::string& dst) {
    auto adj = wiring_adjacency(m);
    auto ds = bfs_dist(adj, src);
    auto dd = bfs_dist(adj, dst);
    auto it = ds.find(dst);
    if (it == ds.end()) return {};  // disconnected wiring
    int total = it->second;
    std::vector<std::string> out;
    for (const auto& [dev, d1] : ds) {
        auto jt = dd.find(dev);
        if (jt != dd.end() && d1 + jt->second == total) out.push_back(dev);
    }
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// Symptom extraction
// ---------------------------------------------------------------------------

namespace {

struct RowRef {
    const ReachabilityEntry* e = nullptr;
    bool claimed = false;
    bool unknown() const { return e->status == "unknown"; }
};

Prefix net_of(const Manifest& m, const std::string& host) {
    const HostPlan& p = m.hosts.at(host);
    return Prefix{p.ip, p.prefix_len}.network();
}

std::vector<std::string> dns_pod_names(const Manifest& m) {
    std::vector<std::string> out;
    for (const auto& [name, roles] : m.roles)
        for (const auto& r : roles)
            if (r == "dns") out.push_back(name);
    std::sort(out.begin(), out.end());
    return out;
}

// Manifest address of the first destination outside src's subnet among its
// bad rows; falls back to the first bad row's address.
std::optional<Ipv4> offsubnet_sample(const Manifest& m, const std::vector<RowRef>& rows,
                                     const std::string& src) {
    std::optional<Ipv4> fallback;
    bool have_net = m.hosts.count(src) > 0;
    Prefix mine = have_net ? net_of(m, src) : Prefix{};
    for (const auto& r : rows) {
        if (r.claimed || r.e->source != src || r.e->status == "ok") continue;
        auto it = m.hosts.find(r.e->destination);
        if (it == m.hosts.end()) continue;
        Ipv4 ip = it->second.ip;
        if (!fallback) fallback = ip;
        if (have_net && !(Prefix{ip, it->second.prefix_len}.network() == mine)) return ip;
    }
    return fallback;
}

}  // namespace

std::vector<Symptom> extract_symptoms(const ProbeContext& ctx, ToolCallLedger& ledger,
                                      const ReachabilityMatrix& matrix) {
    const Manifest& m = ctx.topo.manifest;
    std::vector<std::string> hosts = ctx.topo.host_names();
    const int n = int(hosts.size());
    std::vector<RowRef> rows;
    rows.reserve(matrix.entries.size());
    for (const auto& e : matrix.entries) rows.push_back({&e, false});

    bool any_bad = false;
    for (const auto& r : rows)
        if (r.e->status != "ok") any_bad = true;
    if (!any_bad) return {};

    std::vector<Symptom> out;

    auto unclaimed_bad = [&](auto pred) {
        int c = 0;
        for (const auto& r : rows)
            if (!r.claimed && r.e->status != "ok" && pred(*r.e)) ++c;
        return c;
    };
    auto claim = [&](auto pred) {
        int c = 0;
        for (auto& r : rows)
            if (!r.claimed && pred(*r.e)) {
                r.claimed = true;
                ++c;
            }
        return c;
    };
    auto touches = [](const ReachabilityEntry& e, const std::string& h) {
        return e.source == h || e.destination == h;
    };

    // --- 1. fully dark hosts: every row in and out is bad ---
    for (const auto& h : hosts) {
        int in_bad = unclaimed_bad([&](const ReachabilityEntry& e) { return e.destination == h; });
        int out_bad = unclaimed_bad([&](const ReachabilityEntry& e) { return e.source == h; });
        if (n >= 2 && in_bad == n - 1 && out_bad == n - 1) {
            Symptom s;
            s.kind = SymptomKind::reachability_fail;
            s.cluster = ClusterKind::host;
            s.devices = {h};
            for (const auto& r : rows)
                if (!r.claimed && r.e->destination == h && r.e->status != "ok" &&
                    !s.sample_src) {
                    s.sample_src = r.e->source;
                    s.sample_dst = h;
                    s.sample_dst_ip = r.e->dest_ip;
                }
            if (!s.sample_dst_ip && m.hosts.count(h)) s.sample_dst_ip = m.hosts.at(h).ip;
            s.row_count = claim([&](const ReachabilityEntry& e) {
                return touches(e, h) && e.status != "ok";
            });
            s.evidence.push_back("all rows to and from " + h + " failing");
            out.push_back(std::move(s));
        }
    }

    // --- 2. sources that cannot resolve anything ---
    std::vector<std::string> dark_srcs;
    for (const auto& h : hosts) {
        int bad = unclaimed_bad([&](const ReachabilityEntry& e) { return e.source == h; });
        int unk = unclaimed_bad(
            [&](const ReachabilityEntry& e) { return e.source == h && e.status == "unknown"; });
        if (bad > 0 && bad == unk && unk >= n - 1) dark_srcs.push_back(h);
    }
    if (!dark_srcs.empty()) {
        std::vector<std::string> resolver_srcs;
        bool storm = int(dark_srcs.size()) * 2 >= n;
        auto classify = [&](const std::string& src) -> bool {
            // true = name plane only (forwarding works)
            auto sample = offsubnet_sample(m, rows, src);
            if (!sample) return true;
            ReachabilityEntry e = ping_direct_ip(ctx, ledger, src, *sample);
            return e.status == "ok";
        };
        if (storm) {
            // One representative probe settles the whole cluster.
            if (classify(dark_srcs.front())) resolver_srcs = dark_srcs;
            // else: forwarding itself is broken; rows fall through to the
            // structural stages below.
        } else {
            for (const auto& src : dark_srcs) {
                if (classify(src)) {
                    resolver_srcs.push_back(src);
                } else {
                    Symptom s;
                    s.kind = SymptomKind::reachability_fail;
                    s.cluster = ClusterKind::src;
                    s.devices = {src};
                    s.sample_src = src;
                    s.sample_dst_ip = offsubnet_sample(m, rows, src);
                    s.row_count = claim([&](const ReachabilityEntry& e) {
                        return touches(e, src) && e.status != "ok";
                    });
                    s.evidence.push_back(src + " cannot reach beyond its segment");
                    s.confirmed = true;  // the direct probe just failed
                    out.push_back(std::move(s));
                }
            }
        }
        if (!resolver_srcs.empty()) {
            Symptom s;
            s.kind = SymptomKind::reachability_unknown;
            s.cluster = ClusterKind::resolver;
            s.devices = resolver_srcs;
            s.sample_src = resolver_srcs.front();
            int claimed = 0;
            for (const auto& src : resolver_srcs)
                claimed += claim([&](const ReachabilityEntry& e) {
                    return e.source == src && e.status == "unknown";
                });
            s.row_count = claimed;
            s.evidence.push_back("name resolution dead at " +
                                 std::to_string(resolver_srcs.size()) +
                                 " source(s); direct-address forwarding intact");
            s.confirmed = true;  // the direct probe just succeeded
            out.push_back(std::move(s));
        }
    }

    // --- 3. one name unresolvable from everywhere ---
    for (const auto& h : hosts) {
        int in_bad = unclaimed_bad([&](const ReachabilityEntry& e) { return e.destination == h; });
        int in_unk = unclaimed_bad([&](const ReachabilityEntry& e) {
            return e.destination == h && e.status == "unknown";
        });
        int out_bad = unclaimed_bad([&](const ReachabilityEntry& e) { return e.source == h; });
        if (in_bad >= 2 && in_bad == in_unk && out_bad == 0) {
            std::string probe_src;
            for (const auto& r : rows)
                if (!r.claimed && r.e->destination == h && r.e->status == "unknown") {
                    probe_src = r.e->source;
                    break;
                }
            Ipv4 target = m.hosts.count(h) ? m.hosts.at(h).ip : Ipv4(0, 0, 0, 0);
            ReachabilityEntry e = ping_direct_ip(ctx, ledger, probe_src, target);
            Symptom s;
            s.sample_src = probe_src;
            s.sample_dst = h;
            s.sample_dst_ip = target;
            s.confirmed = true;
            if (e.status == "ok") {
                s.kind = SymptomKind::reachability_unknown;
                s.cluster = ClusterKind::record;
                s.devices = dns_pod_names(m);
                s.evidence.push_back("name '" + h +
                                     "' unresolvable everywhere; address answers directly");
            } else {
                s.kind = SymptomKind::reachability_fail;
                s.cluster = ClusterKind::dst;
                s.devices = {h};
                s.evidence.push_back("everything toward " + h + " failing");
            }
            s.row_count = claim([&](const ReachabilityEntry& e2) {
                return e2.destination == h && e2.status != "ok";
            });
            out.push_back(std::move(s));
        }
    }

    // --- 4/5. one-sided host clusters on failing rows ---
    for (const auto& h : hosts) {
        int in_bad = unclaimed_bad([&](const ReachabilityEntry& e) { return e.destination == h; });
        int out_bad = unclaimed_bad([&](const ReachabilityEntry& e) { return e.source == h; });
        ClusterKind ck = ClusterKind::none;
        if (in_bad == n - 1 && out_bad == 0) ck = ClusterKind::dst;
        else if (out_bad == n - 1 && in_bad == 0) ck = ClusterKind::src;
        if (ck == ClusterKind::none) continue;
        Symptom s;
        s.kind = SymptomKind::reachability_fail;
        s.cluster = ck;
        s.devices = {h};
        for (const auto& r : rows) {
            if (r.claimed || r.e->status == "ok" || !touches(*r.e, h)) continue;
            if (ck == ClusterKind::dst) {
                s.sample_src = r.e->source;
                s.sample_dst = h;
            } else {
                s.sample_src = h;
                s.sample_dst = r.e->destination;
            }
            s.sample_dst_ip = r.e->dest_ip;
            if (!s.sample_dst_ip && m.hosts.count(*s.sample_dst))
                s.sample_dst_ip = m.hosts.at(*s.sample_dst).ip;
            break;
        }
        s.row_count =
            claim([&](const ReachabilityEntry& e) { return touches(e, h) && e.status != "ok"; });
        s.evidence.push_back(ck == ClusterKind::dst ? "everything toward " + h + " failing"
                                                    : h + " failing toward everything");
        out.push_back(std::move(s));
    }

    // Remaining bad rows.
    auto remaining = [&] {
        std::vector<const ReachabilityEntry*> v;
        for (const auto& r : rows)
            if (!r.claimed && r.e->status != "ok") v.push_back(r.e);
        return v;
    };

    // --- 6. everything left touches a single host ---
    {
        auto rem = remaining();
        if (!rem.empty()) {
            std::set<std::string> common = {rem.front()->source, rem.front()->destination};
            for (const auto* e : rem) {
                std::set<std::string> here = {e->source, e->destination};
                std::set<std::string> inter;
                std::set_intersection(common.begin(), common.end(), here.begin(), here.end(),
                                      std::inserter(inter, inter.begin()));
                common = inter;
            }
            if (common.size() == 1) {
                const std::string h = *common.begin();
                Symptom s;
                s.kind = SymptomKind::reachability_fail;
                s.cluster = ClusterKind::src_partial;
                s.devices = {h};
                for (const auto* e : rem)
                    if (e->source == h && e->dest_ip) {
                        s.sample_src = h;
                        s.sample_dst = e->destination;
                        s.sample_dst_ip = e->dest_ip;
                        break;
                    }
                if (!s.sample_dst_ip)
                    for (const auto* e : rem)
                        if (e->destination == h) {
                            s.sample_src = e->source;
                            s.sample_dst = h;
                            s.sample_dst_ip =
                                m.hosts.count(h) ? std::optional<Ipv4>(m.hosts.at(h).ip)
                                                 : e->dest_ip;
                            break;
                        }
                s.row_count = claim(
                    [&](const ReachabilityEntry& e) { return touches(e, h) && e.status != "ok"; });
                s.evidence.push_back("every failing row involves " + h);
                out.push_back(std::move(s));
            }
        }
    }

    // --- 7. a whole subnet cut off from the rest ---
    {
        auto rem = remaining();
        if (!rem.empty()) {
            std::map<uint32_t, std::vector<std::string>> members;  // network -> hosts
            for (const auto& h : hosts)
                if (m.hosts.count(h)) members[net_of(m, h).addr.v].push_back(h);
            for (auto& [net, hs] : members) {
                if (int(hs.size()) == n) continue;  // everyone; not a cut
                auto in_s = [&](const std::string& h) {
                    return std::find(hs.begin(), hs.end(), h) != hs.end();
                };
                bool all_cross = true;
                for (const auto* e : rem)
                    if (in_s(e->source) == in_s(e->destination)) all_cross = false;
                if (!all_cross) continue;
                // Full coverage: every cross pair involving the subnet is bad.
                long expect = 2L * long(hs.size()) * long(n - int(hs.size()));
                if (long(rem.size()) != expect) continue;
                Symptom s;
                s.kind = SymptomKind::reachability_fail;
                s.cluster = ClusterKind::subnet;
                s.devices = hs;
                auto gw = m.gateway_router.find(hs.front());
                if (gw != m.gateway_router.end()) s.devices.push_back(gw->second);
                std::sort(s.devices.begin(), s.devices.end());
                for (const auto* e : rem)
                    if (in_s(e->source)) {
                        s.sample_src = e->source;
                        s.sample_dst = e->destination;
                        s.sample_dst_ip = e->dest_ip;
                        if (!s.sample_dst_ip && m.hosts.count(e->destination))
                            s.sample_dst_ip = m.hosts.at(e->destination).ip;
                        break;
                    }
                s.row_count = claim([&](const ReachabilityEntry&) { return true; });
                // (claim() only takes unclaimed rows; all remaining are ours)
                s.evidence.push_back("subnet of " + hs.front() +
                                     " unreachable in both directions");
                out.push_back(std::move(s));
                break;
            }
        }
    }

    // --- 8. shared transit: intersect structural path sets ---
    {
        auto rem = remaining();
        if (!rem.empty()) {
            std::set<std::string> inter;
            bool first = true;
            for (const auto* e : rem) {
                auto dag = shortest_path_dag(m, e->source, e->destination);
                std::set<std::string> here(dag.begin(), dag.end());
                if (first) {
                    inter = here;
                    first = false;
                } else {
                    std::set<std::string> nxt;
                    std::set_intersection(inter.begin(), inter.end(), here.begin(), here.end(),
                                          std::inserter(nxt, nxt.begin()));
                    inter = nxt;
                }
            }
            Symptom s;
            s.kind = SymptomKind::reachability_fail;
            s.cluster = ClusterKind::path;
            for (const auto& d : inter) {
                auto k = m.kinds.find(d);
                if (k != m.kinds.end() && k->second == DeviceKind::host) continue;
                s.devices.push_back(d);
            }
            if (s.devices.empty())  // disjoint paths: keep the transit union instead
                for (const auto* e : rem)
                    for (const auto& d : shortest_path_dag(m, e->source, e->destination)) {
                        auto k = m.kinds.find(d);
                        if (k != m.kinds.end() && k->second != DeviceKind::host &&
                            std::find(s.devices.begin(), s.devices.end(), d) == s.devices.end())
                            s.devices.push_back(d);
                    }
            std::sort(s.devices.begin(), s.devices.end());
            const auto* e0 = rem.front();
            s.sample_src = e0->source;
            s.sample_dst = e0->destination;
            s.sample_dst_ip = e0->dest_ip;
            if (!s.sample_dst_ip && m.hosts.count(e0->destination))
                s.sample_dst_ip = m.hosts.at(e0->destination).ip;
            s.row_count = claim(
                [&](const ReachabilityEntry& e) { return e.status != "ok"; });
            s.evidence.push_back(std::to_string(s.row_count) +
                                 " failing rows share these transit devices");
            out.push_back(std::move(s));
        }
    }

    // Confirmation: re-probe one decisive row per still-unconfirmed symptom.
    // A row that has healed was transient; drop the symptom.
    std::vector<Symptom> confirmed;
    for (auto& s : out) {
        if (s.confirmed) {
            confirmed.push_back(std::move(s));
            continue;
        }
        if (s.sample_src && s.sample_dst_ip) {
            ReachabilityEntry e = ping_direct_ip(ctx, ledger, *s.sample_src, *s.sample_dst_ip);
            if (e.status == "ok") continue;  // transient; discard
        }
        s.confirmed = true;
        confirmed.push_back(std::move(s));
    }
    return confirmed;
}

// ---------------------------------------------------------------------------
// The escalation loop
// ---------------------------------------------------------------------------

namespace {

std::string devices_brace(const std::vector<std::string>& ds) {
    std::string out = "{";
    for (size_t i = 0; i < ds.size(); ++i) {
        if (i) out += ",";
        out += ds[i];
    }
    return out + "}";
}

// Deep-scan flags grouped into symptoms: one per distinct hint.
std::vector<Symptom> symptoms_from_flags(const std::vector<Flag>& flags) {
    std::map<std::string, Symptom> grouped;
    for (const auto& f : flags) {
        std::string key = f.hint_string();
        Symptom& s = grouped[key];
        s.kind = SymptomKind::scan_flag;
        s.cluster = ClusterKind::none;
        s.hint = f.label;
        s.family = f.family;
        s.phase = 1 + (f.phase - 'A');
        if (std::find(s.devices.begin(), s.devices.end(), f.device) == s.devices.end())
            s.devices.push_back(f.device);
        s.evidence.push_back(f.device + ": " + f.evidence + " [" + f.sweep + "]");
        s.confirmed = true;
    }
    std::vector<Symptom> out;
    for (auto& [key, s] : grouped) {
        std::sort(s.devices.begin(), s.devices.end());
        out.push_back(std::move(s));
    }
    return out;
}

Symptom* pick_lead(std::vector<Symptom>& symptoms) {
    Symptom* best = nullptr;
    for (auto& s : symptoms) {
        if (s.checked) continue;
        if (!best) {
            best = &s;
            continue;
        }
        auto key = [](const Symptom& x) {
            return std::make_tuple(x.phase, x.devices.size(),
                                   x.devices.empty() ? std::string() : x.devices.front(),
                                   x.describe());
        };
        if (key(s) < key(*best)) best = &s;
    }
    return best;
}

}  // namespace

DiagnosisResult diagnose(const Topology& topo, const SkillSet& skills, int budget) {
    DiagnosisResult result;
    SessionTrace& tr = result.trace;
    ProbeContext ctx(topo);
    ToolCallLedger ledger;  // current_turn = 1

    auto event = [&](int turn, const std::string& kind, const std::string& detail) {
        tr.events.push_back({turn, kind, detail});
    };
    // A turn is available if taking it would not exceed the budget.
    auto take_turn = [&]() -> bool {
        if (ledger.current_turn + 1 > budget) return false;
        ++ledger.current_turn;
        return true;
    };
    auto finish = [&](const std::string& outcome) {
        tr.outcome = outcome;
        tr.turns_used = ledger.current_turn;
        tr.tool_calls = ledger.count();
    };

    // --- step 1: wide scan ---
    event(1, "scan", "all-pairs reachability by hostname");
    ReachabilityMatrix matrix = get_reachability(ctx, ledger);
    std::vector<Symptom> symptoms = extract_symptoms(ctx, ledger, matrix);
    {
        std::ostringstream os;
        os << matrix.ok_count() << " ok, " << matrix.failing_count() << " failing, "
           << matrix.unknown_count() << " unknown";
        event(1, "scan", os.str());
    }
    for (const auto& s : symptoms) event(1, "symptom", s.describe());

    bool had_reachability_symptoms = !symptoms.empty();
    bool deep_done = false;
    bool deep_clean = false;

    // Runs the deep scan under the remaining budget; returns false when the
    // budget cut it short (the whole session then ends without a submission).
    auto run_deep_scan = [&]() -> bool {
        int before = ledger.current_turn;
        DeepScanResult ds = deep_scan(ctx, ledger, budget);
        int turn = before;
        for (const auto& rep : ds.phases) {
            ++turn;
            for (const auto& line : render_phase(rep)) event(turn, "deep", line);
        }
        if (ds.truncated) {
            event(ledger.current_turn, "stop", "budget exhausted during deep scan");
            return false;
        }
        deep_done = true;
        deep_clean = ds.completed_clean();
        for (auto& s : symptoms_from_flags(ds.flags)) {
            event(ledger.current_turn, "symptom", s.describe());
            symptoms.push_back(std::move(s));
        }
        return true;
    };

    // --- step 2 precondition: nothing confirmed by the wide scan ---
    if (symptoms.empty()) {
        if (!run_deep_scan()) {
            finish("no_submission");
            return result;
        }
    }

    // --- steps 3 and 4: route symptoms, execute fingerprints ---
    while (true) {
        Symptom* lead = pick_lead(symptoms);
        if (!lead) {
            if (!deep_done) {
                if (!run_deep_scan()) {
                    finish("no_submission");
                    return result;
                }
                continue;
            }
            if (deep_clean && !had_reachability_symptoms) {
                if (!take_turn()) {
                    finish("no_submission");
                    return result;
                }
                result.submission = benign_submission();
                event(ledger.current_turn, "submit",
                      "no anomaly: wide scan and full deep scan clean");
                finish("no_anomaly");
                return result;
            }
            // Suspicion remains but nothing matched: an honest miss.
            event(ledger.current_turn, "stop", "all symptoms checked; nothing matched");
            finish("no_submission");
            return result;
        }

        if (!take_turn()) {
            finish("no_submission");
            return result;
        }
        Route route = map_symptom(ctx, ledger, *lead, skills);
        {
            std::string d = route.rule + " " + lead->describe() + " -> " + route.skill;
            if (route.hint) d += " hint=" + std::string(to_string(*route.hint));
            event(ledger.current_turn, "index", d);
        }
        lead->checked = true;

        if (route.skill == "broad-search") {
            if (!deep_done) {
                if (!run_deep_scan()) {
                    finish("no_submission");
                    return result;
                }
            }
            continue;
        }

        const Skill* skill = skills.by_id(route.skill);
        if (!skill) continue;  // unreachable after validation; stay safe
        bool submitted = false;
        for (const Fingerprint* fp : fingerprint_order(skills, *skill, route.hint)) {
            if (!take_turn()) {
                finish("no_submission");
                return result;
            }
            auto match = attempt_fingerprint(ctx, ledger, *fp, *lead);
            if (!match) {
                event(ledger.current_turn, "skill",
                      skill->id + " fingerprint " + to_string(fp->label) + ": no match");
                continue;
            }
            event(ledger.current_turn, "skill",
                  skill->id + " fingerprint " + to_string(fp->label) + ": matched " +
                      devices_brace(match->devices) + " (" + match->evidence + ")");
            if (!take_turn()) {
                finish("no_submission");
                return result;
            }
            result.submission = canonicalize(*match);
            event(ledger.current_turn, "submit",
                  to_string(match->label) + " " + devices_brace(result.submission->devices));
            finish("submitted");
            submitted = true;
            break;
        }
        if (submitted) return result;
        event(ledger.current_turn, "skill", skill->id + " exhausted; returning to index");
    }
}

}  // namespace netdiag
