#include "netdiag/harness.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace netdiag {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string sanitize_id(const std::string& id) {
    std::string out = id;
    for (char& c : out) {
        if (c == '/' || c == ':' || c == ' ') c = '_';
    }
    return out;
}

}  // namespace

// --- record serialization ---

ordered_json incident_to_json(const Incident& inc) {
    ordered_json j;
    j["incident_id"] = inc.incident_id;
    j["scenario"] = inc.scenario;
    j["size"] = inc.size;
    j["seed"] = inc.seed;
    j["label"] = inc.label ? ordered_json(*inc.label) : ordered_json(nullptr);
    j["target"] = inc.target ? ordered_json(*inc.target) : ordered_json(nullptr);
    return j;
}

Incident incident_from_json(const ordered_json& j) {
    Incident inc;
    inc.incident_id = j.at("incident_id").get<std::string>();
    inc.scenario = j.at("scenario").get<std::string>();
    inc.size = j.at("size").get<std::string>();
    inc.seed = j.at("seed").get<uint64_t>();
    if (j.contains("label") && !j.at("label").is_null())
        inc.label = j.at("label").get<std::string>();
    if (j.contains("target") && !j.at("target").is_null())
        inc.target = j.at("target").get<std::string>();
    return inc;
}

ordered_json submission_to_json(const Submission& s) {
    ordered_json j;
    j["is_anomaly"] = s.is_anomaly;
    j["labels"] = s.labels;
    j["devices"] = s.devices;
    return j;
}

Submission submission_from_json(const ordered_json& j) {
    Submission s;
    s.is_anomaly = j.at("is_anomaly").get<bool>();
    if (j.contains("labels")) s.labels = j.at("labels").get<std::vector<std::string>>();
    if (j.contains("devices")) s.devices = j.at("devices").get<std::vector<std::string>>();
    std::sort(s.labels.begin(), s.labels.end());
    std::sort(s.devices.begin(), s.devices.end());
    return s;
}

ordered_json truth_to_json(const GroundTruth& t) {
    ordered_json j;
    j["is_anomaly"] = t.is_anomaly;
    j["labels"] = t.labels;
    j["devices"] = t.devices;
    return j;
}

GroundTruth truth_from_json(const ordered_json& j) {
    GroundTruth t;
    t.is_anomaly = j.at("is_anomaly").get<bool>();
    if (j.contains("labels")) t.labels = j.at("labels").get<std::vector<std::string>>();
    if (j.contains("devices")) t.devices = j.at("devices").get<std::vector<std::string>>();
    std::sort(t.labels.begin(), t.labels.end());
    std::sort(t.devices.begin(), t.devices.end());
    return t;
}

// --- one incident ---

IncidentWorld build_incident_world(const Incident& inc) {
    Topology base = build_scenario(inc.scenario, inc.size, inc.seed);
    if (!inc.label) {
        GroundTruth benign;
        benign.is_anomaly = false;
        return {std::move(base), benign};
    }
    auto label = label_from_string(*inc.label);
    if (!label) throw FaultError(inc.incident_id + ": unknown label " + *inc.label);
    if (!inc.target) throw FaultError(inc.incident_id + ": fault incident without target");
    InjectionResult inj = inject(base, *label, *inc.target, inc.seed);
    return {std::move(inj.topo), std::move(inj.truth)};
}

namespace {

BenchRow run_world(const Incident& inc, const Topology& topo, const GroundTruth& truth,
                   const SkillSet& skills, int budget) {
    BenchRow row;
    row.scored.incident = inc;
    row.scored.truth = truth;

    if (truth.is_anomaly) {
        VerifyResult vr = verify_injection(topo, truth);
        if (!vr.verified) {
            row.excluded = true;
            row.exclude_reason = "injection not verified: " + vr.reason;
            return row;
        }
    } else {
        std::string firing;
        if (!verify_benign(topo, &firing)) {
            row.excluded = true;
            row.exclude_reason = "benign world fires " + firing;
            return row;
        }
    }

    DiagnosisResult res = diagnose(topo, skills, budget);
    row.trace = std::move(res.trace);
    row.scored.submission = res.submission;
    row.scored.score = score_one(row.scored.submission, truth);
    row.scored.turns_used = row.trace.turns_used;
    row.scored.tool_calls = row.trace.tool_calls;
    row.scored.outcome = row.trace.outcome;
    return row;
}

}  // namespace

BenchRow run_incident(const Incident& inc, const SkillSet& skills, int budget) {
    IncidentWorld w = build_incident_world(inc);
    return run_world(inc, w.topo, w.truth, skills, budget);
}

// --- the grid ---

std::vector<Incident> build_grid(const std::string& filter) {
    std::vector<Incident> grid;
    uint64_t cell = 0;
    for (const std::string& scenario : scenario_classes()) {
        for (const std::string& size : size_classes()) {
            ++cell;
            const uint64_t seed = 100 + cell;  // fixed per cell, varies across cells
            Topology base = build_scenario(scenario, size, seed);
            for (FaultLabel label : all_labels()) {
                auto targets = enumerate_targets(base, label);
                if (targets.empty()) continue;  // scenario cannot host this fault
                const std::string& target = targets[seed % targets.size()];
                Incident inc;
                inc.scenario = scenario;
                inc.size = size;
                inc.seed = seed;
                inc.label = to_string(label);
                inc.target = target;
                inc.incident_id = scenario + "/" + size + "/" + *inc.label;
                grid.push_back(std::move(inc));
            }
            Incident benign;
            benign.scenario = scenario;
            benign.size = size;
            benign.seed = seed;
            benign.incident_id = scenario + "/" + size + "/benign";
            grid.push_back(std::move(benign));
        }
    }
    if (!filter.empty()) {
        grid.erase(std::remove_if(grid.begin(), grid.end(),
                                  [&](const Incident& inc) {
                                      return inc.incident_id.find(filter) == std::string::npos;
                                  }),
                   grid.end());
    }
    return grid;
}

// --- trace invariants ---

std::vector<std::string> check_invariants(const std::vector<BenchRow>& rows, int budget) {
    std::vector<std::string> notes;
    auto flag = [&](const BenchRow& row, const std::string& what) {
        notes.push_back(row.scored.incident.incident_id + ": " + what);
    };

    for (const BenchRow& row : rows) {
        if (row.excluded) continue;
        const SessionTrace& tr = row.trace;

        if (tr.tool_calls < 1) flag(row, "no tool calls recorded");
        if (tr.turns_used < 1 || tr.turns_used > budget)
            flag(row, "turns_used " + std::to_string(tr.turns_used) + " outside [1, budget]");

        int prev_turn = 0;
        bool seen_scan = false;
        char deep_phase = 0;  // highest phase letter seen
        int submit_turn = -1;
        int last_match_turn = -1;
        size_t last_skill_event = 0, submit_event = 0;
        bool have_skill_event = false, have_submit = false;

        for (size_t i = 0; i < tr.events.size(); ++i) {
            const TraceEvent& ev = tr.events[i];
            if (ev.turn < prev_turn) flag(row, "event turns go backwards at #" + std::to_string(i));
            prev_turn = std::max(prev_turn, ev.turn);
            if (ev.turn > budget) flag(row, "event past budget at #" + std::to_string(i));

            if (ev.kind == "scan") {
                if (ev.turn != 1) flag(row, "scan not on turn 1");
                seen_scan = true;
            } else if (ev.kind == "deep") {
                // lines look like "PA: infra_sweep: ..."; phases must run in
                // order and at most once each.
                if (ev.detail.size() >= 2 && ev.detail[0] == 'P') {
                    char ph = ev.detail[1];
                    if (ph < 'A' || ph > 'D') {
                        flag(row, "unknown deep phase '" + std::string(1, ph) + "'");
                    } else if (ph < deep_phase) {
                        flag(row, "deep phases out of order");
                    }
                    deep_phase = std::max(deep_phase, ph);
                }
            } else if (ev.kind == "skill") {
                last_skill_event = i;
                have_skill_event = true;
                if (ev.detail.find("matched {") != std::string::npos) last_match_turn = ev.turn;
            } else if (ev.kind == "submit") {
                submit_turn = ev.turn;
                submit_event = i;
                have_submit = true;
            }
        }

        if (!seen_scan) flag(row, "no initial scan event");

        if (tr.outcome == "submitted") {
            if (!have_submit) {
                flag(row, "outcome submitted without submit event");
            } else {
                if (submit_event + 1 != tr.events.size()) flag(row, "events after submission");
                const Submission& sub = row.scored.submission ? *row.scored.submission
                                                              : Submission{};
                if (sub.is_anomaly) {
                    // stop-and-submit: the match is the last skill action and
                    // the submission lands on the very next turn.
                    if (!have_skill_event || last_match_turn < 0)
                        flag(row, "anomaly submitted without a fingerprint match");
                    else if (last_skill_event > submit_event)
                        flag(row, "skill activity after submission");
                    else if (submit_turn != last_match_turn + 1)
                        flag(row, "submission not on the turn after the match");
                }
            }
        } else if (tr.outcome == "no_anomaly") {
            if (deep_phase != 'D') flag(row, "all-clear declared without a full deep scan");
            bool any_symptom = false;
            for (const TraceEvent& ev : tr.events)
                if (ev.kind == "symptom") any_symptom = true;
            if (any_symptom) flag(row, "all-clear declared despite reachability symptoms");
        } else if (tr.outcome != "no_submission") {
            flag(row, "unknown outcome '" + tr.outcome + "'");
        }
    }
    return notes;
}

// --- the full benchmark ---

namespace {

void accumulate(std::map<std::string, std::vector<ScoredIncident>>& buckets,
                const std::string& key, const ScoredIncident& s) {
    buckets[key].push_back(s);
}

std::string truth_family(const GroundTruth& t) {
    if (!t.is_anomaly || t.labels.empty()) return "benign";
    auto label = label_from_string(t.labels.front());
    return label ? to_string(family_of(*label)) : "unknown";
}

}  // namespace

BenchResult run_bench(const BenchConfig& cfg) {
    BenchResult res;
    SkillSet skills = load_builtin_skills();
    std::vector<Incident> grid = build_grid(cfg.filter);

    std::vector<ScoredIncident> included;
    std::map<std::string, std::vector<ScoredIncident>> by_scenario, by_size, by_family;

    for (const Incident& inc : grid) {
        IncidentWorld w = build_incident_world(inc);
        if (!cfg.sabotage_label.empty() && inc.label && *inc.label == cfg.sabotage_label) {
            // Broken-injector drill: keep the truth, drop the mutation.
            w.topo = build_scenario(inc.scenario, inc.size, inc.seed);
        }
        BenchRow row = run_world(inc, w.topo, w.truth, skills, cfg.budget);
        if (row.excluded) {
            res.excluded.push_back(inc.incident_id + ": " + row.exclude_reason);
        } else {
            included.push_back(row.scored);
            accumulate(by_scenario, inc.scenario, row.scored);
            accumulate(by_size, inc.size, row.scored);
            accumulate(by_family, truth_family(row.scored.truth), row.scored);
        }
        res.rows.push_back(std::move(row));
    }

    res.totals = aggregate(included);
    for (auto& [k, v] : by_scenario) res.by_scenario[k] = aggregate(v);
    for (auto& [k, v] : by_size) res.by_size[k] = aggregate(v);
    for (auto& [k, v] : by_family) res.by_family[k] = aggregate(v);

    if (cfg.check) {
        res.invariant_notes = check_invariants(res.rows, cfg.budget);
        res.invariant_failures = static_cast<int>(res.invariant_notes.size());
    }
    if (!cfg.out_dir.empty()) write_reports(res, cfg.out_dir);
    return res;
}

// --- reports ---

namespace {

ordered_json aggregate_to_json(const Aggregate& a) {
    ordered_json j;
    j["incidents"] = a.incidents;
    j["submitted"] = a.submitted;
    j["detection_correct"] = a.detection_correct;
    j["label_correct"] = a.label_correct;
    j["exact_devices"] = a.exact_devices;
    j["mean_f1"] = a.mean_f1;
    j["micro_f1"] = a.micro_f1;
    j["benign_correct"] = a.benign_correct;
    j["benign_total"] = a.benign_total;
    j["tool_calls"] = a.tool_calls;
    j["tool_calls_per_correct"] =
        a.tool_calls_per_correct ? ordered_json(*a.tool_calls_per_correct) : ordered_json(nullptr);
    return j;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += "\"";
    return out;
}

}  // namespace

std::string render_summary(const BenchResult& res) {
    std::ostringstream os;
    const Aggregate& t = res.totals;
    auto pct = [](int num, int den) {
        std::ostringstream p;
        p.setf(std::ios::fixed);
        p.precision(1);
        p << (den ? 100.0 * num / den : 0.0) << "%";
        return p.str();
    };
    os << "incidents: " << t.incidents << " (excluded " << res.excluded.size() << ")\n";
    os << "detection: " << t.detection_correct << "/" << t.incidents << " ("
       << pct(t.detection_correct, t.incidents) << ")\n";
    os << "label:     " << t.label_correct << "/" << t.incidents << " ("
       << pct(t.label_correct, t.incidents) << ")\n";
    os << "devices:   exact " << t.exact_devices << "/" << t.incidents;
    os.setf(std::ios::fixed);
    os.precision(4);
    os << ", mean F1 " << t.mean_f1 << ", micro F1 " << t.micro_f1 << "\n";
    os << "benign:    " << t.benign_correct << "/" << t.benign_total << " silent\n";
    os << "tool calls: " << t.tool_calls;
    if (t.tool_calls_per_correct) {
        os.precision(1);
        os << " (" << *t.tool_calls_per_correct << " per fully-correct diagnosis)";
    }
    os << "\n";

    auto section = [&](const char* name, const std::map<std::string, Aggregate>& m) {
        os << "\nby " << name << ":\n";
        for (const auto& [k, a] : m) {
            os.precision(4);
            os << "  " << k << ": " << a.label_correct << "/" << a.incidents
               << " labeled, mean F1 " << a.mean_f1 << "\n";
        }
    };
    section("scenario", res.by_scenario);
    section("size", res.by_size);
    section("family", res.by_family);

    if (!res.excluded.empty()) {
        os << "\nexcluded:\n";
        for (const std::string& e : res.excluded) os << "  " << e << "\n";
    }
    if (res.invariant_failures > 0) {
        os << "\ninvariant violations: " << res.invariant_failures << "\n";
        for (const std::string& n : res.invariant_notes) os << "  " << n << "\n";
    }
    return os.str();
}

void write_reports(const BenchResult& res, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(fs::path(out_dir) / "traces");

    {
        std::ofstream jl(fs::path(out_dir) / "results.jsonl");
        for (const BenchRow& row : res.rows) {
            ordered_json j;
            j["incident"] = incident_to_json(row.scored.incident);
            j["truth"] = truth_to_json(row.scored.truth);
            j["excluded"] = row.excluded;
            if (row.excluded) {
                j["exclude_reason"] = row.exclude_reason;
            } else {
                j["submission"] = row.scored.submission
                                      ? submission_to_json(*row.scored.submission)
                                      : ordered_json(nullptr);
                const Score& s = row.scored.score;
                ordered_json sc;
                sc["detection_correct"] = s.detection_correct;
                sc["label_correct"] = s.label_correct;
                sc["precision"] = s.precision;
                sc["recall"] = s.recall;
                sc["f1"] = s.f1;
                sc["exact_devices"] = s.exact_devices;
                j["score"] = sc;
                j["outcome"] = row.scored.outcome;
                j["turns_used"] = row.scored.turns_used;
                j["tool_calls"] = row.scored.tool_calls;
            }
            jl << j.dump() << "\n";
        }
    }

    {
        std::ofstream csv(fs::path(out_dir) / "results.csv");
        csv << "incident_id,scenario,size,label,target,outcome,detection,label_correct,"
               "exact_devices,precision,recall,f1,turns,tool_calls,excluded\n";
        for (const BenchRow& row : res.rows) {
            const Incident& inc = row.scored.incident;
            const Score& s = row.scored.score;
            csv << csv_escape(inc.incident_id) << "," << inc.scenario << "," << inc.size << ","
                << (inc.label ? *inc.label : "") << "," << (inc.target ? *inc.target : "") << ","
                << row.scored.outcome << "," << (s.detection_correct ? 1 : 0) << ","
                << (s.label_correct ? 1 : 0) << "," << (s.exact_devices ? 1 : 0) << ","
                << s.precision << "," << s.recall << "," << s.f1 << "," << row.scored.turns_used
                << "," << row.scored.tool_calls << "," << (row.excluded ? 1 : 0) << "\n";
        }
    }

    {
        ordered_json m;
        m["totals"] = aggregate_to_json(res.totals);
        ordered_json js, jz, jf;
        for (const auto& [k, a] : res.by_scenario) js[k] = aggregate_to_json(a);
        for (const auto& [k, a] : res.by_size) jz[k] = aggregate_to_json(a);
        for (const auto& [k, a] : res.by_family) jf[k] = aggregate_to_json(a);
        m["by_scenario"] = js;
        m["by_size"] = jz;
        m["by_family"] = jf;
        m["excluded"] = res.excluded;
        m["invariant_failures"] = res.invariant_failures;
        m["invariant_notes"] = res.invariant_notes;
        std::ofstream mf(fs::path(out_dir) / "metrics.json");
        mf << m.dump(2) << "\n";
    }

    for (const BenchRow& row : res.rows) {
        if (row.excluded) continue;
        const std::string stem = sanitize_id(row.scored.incident.incident_id);
        std::ofstream tf(fs::path(out_dir) / "traces" / (stem + ".txt"));
        tf << row.trace.text();
        std::ofstream jf(fs::path(out_dir) / "traces" / (stem + ".json"));
        jf << row.trace.json() << "\n";
    }

    std::ofstream sf(std::filesystem::path(out_dir) / "summary.txt");
    sf << render_summary(res);
}

}  // namespace netdiag
