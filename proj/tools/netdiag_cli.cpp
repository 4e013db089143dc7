// Command-line front end: scenario generation, fault injection, injection
// audit, diagnosis, the benchmark grid, and offline scoring.

#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "netdiag/harness.hpp"
#include "netdiag/topology_json.hpp"

namespace {

using nlohmann::ordered_json;
using namespace netdiag;

std::string slurp(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text;
        if (!text.empty() && text.back() != '\n') std::cout << "\n";
    } else {
        std::ofstream out(out_path);
        if (!out) throw std::runtime_error("cannot write " + out_path);
        out << text;
        if (!text.empty() && text.back() != '\n') out << "\n";
    }
}

Incident load_incident(const std::string& path) {
    return incident_from_json(ordered_json::parse(slurp(path)));
}

int cmd_generate(const std::string& scenario, const std::string& size, uint64_t seed,
                 const std::string& out) {
    Topology t = build_scenario(scenario, size, seed);
    emit(topology_to_string(t), out);
    return 0;
}

int cmd_inject(const std::string& topo_path, const std::string& label_str,
               const std::string& target, uint64_t seed, const std::string& out,
               const std::string& truth_out) {
    Topology t = topology_from_string(slurp(topo_path));
    auto label = label_from_string(label_str);
    if (!label) {
        std::cerr << "unknown fault label: " << label_str << "\n";
        return 2;
    }
    InjectionResult inj = inject(t, *label, target, seed);
    emit(topology_to_string(inj.topo), out);
    if (!truth_out.empty()) emit(truth_to_json(inj.truth).dump(2), truth_out);
    return 0;
}

int cmd_verify(const std::string& incident_path) {
    Incident inc = load_incident(incident_path);
    IncidentWorld w = build_incident_world(inc);
    if (w.truth.is_anomaly) {
        VerifyResult vr = verify_injection(w.topo, w.truth);
        if (vr.verified) {
            std::cout << inc.incident_id << ": verified\n";
            return 0;
        }
        std::cout << inc.incident_id << ": NOT verified: " << vr.reason << "\n";
        return 1;
    }
    std::string firing;
    if (verify_benign(w.topo, &firing)) {
        std::cout << inc.incident_id << ": verified benign\n";
        return 0;
    }
    std::cout << inc.incident_id << ": NOT benign: fires " << firing << "\n";
    return 1;
}

int cmd_diagnose(const std::string& incident_path, int budget, const std::string& trace_out) {
    Incident inc = load_incident(incident_path);
    SkillSet skills = load_builtin_skills();
    BenchRow row = run_incident(inc, skills, budget);
    if (row.excluded) {
        std::cerr << inc.incident_id << " excluded: " << row.exclude_reason << "\n";
        return 2;
    }
    if (!trace_out.empty()) emit(row.trace.text(), trace_out);

    ordered_json j;
    j["incident_id"] = inc.incident_id;
    j["outcome"] = row.scored.outcome;
    j["turns_used"] = row.scored.turns_used;
    j["tool_calls"] = row.scored.tool_calls;
    j["submission"] = row.scored.submission ? submission_to_json(*row.scored.submission)
                                            : ordered_json(nullptr);
    std::cout << j.dump(2) << "\n";
    return 0;
}

int cmd_bench(const BenchConfig& cfg) {
    BenchResult res = run_bench(cfg);
    std::cout << render_summary(res);
    if (cfg.check && res.invariant_failures > 0) return 1;
    return 0;
}

int cmd_score(const std::string& submissions_path, const std::string& truths_path) {
    // Both files are JSON Lines keyed by incident_id. A truth with no matching
    // submission line scores as unsubmitted.
    std::map<std::string, ordered_json> subs;
    {
        std::ifstream in(submissions_path);
        if (!in) throw std::runtime_error("cannot open " + submissions_path);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            ordered_json j = ordered_json::parse(line);
            subs[j.at("incident_id").get<std::string>()] = j;
        }
    }

    std::vector<ScoredIncident> rows;
    std::ifstream in(truths_path);
    if (!in) throw std::runtime_error("cannot open " + truths_path);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ordered_json j = ordered_json::parse(line);
        ScoredIncident si;
        si.incident.incident_id = j.at("incident_id").get<std::string>();
        si.truth = truth_from_json(j);
        auto it = subs.find(si.incident.incident_id);
        if (it != subs.end()) {
            const ordered_json& sj = it->second;
            if (sj.contains("submission") && !sj.at("submission").is_null())
                si.submission = submission_from_json(sj.at("submission"));
            else if (sj.contains("is_anomaly"))
                si.submission = submission_from_json(sj);
            if (sj.contains("tool_calls")) si.tool_calls = sj.at("tool_calls").get<int>();
        }
        si.score = score_one(si.submission, si.truth);
        rows.push_back(std::move(si));
    }

    Aggregate agg = aggregate(rows);
    ordered_json out;
    out["incidents"] = agg.incidents;
    out["detection_correct"] = agg.detection_correct;
    out["label_correct"] = agg.label_correct;
    out["exact_devices"] = agg.exact_devices;
    out["mean_f1"] = agg.mean_f1;
    out["micro_f1"] = agg.micro_f1;
    out["benign_correct"] = agg.benign_correct;
    out["benign_total"] = agg.benign_total;
    out["tool_calls"] = agg.tool_calls;
    out["tool_calls_per_correct"] = agg.tool_calls_per_correct
                                        ? ordered_json(*agg.tool_calls_per_correct)
                                        : ordered_json(nullptr);
    std::cout << out.dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"deterministic network-fault simulator and diagnostic engine"};
    app.require_subcommand(1);

    // generate
    std::string g_scenario, g_size, g_out;
    uint64_t g_seed = 1;
    auto* gen = app.add_subcommand("generate", "build a scenario topology");
    gen->add_option("scenario", g_scenario, "scenario class")->required();
    gen->add_option("size", g_size, "size class")->required();
    gen->add_option("--seed", g_seed, "hardware-address seed");
    gen->add_option("--out", g_out, "write JSON here instead of stdout");

    // inject
    std::string i_topo, i_label, i_target, i_out, i_truth;
    uint64_t i_seed = 1;
    auto* inj = app.add_subcommand("inject", "apply a fault to a topology file");
    inj->add_option("topology", i_topo, "topology JSON file")->required();
    inj->add_option("label", i_label, "fault label")->required();
    inj->add_option("target", i_target, "device name or link id")->required();
    inj->add_option("--seed", i_seed, "injection seed");
    inj->add_option("--out", i_out, "write mutated topology here instead of stdout");
    inj->add_option("--truth-out", i_truth, "also write the ground-truth record");

    // verify
    std::string v_incident;
    auto* ver = app.add_subcommand("verify", "audit an incident's injection");
    ver->add_option("incident", v_incident, "incident JSON file")->required();

    // diagnose
    std::string d_incident, d_trace;
    int d_budget = kDefaultBudget;
    auto* dia = app.add_subcommand("diagnose", "run the engine on one incident");
    dia->add_option("incident", d_incident, "incident JSON file")->required();
    dia->add_option("--budget", d_budget, "turn budget");
    dia->add_option("--trace", d_trace, "write the session trace here");

    // bench
    BenchConfig cfg;
    auto* ben = app.add_subcommand("bench", "run the benchmark grid");
    ben->add_option("--filter", cfg.filter, "substring filter on incident ids");
    ben->add_option("--out", cfg.out_dir, "report directory");
    ben->add_option("--budget", cfg.budget, "turn budget per incident");
    ben->add_flag("--check", cfg.check, "run the trace invariant suite");
    ben->add_option("--sabotage", cfg.sabotage_label,
                    "drop this label's mutation while keeping its truth (gate drill)");

    // score
    std::string s_subs, s_truths;
    auto* sco = app.add_subcommand("score", "score submissions against truths (JSONL)");
    sco->add_option("submissions", s_subs, "submissions JSONL")->required();
    sco->add_option("truths", s_truths, "truths JSONL")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_generate(g_scenario, g_size, g_seed, g_out);
        if (inj->parsed()) return cmd_inject(i_topo, i_label, i_target, i_seed, i_out, i_truth);
        if (ver->parsed()) return cmd_verify(v_incident);
        if (dia->parsed()) return cmd_diagnose(d_incident, d_budget, d_trace);
        if (ben->parsed()) return cmd_bench(cfg);
        if (sco->parsed()) return cmd_score(s_subs, s_truths);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
