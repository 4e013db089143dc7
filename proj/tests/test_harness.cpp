#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "netdiag/harness.hpp"

using namespace netdiag;

TEST_CASE("the grid is deterministic, unique, and benign-padded") {
    std::vector<Incident> grid = build_grid();
    std::vector<Incident> again = build_grid();
    REQUIRE(grid.size() == again.size());
    CHECK(grid.size() == 305);

    std::set<std::string> ids;
    int benign = 0;
    for (size_t i = 0; i < grid.size(); ++i) {
        ids.insert(grid[i].incident_id);
        CHECK(grid[i].incident_id == again[i].incident_id);
        CHECK(grid[i].seed == again[i].seed);
        CHECK(grid[i].target == again[i].target);
        if (!grid[i].label) {
            ++benign;
            CHECK_FALSE(grid[i].target.has_value());
        }
    }
    CHECK(ids.size() == grid.size());
    CHECK(benign == 9);  // one per scenario/size cell
}

TEST_CASE("grid filtering is a substring match on ids") {
    auto filtered = build_grid("clos_bgp/small");
    CHECK_FALSE(filtered.empty());
    for (const auto& inc : filtered) {
        CHECK(inc.scenario == "clos_bgp");
        CHECK(inc.size == "small");
    }
    CHECK(build_grid("no_such_thing").empty());
}

TEST_CASE("record serialization round-trips, nulls included") {
    Incident fault;
    fault.incident_id = "x/y/z";
    fault.scenario = "clos_bgp";
    fault.size = "small";
    fault.seed = 77;
    fault.label = "link_down";
    fault.target = "some_link";
    Incident back = incident_from_json(incident_to_json(fault));
    CHECK(back.incident_id == fault.incident_id);
    CHECK(back.label == fault.label);
    CHECK(back.target == fault.target);
    CHECK(back.seed == 77);

    Incident benign;
    benign.incident_id = "b";
    benign.scenario = "isp_static";
    benign.size = "large";
    benign.seed = 3;
    auto j = incident_to_json(benign);
    CHECK(j.at("label").is_null());
    Incident bback = incident_from_json(j);
    CHECK_FALSE(bback.label.has_value());
    CHECK_FALSE(bback.target.has_value());

    Submission s;
    s.is_anomaly = true;
    s.labels = {"b", "a"};
    s.devices = {"d2", "d1"};
    Submission sback = submission_from_json(submission_to_json(s));
    CHECK(sback.labels == std::vector<std::string>{"a", "b"});  // normalized sorted
    CHECK(sback.devices == std::vector<std::string>{"d1", "d2"});

    GroundTruth t;
    t.is_anomaly = true;
    t.labels = {"link_down"};
    t.devices = {"r1"};
    GroundTruth tback = truth_from_json(truth_to_json(t));
    CHECK(tback.is_anomaly);
    CHECK(tback.labels == t.labels);
    CHECK(tback.devices == t.devices);
}

TEST_CASE("run_incident: verify gate, then engine, then score") {
    SkillSet skills = load_builtin_skills();

    Incident inc;
    inc.incident_id = "t/ip_conflict";
    inc.scenario = "isp_static";
    inc.size = "small";
    inc.seed = 12;
    Topology base = build_scenario(inc.scenario, inc.size, inc.seed);
    auto targets = enumerate_targets(base, FaultLabel::host_ip_conflict);
    REQUIRE_FALSE(targets.empty());
    inc.label = "host_ip_conflict";
    inc.target = targets[0];

    BenchRow row = run_incident(inc, skills, kDefaultBudget);
    CHECK_FALSE(row.excluded);
    CHECK(row.scored.score.label_correct);
    CHECK(row.scored.score.exact_devices);
    CHECK(row.scored.tool_calls == row.trace.tool_calls);
    CHECK(row.scored.outcome == "submitted");
}

TEST_CASE("the invariant checker catches synthetic violations") {
    auto base_row = [] {
        BenchRow row;
        row.scored.incident.incident_id = "synthetic";
        row.trace.outcome = "submitted";
        row.trace.turns_used = 3;
        row.trace.tool_calls = 5;
        row.scored.submission = Submission{true, {"host_crash"}, {"h"}};
        row.trace.events = {
            {1, "scan", "all-pairs reachability by hostname"},
            {2, "skill", "host_crash fingerprint host_crash: matched {h} (unresponsive)"},
            {3, "submit", "host_crash {h}"},
        };
        return row;
    };

    SUBCASE("a well-formed row passes") {
        CHECK(check_invariants({base_row()}, 20).empty());
    }
    SUBCASE("turns beyond the budget") {
        BenchRow r = base_row();
        r.trace.turns_used = 25;
        r.trace.events.back().turn = 25;
        CHECK_FALSE(check_invariants({r}, 20).empty());
    }
    SUBCASE("event turns going backwards") {
        BenchRow r = base_row();
        r.trace.events[1].turn = 9;
        CHECK_FALSE(check_invariants({r}, 20).empty());
    }
    SUBCASE("activity after the submission") {
        BenchRow r = base_row();
        r.trace.events.push_back({4, "skill", "late fingerprint"});
        r.trace.turns_used = 4;
        CHECK_FALSE(check_invariants({r}, 20).empty());
    }
    SUBCASE("submission not right after the match") {
        BenchRow r = base_row();
        r.trace.events.back().turn = 5;
        r.trace.turns_used = 5;
        CHECK_FALSE(check_invariants({r}, 20).empty());
    }
    SUBCASE("deep phases out of order") {
        BenchRow r = base_row();
        r.trace.events.insert(r.trace.events.begin() + 1,
                              {{2, "deep", "PB: ospf_snapshot: clean"},
                               {2, "deep", "PA: infra_sweep: clean"}});
        CHECK_FALSE(check_invariants({r}, 20).empty());
    }
    SUBCASE("all-clear without a finished deep scan") {
        BenchRow r = base_row();
        r.trace.outcome = "no_anomaly";
        r.scored.submission = Submission{false, {}, {}};
        r.trace.events = {{1, "scan", "all-pairs reachability by hostname"},
                          {2, "deep", "PA: infra_sweep: clean"},
                          {3, "submit", "no anomaly"}};
        CHECK_FALSE(check_invariants({r}, 20).empty());
    }
    SUBCASE("excluded rows are not checked") {
        BenchRow r = base_row();
        r.excluded = true;
        r.trace.turns_used = 99;
        CHECK(check_invariants({r}, 20).empty());
    }
}

TEST_CASE("reports land on disk with one jsonl row per incident") {
    namespace fs = std::filesystem;
    fs::path dir = fs::temp_directory_path() / "netdiag_reports_test";
    fs::remove_all(dir);

    BenchConfig cfg;
    cfg.filter = "small/host_crash";
    cfg.out_dir = dir.string();
    cfg.check = true;
    BenchResult res = run_bench(cfg);

    CHECK(res.totals.incidents == 3);
    CHECK(res.invariant_failures == 0);
    CHECK(fs::exists(dir / "results.jsonl"));
    CHECK(fs::exists(dir / "results.csv"));
    CHECK(fs::exists(dir / "metrics.json"));
    CHECK(fs::exists(dir / "summary.txt"));

    std::ifstream jl(dir / "results.jsonl");
    int lines = 0;
    std::string line;
    while (std::getline(jl, line))
        if (!line.empty()) {
            ++lines;
            auto j = nlohmann::ordered_json::parse(line);  // every line parses
            CHECK(j.contains("incident"));
        }
    CHECK(lines == 3);

    int traces = 0;
    for (const auto& e : fs::directory_iterator(dir / "traces")) (void)e, ++traces;
    CHECK(traces == 6);  // .txt + .json per incident

    fs::remove_all(dir);
}

TEST_CASE("sabotaged injections are excluded and logged, never scored") {
    BenchConfig cfg;
    cfg.filter = "isp_static/small/host_crash";
    cfg.sabotage_label = "host_crash";
    BenchResult res = run_bench(cfg);
    CHECK(res.totals.incidents == 0);
    REQUIRE(res.rows.size() == 1);
    CHECK(res.rows[0].excluded);
    REQUIRE(res.excluded.size() == 1);
    CHECK(res.excluded[0].find("host_crash") != std::string::npos);
    CHECK(res.excluded[0].find("not verified") != std::string::npos);
}
