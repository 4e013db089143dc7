#include <doctest.h>

#include <random>

#include "netdiag/scoring.hpp"

using namespace netdiag;

namespace {

Submission sub(bool anomaly, std::vector<std::string> labels, std::vector<std::string> devices) {
    Submission s;
    s.is_anomaly = anomaly;
    s.labels = std::move(labels);
    s.devices = std::move(devices);
    return s;
}

GroundTruth truth(bool anomaly, std::vector<std::string> labels,
                  std::vector<std::string> devices) {
    GroundTruth t;
    t.is_anomaly = anomaly;
    t.labels = std::move(labels);
    t.devices = std::move(devices);
    return t;
}

// Independent oracle: naive quadratic set arithmetic, written without looking
// at the library implementation.
struct OracleScore {
    double precision, recall, f1;
};
OracleScore oracle_devices(const std::vector<std::string>& pred,
                           const std::vector<std::string>& want) {
    if (pred.empty() && want.empty()) return {1.0, 1.0, 1.0};
    int tp = 0;
    for (const auto& p : pred)
        for (const auto& w : want)
            if (p == w) {
                ++tp;
                break;
            }
    double prec = pred.empty() ? 0.0 : double(tp) / double(pred.size());
    double rec = want.empty() ? 0.0 : double(tp) / double(want.size());
    double f1 = (prec + rec) == 0.0 ? 0.0 : 2.0 * prec * rec / (prec + rec);
    return {prec, rec, f1};
}

}  // namespace

TEST_CASE("hand-computed score oracles") {
    // exact match
    Score s = score_one(sub(true, {"link_down"}, {"r1", "r2"}),
                        truth(true, {"link_down"}, {"r1", "r2"}));
    CHECK(s.detection_correct);
    CHECK(s.label_correct);
    CHECK(s.f1 == 1.0);
    CHECK(s.exact_devices);

    // right label, half the devices: P=1, R=1/2, F1=2/3
    s = score_one(sub(true, {"link_down"}, {"r1"}), truth(true, {"link_down"}, {"r1", "r2"}));
    CHECK(s.label_correct);
    CHECK(s.precision == 1.0);
    CHECK(s.recall == doctest::Approx(0.5));
    CHECK(s.f1 == doctest::Approx(2.0 / 3.0));
    CHECK_FALSE(s.exact_devices);

    // wrong label, overlapping devices: detection holds, label does not
    s = score_one(sub(true, {"link_detach"}, {"r1", "r3"}),
                  truth(true, {"link_down"}, {"r1", "r2"}));
    CHECK(s.detection_correct);
    CHECK_FALSE(s.label_correct);
    CHECK(s.precision == doctest::Approx(0.5));
    CHECK(s.recall == doctest::Approx(0.5));
    CHECK(s.f1 == doctest::Approx(0.5));

    // false alarm on a benign incident
    s = score_one(sub(true, {"host_crash"}, {"h1"}), truth(false, {}, {}));
    CHECK_FALSE(s.detection_correct);
    CHECK_FALSE(s.label_correct);
    CHECK(s.f1 == 0.0);

    // correct silence on benign: empty-vs-empty devices count as perfect
    s = score_one(sub(false, {}, {}), truth(false, {}, {}));
    CHECK(s.detection_correct);
    CHECK(s.label_correct);
    CHECK(s.f1 == 1.0);
    CHECK(s.exact_devices);

    // budget starvation: no submission at all
    s = score_one(std::nullopt, truth(true, {"host_crash"}, {"h1"}));
    CHECK_FALSE(s.submitted);
    CHECK_FALSE(s.detection_correct);
    CHECK(s.f1 == 0.0);
}

TEST_CASE("device F1 agrees with the brute-force oracle on 1000 random pairs") {
    std::mt19937 rng(20260819);
    std::uniform_int_distribution<int> size_dist(0, 6);
    std::uniform_int_distribution<int> name_dist(0, 9);

    auto random_set = [&] {
        std::vector<std::string> v;
        int n = size_dist(rng);
        for (int i = 0; i < n; ++i) v.push_back("dev" + std::to_string(name_dist(rng)));
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        return v;
    };

    for (int i = 0; i < 1000; ++i) {
        auto pred = random_set();
        auto want = random_set();
        Score s = score_one(sub(true, {"host_crash"}, pred), truth(true, {"host_crash"}, want));
        OracleScore o = oracle_devices(pred, want);
        CAPTURE(i);
        CHECK(s.precision == doctest::Approx(o.precision));
        CHECK(s.recall == doctest::Approx(o.recall));
        CHECK(s.f1 == doctest::Approx(o.f1));
        CHECK(s.exact_devices == (pred == want));
    }
}

TEST_CASE("label comparison is set equality, order-blind") {
    Score s = score_one(sub(true, {"b", "a"}, {}), truth(true, {"a", "b"}, {}));
    CHECK(s.label_correct);
    s = score_one(sub(true, {"a"}, {}), truth(true, {"a", "b"}, {}));
    CHECK_FALSE(s.label_correct);
    s = score_one(sub(true, {"a", "a"}, {}), truth(true, {"a"}, {}));
    CHECK(s.label_correct);  // duplicates collapse
}

TEST_CASE("aggregation: means, pools, and the efficiency ratio") {
    std::vector<ScoredIncident> rows(3);

    rows[0].truth = truth(true, {"link_down"}, {"r1", "r2"});
    rows[0].submission = sub(true, {"link_down"}, {"r1", "r2"});
    rows[0].tool_calls = 10;

    rows[1].truth = truth(true, {"host_crash"}, {"h1"});
    rows[1].submission = sub(true, {"host_crash"}, {"h1", "h2"});  // P=1/2 R=1 F1=2/3
    rows[1].tool_calls = 20;

    rows[2].truth = truth(false, {}, {});
    rows[2].submission = sub(false, {}, {});
    rows[2].tool_calls = 6;

    for (auto& r : rows) r.score = score_one(r.submission, r.truth);
    Aggregate a = aggregate(rows);

    CHECK(a.incidents == 3);
    CHECK(a.detection_correct == 3);
    CHECK(a.label_correct == 3);
    CHECK(a.exact_devices == 2);
    CHECK(a.mean_f1 == doctest::Approx((1.0 + 2.0 / 3.0 + 1.0) / 3.0));
    // micro pools: tp=2+1+0=3, pred=2+2+0=4, want=2+1+0=3
    double mp = 3.0 / 4.0, mr = 3.0 / 3.0;
    CHECK(a.micro_f1 == doctest::Approx(2 * mp * mr / (mp + mr)));
    CHECK(a.benign_total == 1);
    CHECK(a.benign_correct == 1);
    CHECK(a.tool_calls == 36);
    // fully correct (detection+label+exact devices): rows 0 and 2
    REQUIRE(a.tool_calls_per_correct.has_value());
    CHECK(*a.tool_calls_per_correct == doctest::Approx(36.0 / 2.0));
}

TEST_CASE("the efficiency ratio reproduces the published anchor") {
    // 382 fully-correct diagnoses at 10393 tool calls is 27.2 per solve.
    std::vector<ScoredIncident> rows(382);
    for (auto& r : rows) {
        r.truth = truth(true, {"host_crash"}, {"h"});
        r.submission = sub(true, {"host_crash"}, {"h"});
        r.score = score_one(r.submission, r.truth);
    }
    rows[0].tool_calls = 10393 - 381;
    for (size_t i = 1; i < rows.size(); ++i) rows[i].tool_calls = 1;
    Aggregate a = aggregate(rows);
    REQUIRE(a.tool_calls_per_correct.has_value());
    CHECK(*a.tool_calls_per_correct == doctest::Approx(27.2).epsilon(0.001));
}

TEST_CASE("zero solves leaves the ratio undefined rather than dividing by zero") {
    std::vector<ScoredIncident> rows(2);
    for (auto& r : rows) {
        r.truth = truth(true, {"host_crash"}, {"h"});
        r.submission = std::nullopt;  // starved
        r.score = score_one(r.submission, r.truth);
        r.tool_calls = 20;
    }
    Aggregate a = aggregate(rows);
    CHECK(a.detection_correct == 0);
    CHECK(a.mean_f1 == 0.0);
    CHECK_FALSE(a.tool_calls_per_correct.has_value());
}

TEST_CASE("aggregate of an empty slice is well-defined") {
    Aggregate a = aggregate({});
    CHECK(a.incidents == 0);
    CHECK(a.mean_f1 == 0.0);
    CHECK_FALSE(a.tool_calls_per_correct.has_value());
}
