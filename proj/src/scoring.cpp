#include "netdiag/scoring.hpp"

#include <algorithm>
#include <set>

namespace netdiag {

namespace {

std::set<std::string> as_set(const std::vector<std::string>& v) {
    return std::set<std::string>(v.begin(), v.end());
}

}  // namespace

Score score_one(const std::optional<Submission>& sub, const GroundTruth& truth) {
    Score s;
    s.truth = int(truth.devices.size());
    if (!sub) return s;  // silence: zero across the board

    s.submitted = true;
    s.detection_correct = sub->is_anomaly == truth.is_anomaly;

    auto pred_labels = as_set(sub->labels);
    auto true_labels = as_set(truth.labels);
    s.label_correct = s.detection_correct && pred_labels == true_labels;

    auto pred = as_set(sub->devices);
    auto want = as_set(truth.devices);
    s.pred = int(pred.size());
    std::set<std::string> inter;
    std::set_intersection(pred.begin(), pred.end(), want.begin(), want.end(),
                          std::inserter(inter, inter.begin()));
    s.tp = int(inter.size());

    // Empty against empty is a perfect call (the benign case).
    s.precision = pred.empty() ? (want.empty() ? 1.0 : 0.0) : double(s.tp) / double(pred.size());
    s.recall = want.empty() ? (pred.empty() ? 1.0 : 0.0) : double(s.tp) / double(want.size());
    s.f1 = (s.precision + s.recall) > 0.0
               ? 2.0 * s.precision * s.recall / (s.precision + s.recall)
               : 0.0;
    s.exact_devices = pred == want;
    return s;
}

Aggregate aggregate(const std::vector<ScoredIncident>& rows) {
    Aggregate a;
    a.incidents = int(rows.size());
    double f1_sum = 0.0;
    long tp = 0, pred = 0, truth = 0;
    int solved = 0;
    for (const auto& r : rows) {
        const Score& s = r.score;
        if (s.submitted) ++a.submitted;
        if (s.detection_correct) ++a.detection_correct;
        if (s.label_correct) ++a.label_correct;
        if (s.exact_devices && s.submitted) ++a.exact_devices;
        f1_sum += s.f1;
        tp += s.tp;
        pred += s.pred;
        truth += s.truth;
        a.tool_calls += r.tool_calls;
        if (!r.truth.is_anomaly) {
            ++a.benign_total;
            if (s.submitted && !r.submission->is_anomaly) ++a.benign_correct;
        }
        if (s.detection_correct && s.label_correct && s.exact_devices) ++solved;
    }
    if (a.incidents > 0) a.mean_f1 = f1_sum / a.incidents;
    double micro_p = pred > 0 ? double(tp) / double(pred) : (truth == 0 ? 1.0 : 0.0);
    double micro_r = truth > 0 ? double(tp) / double(truth) : (pred == 0 ? 1.0 : 0.0);
    a.micro_f1 = (micro_p + micro_r) > 0.0 ? 2.0 * micro_p * micro_r / (micro_p + micro_r) : 0.0;
    if (solved > 0) a.tool_calls_per_correct = double(a.tool_calls) / double(solved);
    return a;
}

}  // namespace netdiag
