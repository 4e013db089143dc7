#pragma once

// Benchmark scoring. Device localization is graded per incident with set
// precision/recall/F1 against ground truth; detection is the binary
// anomaly/no-anomaly call. A missing submission scores zero and counts as a
// detection miss.

#include <optional>
#include <string>
#include <vector>

#include "netdiag/fault.hpp"
#include "netdiag/skills.hpp"

namespace netdiag {

struct Score {
    bool submitted = false;
    bool detection_correct = false;  // submitted and anomaly bit matches
    bool label_correct = false;      // label sets equal (true for benign/benign)
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    bool exact_devices = false;  // device sets equal
    int tp = 0, pred = 0, truth = 0;  // pooled-F1 ingredients
};

Score score_one(const std::optional<Submission>& sub, const GroundTruth& truth);

struct ScoredIncident {
    Incident incident;
    GroundTruth truth;
    std::optional<Submission> submission;
    Score score;
    int turns_used = 0;
    int tool_calls = 0;
    std::string outcome;  // submitted | no_anomaly | no_submission
};

struct Aggregate {
    int incidents = 0;
    int submitted = 0;
    int detection_correct = 0;
    int label_correct = 0;
    int exact_devices = 0;
    double mean_f1 = 0.0;   // headline: per-incident mean
    double micro_f1 = 0.0;  // pooled over devices
    int benign_total = 0;
    int benign_correct = 0;  // benign incidents answered no-anomaly
    long tool_calls = 0;
    // Efficiency: total tool calls over incidents solved (detection and
    // labels and devices all correct). Unset when nothing was solved.
    std::optional<double> tool_calls_per_correct;
};

Aggregate aggregate(const std::vector<ScoredIncident>& rows);

}  // namespace netdiag
