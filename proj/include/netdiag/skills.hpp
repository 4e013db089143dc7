#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "netdiag/fault.hpp"
#include "netdiag/probes.hpp"

namespace netdiag {

// ---------------------------------------------------------------------------
// Symptoms: what the matrix or a deep-scan sweep points at.
// ---------------------------------------------------------------------------

enum class SymptomKind {
    reachability_fail,     // loss / timeout / unreachable rows
    reachability_unknown,  // name resolution failed at the source
    scan_flag,             // deep-scan finding
};

// How the failing rows cluster structurally.
enum class ClusterKind {
    none,
    host,        // one host, both directions affected
    dst,         // everyone fails toward one host
    src,         // one host fails toward everyone
    src_partial, // one host fails toward one foreign subnet only
    subnet,      // one subnet cut off in both directions
    path,        // rows share transit devices
    resolver,    // sources cannot resolve names at all
    record,      // one name unresolvable from everywhere else
};

struct Symptom {
    SymptomKind kind = SymptomKind::reachability_fail;
    ClusterKind cluster = ClusterKind::none;
    std::vector<std::string> devices;   // candidate devices, sorted
    std::vector<std::string> evidence;  // human-readable supporting observations
    std::optional<FaultLabel> hint;     // label hint from a deep-scan flag
    std::optional<FaultFamily> family;  // family from a deep-scan flag
    int phase = 0;                      // 0 = reachability matrix, 1..4 = scan phase
    int row_count = 0;                  // matrix rows backing this symptom
    std::optional<Ipv4> sample_dst_ip;  // a failing destination, for route guards
    std::optional<std::string> sample_src;  // a failing source, for re-probes
    std::optional<std::string> sample_dst;
    bool confirmed = false;
    bool checked = false;

    std::string describe() const;  // one-line form used in traces
};

// ---------------------------------------------------------------------------
// Skill files: declarative fingerprints owned by exactly one skill each.
// ---------------------------------------------------------------------------

class SkillError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct Fingerprint {
    FaultLabel label = FaultLabel::host_crash;
    // Candidate selector: symptom | routers | hosts | subnet-peers | role:<r>
    std::string candidates = "symptom";
    std::vector<std::pair<ProbeKind, std::string>> plan;  // ordered (kind, param)
    std::vector<std::pair<std::string, bool>> atoms;      // (atom, negated); AND-ed
};

struct Delegate {
    FaultLabel label = FaultLabel::host_crash;
    std::string owner_skill;  // skill whose fingerprint settles this label
};

struct Skill {
    std::string id;
    std::string family;  // fault family name, or "utility"
    std::vector<std::string> signals;
    std::vector<Fingerprint> fingerprints;
    std::vector<Delegate> delegates;
    std::string stop = "first-full-match";
    std::string escalate = "return-to-index";

    bool is_utility() const { return family == "utility"; }
};

struct SkillSet {
    std::map<std::string, Skill> skills;      // id -> skill
    std::map<FaultLabel, std::string> owner;  // label -> owning skill id

    const Skill* by_id(const std::string& id) const;
    // The owning skill's fingerprint for this label.
    const Fingerprint* fingerprint_for(FaultLabel label) const;
};

// Parse one skill file. Throws SkillError with file/line context.
Skill parse_skill(const std::string& name, const std::string& text);
// Parse + validate a whole set: every catalog label owned exactly once,
// delegates resolvable, atoms known and backed by the declared probe plan.
SkillSet parse_skill_set(const std::map<std::string, std::string>& files);

// Skill texts embedded at build time from skills/*.skill.
const std::map<std::string, std::string>& builtin_skill_files();
SkillSet load_builtin_skills();
// Load *.skill files from a directory instead (same validation).
SkillSet load_skills_from_dir(const std::string& dir);

// Closed atom vocabulary: name -> probe kinds the atom reads.
const std::map<std::string, std::vector<ProbeKind>>& atom_requirements();

// ---------------------------------------------------------------------------
// Fault index: symptom -> skill routing with guard probes.
// ---------------------------------------------------------------------------

struct Route {
    std::string skill;               // skill id, or "broad-search"
    std::optional<FaultLabel> hint;  // fingerprint to try first
    std::string rule;                // index rule that fired, for the trace
};

Route map_symptom(const ProbeContext& ctx, ToolCallLedger& ledger, const Symptom& s,
                  const SkillSet& skills);

// ---------------------------------------------------------------------------
// Skill execution.
// ---------------------------------------------------------------------------

struct SkillMatch {
    FaultLabel label = FaultLabel::host_crash;
    std::vector<std::string> devices;  // localized culprits, sorted
    std::string evidence;              // which atom held where
};

// Fingerprints of `skill` in attempt order: hint's fingerprint first (when the
// skill owns or delegates it), then declared order. Delegated labels resolve
// to the owning skill's fingerprint.
std::vector<const Fingerprint*> fingerprint_order(const SkillSet& set, const Skill& skill,
                                                  std::optional<FaultLabel> hint);

// Run one fingerprint: probe every candidate (charged), evaluate the atoms,
// return the match with all candidates the predicate held for.
std::optional<SkillMatch> attempt_fingerprint(const ProbeContext& ctx, ToolCallLedger& ledger,
                                              const Fingerprint& fp, const Symptom& s);

// Candidate devices a fingerprint will probe for this symptom.
std::vector<std::string> resolve_candidates(const ProbeContext& ctx, const Fingerprint& fp,
                                            const Symptom& s);

// ---------------------------------------------------------------------------
// Submissions.
// ---------------------------------------------------------------------------

struct Submission {
    bool is_anomaly = false;
    std::vector<std::string> labels;   // sorted, deduplicated
    std::vector<std::string> devices;  // sorted, deduplicated
};

Submission canonicalize(const SkillMatch& m);
Submission benign_submission();

}  // namespace netdiag
