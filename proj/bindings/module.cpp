// Python bindings for the main operations: scenario generation, fault
// injection and audit, diagnosis, scoring, and the benchmark grid.
// Structured values cross the boundary as plain dicts/lists.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <nlohmann/json.hpp>

#include "netdiag/harness.hpp"
#include "netdiag/topology_json.hpp"

namespace py = pybind11;
using nlohmann::ordered_json;
using namespace netdiag;

namespace {

py::object json_to_py(const ordered_json& j) {
    switch (j.type()) {
        case ordered_json::value_t::null:
            return py::none();
        case ordered_json::value_t::boolean:
            return py::bool_(j.get<bool>());
        case ordered_json::value_t::number_integer:
            return py::int_(j.get<int64_t>());
        case ordered_json::value_t::number_unsigned:
            return py::int_(j.get<uint64_t>());
        case ordered_json::value_t::number_float:
            return py::float_(j.get<double>());
        case ordered_json::value_t::string:
            return py::str(j.get<std::string>());
        case ordered_json::value_t::array: {
            py::list l;
            for (const auto& e : j) l.append(json_to_py(e));
            return l;
        }
        case ordered_json::value_t::object: {
            py::dict d;
            for (const auto& [k, v] : j.items()) d[py::str(k)] = json_to_py(v);
            return d;
        }
        default:
            return py::none();
    }
}

ordered_json py_to_json(const py::handle& obj) {
    if (obj.is_none()) return nullptr;
    if (py::isinstance<py::bool_>(obj)) return obj.cast<bool>();
    if (py::isinstance<py::int_>(obj)) return obj.cast<int64_t>();
    if (py::isinstance<py::float_>(obj)) return obj.cast<double>();
    if (py::isinstance<py::str>(obj)) return obj.cast<std::string>();
    if (py::isinstance<py::list>(obj) || py::isinstance<py::tuple>(obj)) {
        ordered_json arr = ordered_json::array();
        for (const py::handle& e : obj) arr.push_back(py_to_json(e));
        return arr;
    }
    if (py::isinstance<py::dict>(obj)) {
        ordered_json o = ordered_json::object();
        for (const auto& item : obj.cast<py::dict>())
            o[item.first.cast<std::string>()] = py_to_json(item.second);
        return o;
    }
    throw py::type_error("unsupported value in JSON conversion");
}

Topology topo_from_py(const py::dict& d) { return topology_from_json(py_to_json(d)); }

FaultLabel label_or_throw(const std::string& s) {
    auto label = label_from_string(s);
    if (!label) throw py::value_error("unknown fault label: " + s);
    return *label;
}

std::vector<std::string> label_names() {
    std::vector<std::string> out;
    for (FaultLabel l : all_labels()) out.push_back(to_string(l));
    return out;
}

std::vector<std::string> family_names() {
    std::vector<std::string> out;
    for (FaultFamily f : all_families()) out.push_back(to_string(f));
    return out;
}

py::dict trace_to_py(const SessionTrace& tr) {
    return json_to_py(ordered_json::parse(tr.json())).cast<py::dict>();
}

py::dict row_to_py(const BenchRow& row) {
    py::dict d;
    d["incident_id"] = row.scored.incident.incident_id;
    d["excluded"] = row.excluded;
    if (row.excluded) {
        d["exclude_reason"] = row.exclude_reason;
        return d;
    }
    d["outcome"] = row.scored.outcome;
    d["turns_used"] = row.scored.turns_used;
    d["tool_calls"] = row.scored.tool_calls;
    d["submission"] = row.scored.submission
                          ? json_to_py(submission_to_json(*row.scored.submission))
                          : py::object(py::none());
    d["truth"] = json_to_py(truth_to_json(row.scored.truth));
    const Score& s = row.scored.score;
    py::dict sc;
    sc["detection_correct"] = s.detection_correct;
    sc["label_correct"] = s.label_correct;
    sc["precision"] = s.precision;
    sc["recall"] = s.recall;
    sc["f1"] = s.f1;
    sc["exact_devices"] = s.exact_devices;
    d["score"] = sc;
    d["trace"] = trace_to_py(row.trace);
    return d;
}

}  // namespace

PYBIND11_MODULE(_netdiag, m) {
    m.doc() = "deterministic network-fault simulator and diagnostic engine";

    m.attr("DEFAULT_BUDGET") = kDefaultBudget;
    m.attr("CATALOG_SIZE") = kCatalogSize;

    m.def("scenario_classes", &scenario_classes, "available scenario classes");
    m.def("size_classes", &size_classes, "available size classes");
    m.def("fault_labels", &label_names, "the full fault catalog");
    m.def("fault_families", &family_names, "fault families");
    m.def(
        "family_of",
        [](const std::string& label) { return to_string(family_of(label_or_throw(label))); },
        py::arg("label"), "family owning a fault label");

    m.def(
        "generate",
        [](const std::string& scenario, const std::string& size, uint64_t seed) {
            return json_to_py(topology_to_json(build_scenario(scenario, size, seed)));
        },
        py::arg("scenario"), py::arg("size"), py::arg("seed") = 1,
        "build a scenario topology as a dict");

    m.def(
        "enumerate_targets",
        [](const py::dict& topo, const std::string& label) {
            return enumerate_targets(topo_from_py(topo), label_or_throw(label));
        },
        py::arg("topology"), py::arg("label"), "injectable targets for a label");

    m.def(
        "inject",
        [](const py::dict& topo, const std::string& label, const std::string& target,
           uint64_t seed) {
            InjectionResult r = inject(topo_from_py(topo), label_or_throw(label), target, seed);
            py::dict d;
            d["topology"] = json_to_py(topology_to_json(r.topo));
            d["truth"] = json_to_py(truth_to_json(r.truth));
            return d;
        },
        py::arg("topology"), py::arg("label"), py::arg("target"), py::arg("seed") = 1,
        "apply a fault; returns the mutated topology and ground truth");

    m.def(
        "verify_injection",
        [](const py::dict& topo, const py::dict& truth) {
            VerifyResult vr = verify_injection(topo_from_py(topo), truth_from_json(py_to_json(truth)));
            py::dict d;
            d["verified"] = vr.verified;
            d["reason"] = vr.reason;
            return d;
        },
        py::arg("topology"), py::arg("truth"), "audit an injection independently");

    m.def(
        "verify_benign",
        [](const py::dict& topo) {
            std::string firing;
            bool ok = verify_benign(topo_from_py(topo), &firing);
            py::dict d;
            d["benign"] = ok;
            d["firing"] = firing;
            return d;
        },
        py::arg("topology"), "check that no fault predicate fires");

    m.def(
        "diagnose",
        [](const py::dict& incident, int budget) {
            Incident inc = incident_from_json(py_to_json(incident));
            SkillSet skills = load_builtin_skills();
            return row_to_py(run_incident(inc, skills, budget));
        },
        py::arg("incident"), py::arg("budget") = kDefaultBudget,
        "rebuild an incident's world, audit it, run the engine, score the run");

    m.def(
        "make_incident",
        [](const std::string& scenario, const std::string& size, uint64_t seed,
           const py::object& label, const py::object& target) {
            Incident inc;
            inc.scenario = scenario;
            inc.size = size;
            inc.seed = seed;
            if (!label.is_none()) inc.label = label.cast<std::string>();
            if (!target.is_none()) inc.target = target.cast<std::string>();
            inc.incident_id =
                scenario + "/" + size + "/" + (inc.label ? *inc.label : std::string("benign"));
            return json_to_py(incident_to_json(inc));
        },
        py::arg("scenario"), py::arg("size"), py::arg("seed") = 1,
        py::arg("label") = py::none(), py::arg("target") = py::none(),
        "assemble an incident record");

    m.def(
        "score",
        [](const py::object& submission, const py::dict& truth) {
            std::optional<Submission> sub;
            if (!submission.is_none())
                sub = submission_from_json(py_to_json(submission));
            Score s = score_one(sub, truth_from_json(py_to_json(truth)));
            py::dict d;
            d["submitted"] = s.submitted;
            d["detection_correct"] = s.detection_correct;
            d["label_correct"] = s.label_correct;
            d["precision"] = s.precision;
            d["recall"] = s.recall;
            d["f1"] = s.f1;
            d["exact_devices"] = s.exact_devices;
            return d;
        },
        py::arg("submission"), py::arg("truth"), "score one submission against ground truth");

    m.def(
        "run_bench",
        [](const std::string& filter, int budget, const std::string& out_dir, bool check,
           const std::string& sabotage) {
            BenchConfig cfg;
            cfg.filter = filter;
            cfg.budget = budget;
            cfg.out_dir = out_dir;
            cfg.check = check;
            cfg.sabotage_label = sabotage;
            BenchResult res = run_bench(cfg);
            py::dict d;
            d["incidents"] = res.totals.incidents;
            d["detection_correct"] = res.totals.detection_correct;
            d["label_correct"] = res.totals.label_correct;
            d["exact_devices"] = res.totals.exact_devices;
            d["mean_f1"] = res.totals.mean_f1;
            d["micro_f1"] = res.totals.micro_f1;
            d["benign_correct"] = res.totals.benign_correct;
            d["benign_total"] = res.totals.benign_total;
            d["tool_calls"] = res.totals.tool_calls;
            d["tool_calls_per_correct"] =
                res.totals.tool_calls_per_correct
                    ? py::object(py::float_(*res.totals.tool_calls_per_correct))
                    : py::object(py::none());
            d["excluded"] = res.excluded;
            d["invariant_failures"] = res.invariant_failures;
            d["summary"] = render_summary(res);
            return d;
        },
        py::arg("filter") = "", py::arg("budget") = kDefaultBudget, py::arg("out_dir") = "",
        py::arg("check") = false, py::arg("sabotage") = "",
        "run the benchmark grid and return the headline metrics");

    m.def(
        "grid",
        [](const std::string& filter) {
            py::list out;
            for (const Incident& inc : build_grid(filter)) out.append(json_to_py(incident_to_json(inc)));
            return out;
        },
        py::arg("filter") = "", "the benchmark incident grid");
}
