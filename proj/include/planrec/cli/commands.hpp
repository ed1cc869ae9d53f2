#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <iostream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "planrec/bayes/network.hpp"
#include "planrec/bayes/network_json.hpp"
#include "planrec/infer/elimination.hpp"
#include "planrec/recog/roles.hpp"
#include "planrec/recog/scenario.hpp"
#include "planrec/traffic/builder.hpp"
#include "planrec/traffic/params.hpp"
#include "planrec/traffic/scenarios.hpp"

namespace planrec::cli {

enum ExitCode : int {
    kOk = 0,
    kUsageError = 1,
    kValidationFailure = 2,
    kInconsistentEvidence = 3,
    kCheckFailure = 4,
};

struct Options {
    std::string net = "traffic"; // "traffic", "traffic-mini" or a network JSON path
    std::string scenario;
    std::vector<std::string> targets;
    std::string params;
    std::uint64_t seed = 0;
    std::size_t n = 1;
    bool json = false;
    std::string out;
};

/// Absolute tolerance of the calibration band around the published values.
inline constexpr double kCalibrationBand = 0.15;

inline traffic::TrafficParams load_params(const Options& o) {
    return o.params.empty() ? traffic::TrafficParams{} : traffic::load_params_file(o.params);
}

inline bayes::Network load_network(const Options& o) {
    if (o.net == "traffic") return traffic::build_traffic_network(load_params(o));
    if (o.net == "traffic-mini") return traffic::traffic_mini(load_params(o));
    return bayes::load_network_file(o.net);
}

/// Fixed 4-decimal rendering, independent of stream locale.
inline std::string fixed4(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", v);
    return buf;
}

inline std::string pad(const std::string& s, std::size_t width) {
    return s.size() >= width ? s + " " : s + std::string(width - s.size(), ' ');
}

namespace detail {

inline void write_output(const Options& o, const std::string& text, std::ostream& out) {
    if (o.out.empty())
        out << text;
    else
        bayes::write_text_file(o.out, text);
}

inline void render_posterior(const infer::Posterior& p, std::ostream& out) {
    out << p.target << "\n";
    std::size_t width = 8;
    for (const auto& l : p.labels) width = std::max(width, l.size() + 2);
    for (std::size_t k = 0; k < p.labels.size(); ++k)
        out << "  " << pad(p.labels[k], width) << fixed4(p.distribution[k]) << "\n";
    out << "  argmax: " << infer::argmax_posterior(p) << "\n";
}

inline nlohmann::ordered_json posterior_json(const infer::Posterior& p) {
    nlohmann::ordered_json j;
    j["target"] = p.target;
    nlohmann::ordered_json dist = nlohmann::ordered_json::object();
    for (std::size_t k = 0; k < p.labels.size(); ++k) dist[p.labels[k]] = p.distribution[k];
    j["distribution"] = dist;
    j["argmax"] = infer::argmax_posterior(p);
    return j;
}

} // namespace detail

/// Posterior table for each target under a scenario's evidence.
inline int cmd_query(const Options& o, std::ostream& out, std::ostream& err) {
    bayes::Network net;
    recog::Scenario scenario;
    try {
        net = load_network(o);
        if (!o.scenario.empty()) scenario = recog::load_scenario_file(o.scenario);
    } catch (const ModelError& ex) {
        err << "error: " << ex.what() << "\n";
        return kUsageError;
    }
    for (const auto& t : o.targets) scenario.targets.push_back(t);
    if (scenario.targets.empty()) {
        err << "error: no query targets (use --target or a scenario file with targets)\n";
        return kUsageError;
    }
    try {
        recog::validate_scenario(net, scenario);
    } catch (const ModelError& ex) {
        err << "error: " << ex.what() << "\n";
        return kValidationFailure;
    }
    const auto result = recog::query_all(net, scenario.evidence, scenario.targets);
    if (!result.consistent) {
        if (o.json) {
            nlohmann::ordered_json j;
            j["scenario"] = scenario.name;
            j["consistent"] = false;
            out << j.dump(2) << "\n";
        }
        err << "inconsistent evidence: the observations have probability zero\n";
        return kInconsistentEvidence;
    }
    if (o.json) {
        nlohmann::ordered_json j;
        j["scenario"] = scenario.name;
        j["consistent"] = true;
        j["posteriors"] = nlohmann::ordered_json::array();
        for (const auto& t : scenario.targets) j["posteriors"].push_back(detail::posterior_json(result.posteriors.at(t)));
        out << j.dump(2) << "\n";
        return kOk;
    }
    if (!scenario.name.empty()) out << "scenario: " << scenario.name << "\n";
    for (const auto& [var, label] : scenario.evidence) out << "  evidence " << var << " = " << label << "\n";
    for (const auto& t : scenario.targets) detail::render_posterior(result.posteriors.at(t), out);
    return kOk;
}

/// One computed-vs-published comparison in the `paper` command report.
struct ReferenceRow {
    std::string scenario;
    std::string variable;
    std::string label;
    double computed;
    double reference;
};

struct CheckResult {
    std::string name;
    bool pass;
    std::string detail;
};

struct PaperReport {
    std::vector<ReferenceRow> rows;
    std::vector<CheckResult> checks;
    std::map<std::string, std::map<std::string, infer::Posterior>> posteriors; // scenario -> target -> posterior

    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

/// Runs the three worked scenarios and evaluates the structural, qualitative
/// and calibration checks on the result.
inline PaperReport run_paper(const traffic::TrafficParams& params) {
    namespace n = traffic::names;
    const auto net = traffic::build_traffic_network(params);
    PaperReport report;
    const auto scenarios = traffic::paper_scenarios();
    for (const auto& ps : scenarios) {
        for (const auto& t : ps.scenario.targets)
            report.posteriors[ps.scenario.name].emplace(t, infer::posterior(net, ps.scenario.evidence, t));
        for (const auto& r : ps.reference) {
            const auto& p = report.posteriors[ps.scenario.name].at(r.variable);
            report.rows.push_back({ps.scenario.name, r.variable, r.label, p.consistent ? p.probability(r.label) : NAN,
                                   r.value});
        }
    }
    auto prob = [&](const std::string& s, const std::string& var, const std::string& label) {
        const auto& p = report.posteriors.at(s).at(var);
        return p.consistent ? p.probability(label) : NAN;
    };
    auto check = [&](std::string name, bool pass, std::string detail) {
        report.checks.push_back({std::move(name), pass, std::move(detail)});
    };

    // Structural zeros.
    for (const auto& ps : scenarios) {
        const auto& s = ps.scenario.name;
        const auto joint = infer::joint_posterior(net, ps.scenario.evidence, {n::gen, n::spec});
        double leak = 0.0;
        if (joint.consistent) {
            const std::size_t pass = traffic::idx(traffic::Maneuver::pass);
            const std::size_t none = traffic::idx(traffic::SpecPass::none);
            for (std::size_t g = 0; g < traffic::kManeuvers; ++g)
                for (std::size_t sp = 0; sp < 4; ++sp)
                    if (g != pass && sp != none) leak += joint.table.values[g * 4 + sp];
        }
        check("subsumption zero (" + s + ")", joint.consistent && leak == 0.0,
              "P(spec pass != none, gen maneuver != pass) = " + std::to_string(leak));

        const auto lane = *net.variable(n::x0).domain.index_of(ps.scenario.evidence.at(n::x0));
        std::string nonzero;
        for (std::size_t m = 0; m < traffic::kManeuvers; ++m) {
            if (traffic::feasible(static_cast<traffic::Maneuver>(m), static_cast<traffic::Lane>(lane))) continue;
            if (prob(s, n::gen, traffic::maneuver_labels()[m]) != 0.0) nonzero += " " + traffic::maneuver_labels()[m];
        }
        check("lane-infeasible maneuvers zero (" + s + ")", nonzero.empty(),
              nonzero.empty() ? "all exactly 0" : "nonzero:" + nonzero);
    }
    {
        std::string nonzero;
        for (const char* m : {"stay", "left1", "left2", "right2", "enter"})
            if (prob("A", n::gen, m) != 0.0) nonzero += std::string(" ") + m;
        check("scenario A excluded plans zero", nonzero.empty(),
              nonzero.empty() ? "stay, left1, left2, right2, enter exactly 0" : "nonzero:" + nonzero);
    }

    // Qualitative arc.
    const std::string arg_a = infer::argmax_posterior(report.posteriors.at("A").at(n::gen));
    const std::string arg_b = infer::argmax_posterior(report.posteriors.at("B").at(n::gen));
    check("argmax gen maneuver | A = right1", arg_a == "right1", "argmax = " + arg_a);
    check("argmax gen maneuver | B = pass", arg_b == "pass", "argmax = " + arg_b);
    const double pa = prob("A", n::gen, "pass"), pb = prob("B", n::gen, "pass"), pc = prob("C", n::gen, "pass");
    check("P(pass) increases A < B < C", pa < pb && pb < pc,
          fixed4(pa) + " < " + fixed4(pb) + " < " + fixed4(pc));
    const double ra = prob("A", n::x2, "right"), ma = prob("A", n::x2, "middle");
    const double rb = prob("B", n::x2, "right"), mb = prob("B", n::x2, "middle");
    check("x position t2 | A: right > middle", ra > ma, fixed4(ra) + " > " + fixed4(ma));
    check("x position t2 shifts toward middle A -> B with the published ordering", rb - mb < ra - ma && rb > mb,
          "right-middle gap " + fixed4(ra - ma) + " -> " + fixed4(rb - mb));

    // Calibration band.
    for (const auto& r : report.rows) {
        const double dev = std::abs(r.computed - r.reference);
        check("band " + r.scenario + " " + r.variable + "=" + r.label, dev <= kCalibrationBand,
              "|" + fixed4(r.computed) + " - " + fixed4(r.reference) + "| = " + fixed4(dev));
    }
    return report;
}

inline int cmd_paper(const Options& o, std::ostream& out, std::ostream& err) {
    traffic::TrafficParams params;
    try {
        params = load_params(o);
    } catch (const ModelError& ex) {
        err << "error: " << ex.what() << "\n";
        return kUsageError;
    }
    const PaperReport report = run_paper(params);
    if (o.json) {
        nlohmann::ordered_json j;
        j["rows"] = nlohmann::ordered_json::array();
        for (const auto& r : report.rows)
            j["rows"].push_back({{"scenario", r.scenario},
                                 {"variable", r.variable},
                                 {"label", r.label},
                                 {"computed", r.computed},
                                 {"reference", r.reference},
                                 {"deviation", std::abs(r.computed - r.reference)}});
        j["posteriors"] = nlohmann::ordered_json::object();
        for (const auto& [s, by_target] : report.posteriors) {
            j["posteriors"][s] = nlohmann::ordered_json::array();
            for (const auto& [t, p] : by_target)
                j["posteriors"][s].push_back(detail::posterior_json(p));
        }
        j["checks"] = nlohmann::ordered_json::array();
        for (const auto& c : report.checks)
            j["checks"].push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
        j["all_pass"] = report.all_pass();
        out << j.dump(2) << "\n";
        return report.all_pass() ? kOk : kCheckFailure;
    }

    const auto scenarios = traffic::paper_scenarios();
    for (const auto& ps : scenarios) {
        out << "Scenario " << ps.scenario.name << ":";
        for (const auto& [var, label] : ps.scenario.evidence) out << " [" << var << " = " << label << "]";
        out << "\n";
        for (const auto& t : ps.scenario.targets) {
            const auto& p = report.posteriors.at(ps.scenario.name).at(t);
            out << "  " << t << "\n";
            out << "    " << pad("label", 10) << pad("computed", 10) << pad("reference", 11) << "deviation\n";
            for (std::size_t k = 0; k < p.labels.size(); ++k) {
                out << "    " << pad(p.labels[k], 10) << pad(fixed4(p.distribution[k]), 10);
                bool found = false;
                for (const auto& r : ps.reference)
                    if (r.variable == t && r.label == p.labels[k]) {
                        out << pad(fixed4(r.value), 11) << fixed4(std::abs(p.distribution[k] - r.value));
                        found = true;
                    }
                if (!found) out << pad("-", 11) << "-";
                out << "\n";
            }
        }
    }
    out << "Checks:\n";
    std::size_t failed = 0;
    for (const auto& c : report.checks) {
        out << "  " << (c.pass ? "PASS " : "FAIL ") << c.name << " -- " << c.detail << "\n";
        if (!c.pass) ++failed;
    }
    out << (failed == 0 ? "all checks passed" : std::to_string(failed) + " check(s) failed") << "\n";
    return failed == 0 ? kOk : kCheckFailure;
}

inline int cmd_validate(const Options& o, std::ostream& out, std::ostream& err) {
    bayes::Network net;
    try {
        net = load_network(o);
    } catch (const ModelError& ex) {
        err << "error: " << ex.what() << "\n";
        return kUsageError;
    }
    const auto structural = bayes::validate_network(net);
    const auto roles = recog::validate_roles(net);
    for (const auto& v : structural) out << "[" << v.rule << "] " << v.subject << ": " << v.message << "\n";
    for (const auto& v : roles) out << "[" << v.rule << "] " << v.subject() << ": " << v.message << "\n";
    const std::size_t total = structural.size() + roles.size();
    out << total << " violation" << (total == 1 ? "" : "s") << "\n";
    return total == 0 ? kOk : kValidationFailure;
}

/// One line per sample: `var=label` pairs in topological order, tab separated.
inline std::string format_samples(const bayes::Network& net, const std::vector<bayes::Assignment>& samples) {
    const auto order = bayes::topological_indices(net);
    std::string text;
    for (const auto& a : samples) {
        for (std::size_t k = 0; k < order.size(); ++k) {
            if (k) text += '\t';
            const auto& v = net.variable(order[k]);
            text += v.id;
            text += '=';
            text += v.domain.label(a[order[k]]);
        }
        text += '\n';
    }
    return text;
}

inline int cmd_sample(const Options& o, std::ostream& out, std::ostream& err) {
    try {
        if (o.n < 1) throw ModelError("--n must be at least 1");
        const auto net = load_network(o);
        const auto violations = bayes::validate_network(net);
        if (!violations.empty()) {
            err << "error: network is invalid (" << violations.size() << " violations); run validate\n";
            return kValidationFailure;
        }
        detail::write_output(o, format_samples(net, bayes::forward_sample(net, o.seed, o.n)), out);
    } catch (const ModelError& ex) {
        err << "error: " << ex.what() << "\n";
        return kUsageError;
    }
    return kOk;
}

inline int cmd_export(const Options& o, std::ostream& out, std::ostream& err) {
    try {
        detail::write_output(o, bayes::export_network(load_network(o)), out);
    } catch (const ModelError& ex) {
        err << "error: " << ex.what() << "\n";
        return kUsageError;
    }
    return kOk;
}

} // namespace planrec::cli
