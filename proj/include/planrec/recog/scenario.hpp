#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "planrec/bayes/network.hpp"
#include "planrec/bayes/network_json.hpp"
#include "planrec/recog/roles.hpp"

namespace planrec::recog {

/// Named evidence set plus the variables to query.
struct Scenario {
    std::string name;
    Evidence evidence;
    std::vector<VariableId> targets;
};

inline nlohmann::ordered_json scenario_to_json(const Scenario& s) {
    nlohmann::ordered_json j;
    j["name"] = s.name;
    j["evidence"] = nlohmann::ordered_json::object();
    for (const auto& [var, label] : s.evidence) j["evidence"][var] = label;
    j["targets"] = s.targets;
    return j;
}

inline Scenario scenario_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ModelError("scenario must be a JSON object");
    Scenario s;
    try {
        s.name = j.value("name", std::string{});
        if (j.contains("evidence")) {
            for (const auto& [var, label] : j.at("evidence").items()) s.evidence[var] = label.get<std::string>();
        }
        if (j.contains("targets")) s.targets = j.at("targets").get<std::vector<std::string>>();
    } catch (const nlohmann::json::exception& ex) {
        throw ModelError(std::string("scenario: ") + ex.what());
    }
    return s;
}

inline Scenario load_scenario_file(const std::string& path) {
    const std::string text = bayes::read_text_file(path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& ex) {
        throw ModelError(path + ": parse error at byte " + std::to_string(ex.byte) + ": " + ex.what());
    }
    return scenario_from_json(j);
}

/// Checks every referenced variable and label against `net` and that the
/// evidence only binds observable variables.
inline void validate_scenario(const Network& net, const Scenario& s) {
    require_observable(net, s.evidence);
    for (const auto& t : s.targets)
        if (!net.contains(t)) throw ModelError("unknown target variable '" + t + "'");
}

} // namespace planrec::recog
