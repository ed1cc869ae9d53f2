#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "planrec/bayes/network.hpp"

namespace planrec::bayes {

/// Serializes a network. Variables and CPTs appear in insertion order; CPT
/// rows are row-major over the declared parent order (last parent fastest).
inline nlohmann::ordered_json network_to_json(const Network& net) {
    nlohmann::ordered_json vars = nlohmann::ordered_json::array();
    nlohmann::ordered_json cpts = nlohmann::ordered_json::array();
    for (VarIndex i = 0; i < net.size(); ++i) {
        const Variable& v = net.variable(i);
        nlohmann::ordered_json jv;
        jv["id"] = v.id;
        jv["labels"] = v.domain.labels();
        jv["role"] = std::string(to_string(v.role));
        jv["time"] = std::string(to_string(v.time));
        jv["observable"] = v.observable;
        vars.push_back(std::move(jv));
        if (const auto& c = net.cpt(i)) {
            nlohmann::ordered_json jc;
            jc["child"] = v.id;
            jc["parents"] = c->parents;
            jc["rows"] = c->rows;
            cpts.push_back(std::move(jc));
        }
    }
    nlohmann::ordered_json doc;
    doc["variables"] = std::move(vars);
    doc["cpts"] = std::move(cpts);
    return doc;
}

inline std::string export_network(const Network& net) { return network_to_json(net).dump(2) + "\n"; }

/// Builds a network from JSON without validating CPT contents, so a
/// corrupted file can still be loaded and reported by validate_network.
/// Structural problems that prevent loading (bad JSON, unknown role,
/// duplicate ids) throw ModelError.
inline Network network_from_json(const nlohmann::json& doc) {
    if (!doc.is_object() || !doc.contains("variables") || !doc["variables"].is_array())
        throw ModelError("network document must be an object with a 'variables' array");
    Network net;
    std::size_t k = 0;
    for (const auto& jv : doc["variables"]) {
        const std::string where = "variables[" + std::to_string(k++) + "]";
        try {
            auto role = parse_role(jv.at("role").get<std::string>());
            if (!role) throw ModelError(where + ": unknown role '" + jv.at("role").get<std::string>() + "'");
            auto time = parse_time(jv.at("time").get<std::string>());
            if (!time) throw ModelError(where + ": unknown time '" + jv.at("time").get<std::string>() + "'");
            net.add_variable(jv.at("id").get<std::string>(), Domain(jv.at("labels").get<std::vector<std::string>>()),
                             *role, *time, jv.at("observable").get<bool>());
        } catch (const nlohmann::json::exception& ex) {
            throw ModelError(where + ": " + ex.what());
        } catch (const ModelError& ex) {
            const std::string msg = ex.what();
            throw ModelError(msg.rfind(where, 0) == 0 ? msg : where + ": " + msg);
        }
    }
    // Variables listed without a CPT record are reported as missing CPTs.
    std::vector<bool> has_cpt(net.size(), false);
    if (doc.contains("cpts")) {
        if (!doc["cpts"].is_array()) throw ModelError("'cpts' must be an array");
        k = 0;
        for (const auto& jc : doc["cpts"]) {
            const std::string where = "cpts[" + std::to_string(k++) + "]";
            try {
                const auto child = jc.at("child").get<std::string>();
                auto ci = net.find(child);
                if (!ci) throw ModelError(where + ": unknown child '" + child + "'");
                if (has_cpt[*ci]) throw ModelError(where + ": second CPT for '" + child + "'");
                has_cpt[*ci] = true;
                Cpt cpt{jc.at("parents").get<std::vector<std::string>>(),
                        jc.at("rows").get<std::vector<std::vector<double>>>()};
                net.set_cpt_unchecked(child, std::move(cpt));
            } catch (const nlohmann::json::exception& ex) {
                throw ModelError(where + ": " + ex.what());
            }
        }
    }
    for (VarIndex i = 0; i < net.size(); ++i)
        if (!has_cpt[i]) net.clear_cpt(net.variable(i).id);
    return net;
}

/// Parses JSON text; parse errors carry the byte position reported by the parser.
inline Network import_network(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& ex) {
        throw ModelError(std::string("network JSON parse error at byte ") + std::to_string(ex.byte) + ": " +
                         ex.what());
    }
    return network_from_json(doc);
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ModelError("cannot open '" + path + "' for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ModelError("cannot open '" + path + "' for writing");
    out << text;
    if (!out) throw ModelError("failed writing '" + path + "'");
}

inline Network load_network_file(const std::string& path) {
    try {
        return import_network(read_text_file(path));
    } catch (const ModelError& ex) {
        throw ModelError(path + ": " + ex.what());
    }
}

} // namespace planrec::bayes
