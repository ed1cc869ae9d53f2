#pragma once

#include <array>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "planrec/bayes/network.hpp"
#include "planrec/infer/elimination.hpp"

namespace planrec::recog {

using bayes::Evidence;
using bayes::Network;
using bayes::Role;
using bayes::TimeIndex;
using bayes::VarIndex;
using bayes::VariableId;
using infer::Posterior;

/// Structural rule of the recognition scaffold, decidable from the graph alone.
struct RoleRule {
    std::string name;
    std::string description;
};

inline const std::array<RoleRule, 6>& role_rules() {
    static const std::array<RoleRule, 6> rules{{
        {"R1", "Context variables have only Context parents"},
        {"R2", "MentalState parents are Context or MentalState"},
        {"R3", "Plan parents are MentalState, Context or Plan"},
        {"R4", "Activity and Communication parents are Plan, Activity or Communication"},
        {"R5", "Effect parents are Context, Activity or Effect"},
        {"R6", "no edge from a later time tag to a strictly earlier one"},
    }};
    return rules;
}

/// Per-rule switches; every rule is on by default.
struct RoleRuleConfig {
    std::array<bool, 6> enabled{true, true, true, true, true, true};

    bool on(std::size_t rule_number) const { return enabled.at(rule_number - 1); }
};

struct Violation {
    std::string rule;
    VariableId parent; // empty for variable-level violations
    VariableId child;
    std::string message;

    std::string subject() const { return parent.empty() ? child : parent + " -> " + child; }
};

/// Rule number (1-5) governing parents of a variable with role `child`.
inline std::size_t parent_rule_for(Role child) {
    switch (child) {
    case Role::Context: return 1;
    case Role::MentalState: return 2;
    case Role::Plan: return 3;
    case Role::Activity:
    case Role::Communication: return 4;
    case Role::Effect: return 5;
    }
    return 0;
}

/// Whether an edge parent -> child is allowed by the role rules R1-R5.
inline bool role_edge_allowed(Role parent, Role child) {
    switch (child) {
    case Role::Context: return parent == Role::Context;
    case Role::MentalState: return parent == Role::Context || parent == Role::MentalState;
    case Role::Plan: return parent == Role::MentalState || parent == Role::Context || parent == Role::Plan;
    case Role::Activity:
    case Role::Communication:
        return parent == Role::Plan || parent == Role::Activity || parent == Role::Communication;
    case Role::Effect: return parent == Role::Context || parent == Role::Activity || parent == Role::Effect;
    }
    return false;
}

inline bool time_edge_allowed(TimeIndex parent, TimeIndex child) {
    return bayes::time_rank(parent) <= bayes::time_rank(child);
}

/// Every edge breaking an enabled rule; one entry per (edge, rule).
inline std::vector<Violation> validate_roles(const Network& net, const RoleRuleConfig& cfg = {}) {
    std::vector<Violation> out;
    const auto parents = net.parent_indices_unchecked();
    for (VarIndex c = 0; c < net.size(); ++c) {
        const auto& cv = net.variable(c);
        for (VarIndex p : parents[c]) {
            const auto& pv = net.variable(p);
            const std::size_t rule = parent_rule_for(cv.role);
            if (cfg.on(rule) && !role_edge_allowed(pv.role, cv.role)) {
                out.push_back({"R" + std::to_string(rule), pv.id, cv.id,
                               std::string(bayes::to_string(pv.role)) + " parent of " +
                                   std::string(bayes::to_string(cv.role)) + " variable: " +
                                   role_rules()[rule - 1].description});
            }
            if (cfg.on(6) && !time_edge_allowed(pv.time, cv.time)) {
                out.push_back({"R6", pv.id, cv.id,
                               "edge points backward in time (" + std::string(bayes::to_string(pv.time)) + " -> " +
                                   std::string(bayes::to_string(cv.time)) + ")"});
            }
        }
    }
    return out;
}

/// Throws if `e` binds a variable that cannot be observed.
inline void require_observable(const Network& net, const Evidence& e) {
    for (const auto& [id, label] : e) {
        auto vi = net.find(id);
        if (!vi) throw ModelError("unknown variable '" + id + "'");
        const auto& v = net.variable(*vi);
        if (!v.observable)
            throw ModelError("evidence on unobservable variable '" + id + "' (role " +
                             std::string(bayes::to_string(v.role)) + ")");
        if (!v.domain.index_of(label))
            throw ModelError("label '" + label + "' is not in the domain of '" + id + "'");
    }
}

/// Posteriors for a set of variables under one evidence set. When the
/// evidence has zero probability the whole query is flagged and `posteriors`
/// is empty.
struct QueryResult {
    bool consistent = true;
    std::map<VariableId, Posterior> posteriors;
};

inline QueryResult query_all(const Network& net, const Evidence& e, const std::vector<VariableId>& targets) {
    QueryResult out;
    for (const auto& t : targets) {
        Posterior p = infer::posterior(net, e, t);
        if (!p.consistent) {
            out.consistent = false;
            out.posteriors.clear();
            return out;
        }
        out.posteriors.emplace(t, std::move(p));
    }
    return out;
}

/// Posterior of every Plan variable given observable evidence.
inline QueryResult recognize(const Network& net, const Evidence& e) {
    require_observable(net, e);
    std::vector<VariableId> targets;
    for (const auto& v : net.variables())
        if (v.role == Role::Plan) targets.push_back(v.id);
    return query_all(net, e, targets);
}

/// Posterior of every Effect variable tagged `time` (t1 or t2).
inline QueryResult predict(const Network& net, const Evidence& e, TimeIndex time) {
    if (time != TimeIndex::t1 && time != TimeIndex::t2)
        throw ModelError("prediction horizon must be t1 or t2, got " + std::string(bayes::to_string(time)));
    require_observable(net, e);
    std::vector<VariableId> targets;
    for (const auto& v : net.variables())
        if (v.role == Role::Effect && v.time == time) targets.push_back(v.id);
    return query_all(net, e, targets);
}

} // namespace planrec::recog
