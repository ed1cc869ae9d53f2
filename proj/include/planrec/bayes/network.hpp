#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <random>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "planrec/error.hpp"

namespace planrec::bayes {

using VariableId = std::string;
using VarIndex = std::size_t;
using State = std::size_t;

/// Tolerance used for every "sums to one" check in the library.
inline constexpr double kNormTolerance = 1e-9;

enum class Role { Context, MentalState, Plan, Communication, Activity, Effect };

enum class TimeIndex { t0, m0, m1, t1, t2, atemporal };

inline constexpr std::string_view to_string(Role r) {
    switch (r) {
    case Role::Context: return "Context";
    case Role::MentalState: return "MentalState";
    case Role::Plan: return "Plan";
    case Role::Communication: return "Communication";
    case Role::Activity: return "Activity";
    case Role::Effect: return "Effect";
    }
    return "?";
}

inline constexpr std::string_view to_string(TimeIndex t) {
    switch (t) {
    case TimeIndex::t0: return "t0";
    case TimeIndex::m0: return "m0";
    case TimeIndex::m1: return "m1";
    case TimeIndex::t1: return "t1";
    case TimeIndex::t2: return "t2";
    case TimeIndex::atemporal: return "atemporal";
    }
    return "?";
}

inline std::optional<Role> parse_role(std::string_view s) {
    for (Role r : {Role::Context, Role::MentalState, Role::Plan, Role::Communication,
                   Role::Activity, Role::Effect})
        if (to_string(r) == s) return r;
    return std::nullopt;
}

inline std::optional<TimeIndex> parse_time(std::string_view s) {
    for (TimeIndex t : {TimeIndex::t0, TimeIndex::m0, TimeIndex::m1, TimeIndex::t1,
                        TimeIndex::t2, TimeIndex::atemporal})
        if (to_string(t) == s) return t;
    return std::nullopt;
}

/// Causal rank of a time tag. Atemporal (mental state, plan) sits between
/// the initial context and the first action stage.
inline constexpr int time_rank(TimeIndex t) {
    switch (t) {
    case TimeIndex::t0: return 0;
    case TimeIndex::atemporal: return 1;
    case TimeIndex::m0: return 2;
    case TimeIndex::m1: return 3;
    case TimeIndex::t1: return 4;
    case TimeIndex::t2: return 5;
    }
    return -1;
}

/// Ordered set of category labels. The index of a label is its canonical encoding.
class Domain {
public:
    Domain() = default;

    explicit Domain(std::vector<std::string> labels) : labels_(std::move(labels)) {
        if (labels_.size() < 2)
            throw ModelError("domain needs at least 2 labels, got " + std::to_string(labels_.size()));
        std::set<std::string> seen;
        for (const auto& l : labels_)
            if (!seen.insert(l).second) throw ModelError("duplicate domain label '" + l + "'");
    }

    std::size_t size() const { return labels_.size(); }
    const std::string& label(State s) const { return labels_.at(s); }
    const std::vector<std::string>& labels() const { return labels_; }

    std::optional<State> index_of(std::string_view label) const {
        auto it = std::find(labels_.begin(), labels_.end(), label);
        if (it == labels_.end()) return std::nullopt;
        return static_cast<State>(it - labels_.begin());
    }

    bool operator==(const Domain&) const = default;

private:
    std::vector<std::string> labels_;
};

struct Variable {
    VariableId id;
    Domain domain;
    Role role = Role::Context;
    TimeIndex time = TimeIndex::atemporal;
    bool observable = false;
};

/// Conditional probability table. Rows enumerate parent assignments in
/// row-major order over `parents` (last parent varies fastest).
struct Cpt {
    std::vector<VariableId> parents;
    std::vector<std::vector<double>> rows;
};

/// Total assignment, one state per variable index.
using Assignment = std::vector<State>;

/// Partial assignment by label, keyed by variable id.
using Evidence = std::map<VariableId, std::string>;

/// Evidence resolved to indices.
using IndexedEvidence = std::map<VarIndex, State>;

class Network {
public:
    /// Adds a variable with an implicit uniform prior.
    VarIndex add_variable(VariableId id, Domain domain, Role role, TimeIndex time, bool observable) {
        if (id.empty()) throw ModelError("variable id must be non-empty");
        if (index_.count(id)) throw ModelError("duplicate variable id '" + id + "'");
        if (domain.size() < 2) throw ModelError("variable '" + id + "' needs a domain of at least 2 labels");
        const std::size_t k = domain.size();
        const VarIndex idx = vars_.size();
        index_.emplace(id, idx);
        vars_.push_back(Variable{std::move(id), std::move(domain), role, time, observable});
        cpts_.push_back(Cpt{{}, {std::vector<double>(k, 1.0 / static_cast<double>(k))}});
        return idx;
    }

    /// Replaces the CPT of `child` after checking shape, row validity and acyclicity.
    void set_cpt(const VariableId& child, std::vector<VariableId> parents,
                 std::vector<std::vector<double>> rows) {
        const VarIndex c = at(child);
        std::set<VariableId> uniq;
        std::size_t expected_rows = 1;
        for (const auto& p : parents) {
            if (!index_.count(p)) throw ModelError("CPT for '" + child + "' references unknown parent '" + p + "'");
            if (p == child) throw ModelError("cycle: '" + child + "' cannot be its own parent");
            if (!uniq.insert(p).second) throw ModelError("CPT for '" + child + "' lists parent '" + p + "' twice");
            expected_rows *= vars_[at(p)].domain.size();
        }
        if (rows.size() != expected_rows)
            throw ModelError("CPT for '" + child + "' has " + std::to_string(rows.size()) + " rows, expected " +
                             std::to_string(expected_rows));
        const std::size_t k = vars_[c].domain.size();
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (rows[r].size() != k)
                throw ModelError("CPT for '" + child + "' row " + std::to_string(r) + " has " +
                                 std::to_string(rows[r].size()) + " entries, expected " + std::to_string(k));
            if (auto msg = check_row(rows[r]))
                throw ModelError("CPT for '" + child + "' row " + std::to_string(r) + ": " + *msg);
        }
        std::vector<std::vector<VarIndex>> parent_idx = parent_indices_unchecked();
        parent_idx[c].clear();
        for (const auto& p : parents) parent_idx[c].push_back(at(p));
        if (has_cycle(parent_idx))
            throw ModelError("cycle: setting parents of '" + child + "' makes the graph cyclic");
        cpts_[c] = Cpt{std::move(parents), std::move(rows)};
    }

    /// Stores a CPT without any validation (used by import and fault injection).
    void set_cpt_unchecked(const VariableId& child, Cpt cpt) { cpts_[at(child)] = std::move(cpt); }

    /// Removes the CPT of `child`, leaving the network invalid until one is set again.
    void clear_cpt(const VariableId& child) { cpts_[at(child)].reset(); }

    std::size_t size() const { return vars_.size(); }
    const std::vector<Variable>& variables() const { return vars_; }
    const Variable& variable(VarIndex i) const { return vars_.at(i); }
    const Variable& variable(const VariableId& id) const { return vars_[at(id)]; }
    const std::optional<Cpt>& cpt(VarIndex i) const { return cpts_.at(i); }
    const std::optional<Cpt>& cpt(const VariableId& id) const { return cpts_[at(id)]; }

    std::optional<VarIndex> find(std::string_view id) const {
        auto it = index_.find(std::string(id));
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    VarIndex at(const VariableId& id) const {
        auto it = index_.find(id);
        if (it == index_.end()) throw ModelError("unknown variable '" + id + "'");
        return it->second;
    }

    bool contains(const VariableId& id) const { return index_.count(id) != 0; }

    /// Parent indices of `i`. Throws if the CPT is missing or names an unknown parent.
    std::vector<VarIndex> parents_of(VarIndex i) const {
        const auto& c = cpts_.at(i);
        if (!c) throw ModelError("variable '" + vars_[i].id + "' has no CPT");
        std::vector<VarIndex> out;
        out.reserve(c->parents.size());
        for (const auto& p : c->parents) {
            auto idx = find(p);
            if (!idx) throw ModelError("CPT for '" + vars_[i].id + "' references unknown parent '" + p + "'");
            out.push_back(*idx);
        }
        return out;
    }

    /// Parent lists with missing CPTs treated as roots and unknown parents dropped.
    std::vector<std::vector<VarIndex>> parent_indices_unchecked() const {
        std::vector<std::vector<VarIndex>> out(vars_.size());
        for (VarIndex i = 0; i < vars_.size(); ++i) {
            if (!cpts_[i]) continue;
            for (const auto& p : cpts_[i]->parents)
                if (auto idx = find(p)) out[i].push_back(*idx);
        }
        return out;
    }

    static std::optional<std::string> check_row(std::span<const double> row) {
        double sum = 0.0;
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (!std::isfinite(row[j])) return "entry " + std::to_string(j) + " is not finite";
            if (row[j] < 0.0) return "entry " + std::to_string(j) + " is negative";
            sum += row[j];
        }
        if (std::abs(sum - 1.0) > kNormTolerance) return "row sums to " + std::to_string(sum) + ", not 1";
        return std::nullopt;
    }

private:
    static bool has_cycle(const std::vector<std::vector<VarIndex>>& parents) {
        const std::size_t n = parents.size();
        std::vector<std::size_t> indeg(n, 0);
        std::vector<std::vector<VarIndex>> children(n);
        for (VarIndex c = 0; c < n; ++c)
            for (VarIndex p : parents[c]) {
                children[p].push_back(c);
                ++indeg[c];
            }
        std::vector<VarIndex> stack;
        for (VarIndex i = 0; i < n; ++i)
            if (indeg[i] == 0) stack.push_back(i);
        std::size_t seen = 0;
        while (!stack.empty()) {
            VarIndex v = stack.back();
            stack.pop_back();
            ++seen;
            for (VarIndex c : children[v])
                if (--indeg[c] == 0) stack.push_back(c);
        }
        return seen != n;
    }

    std::vector<Variable> vars_;
    std::vector<std::optional<Cpt>> cpts_;
    std::unordered_map<VariableId, VarIndex> index_;
};

/// One broken network invariant.
struct NetworkViolation {
    std::string subject; // variable id, or "a -> b" for an edge
    std::string rule;
    std::string message;
};

namespace detail {

/// Returns one edge (parent, child) lying on a directed cycle, if any.
inline std::optional<std::pair<VarIndex, VarIndex>> find_cycle_edge(
    const std::vector<std::vector<VarIndex>>& parents) {
    const std::size_t n = parents.size();
    std::vector<std::vector<VarIndex>> children(n);
    for (VarIndex c = 0; c < n; ++c)
        for (VarIndex p : parents[c]) children[p].push_back(c);
    // 0 = unvisited, 1 = on stack, 2 = done
    std::vector<int> color(n, 0);
    for (VarIndex root = 0; root < n; ++root) {
        if (color[root]) continue;
        std::vector<std::pair<VarIndex, std::size_t>> stack{{root, 0}};
        color[root] = 1;
        while (!stack.empty()) {
            auto& [v, next] = stack.back();
            if (next < children[v].size()) {
                VarIndex c = children[v][next++];
                if (color[c] == 1) return std::pair{v, c};
                if (color[c] == 0) {
                    color[c] = 1;
                    stack.emplace_back(c, 0);
                }
            } else {
                color[v] = 2;
                stack.pop_back();
            }
        }
    }
    return std::nullopt;
}

} // namespace detail

inline std::vector<NetworkViolation> validate_network(const Network& net) {
    std::vector<NetworkViolation> out;
    for (VarIndex i = 0; i < net.size(); ++i) {
        const Variable& v = net.variable(i);
        if (v.domain.size() < 2)
            out.push_back({v.id, "domain", "domain has fewer than 2 labels"});
        const auto& cpt = net.cpt(i);
        if (!cpt) {
            out.push_back({v.id, "missing-cpt", "variable has no CPT"});
            continue;
        }
        std::size_t expected_rows = 1;
        bool parents_ok = true;
        std::set<VariableId> seen;
        for (const auto& p : cpt->parents) {
            auto pi = net.find(p);
            if (!pi) {
                out.push_back({v.id, "unknown-parent", "CPT references unknown parent '" + p + "'"});
                parents_ok = false;
                continue;
            }
            if (!seen.insert(p).second) {
                out.push_back({v.id, "duplicate-parent", "CPT lists parent '" + p + "' twice"});
                parents_ok = false;
            }
            expected_rows *= net.variable(*pi).domain.size();
        }
        if (parents_ok && cpt->rows.size() != expected_rows) {
            out.push_back({v.id, "cpt-shape",
                           "CPT has " + std::to_string(cpt->rows.size()) + " rows, expected " +
                               std::to_string(expected_rows)});
        }
        for (std::size_t r = 0; r < cpt->rows.size(); ++r) {
            const auto& row = cpt->rows[r];
            if (row.size() != v.domain.size()) {
                out.push_back({v.id, "cpt-shape",
                               "CPT row " + std::to_string(r) + " has " + std::to_string(row.size()) +
                                   " entries, expected " + std::to_string(v.domain.size())});
                continue;
            }
            if (auto msg = Network::check_row(row))
                out.push_back({v.id, "cpt-row", "CPT row " + std::to_string(r) + ": " + *msg});
        }
    }
    if (auto edge = detail::find_cycle_edge(net.parent_indices_unchecked())) {
        const auto& a = net.variable(edge->first).id;
        const auto& b = net.variable(edge->second).id;
        out.push_back({a + " -> " + b, "cycle", "edge " + a + " -> " + b + " lies on a directed cycle"});
    }
    return out;
}

/// Parents-first order. Among ready variables the earliest time tag goes
/// first, then the lexicographically smallest id.
inline std::vector<VarIndex> topological_indices(const Network& net) {
    const auto parents = net.parent_indices_unchecked();
    const std::size_t n = net.size();
    std::vector<std::size_t> indeg(n, 0);
    std::vector<std::vector<VarIndex>> children(n);
    for (VarIndex c = 0; c < n; ++c)
        for (VarIndex p : parents[c]) {
            children[p].push_back(c);
            ++indeg[c];
        }
    auto later = [&](VarIndex a, VarIndex b) {
        const auto& va = net.variable(a);
        const auto& vb = net.variable(b);
        const int ra = time_rank(va.time), rb = time_rank(vb.time);
        return ra != rb ? ra > rb : va.id > vb.id;
    };
    std::priority_queue<VarIndex, std::vector<VarIndex>, decltype(later)> ready(later);
    for (VarIndex i = 0; i < n; ++i)
        if (indeg[i] == 0) ready.push(i);
    std::vector<VarIndex> order;
    order.reserve(n);
    while (!ready.empty()) {
        VarIndex v = ready.top();
        ready.pop();
        order.push_back(v);
        for (VarIndex c : children[v])
            if (--indeg[c] == 0) ready.push(c);
    }
    if (order.size() != n) throw ModelError("cycle detected: network has no topological order");
    return order;
}

inline std::vector<VariableId> topological_order(const Network& net) {
    std::vector<VariableId> out;
    for (VarIndex i : topological_indices(net)) out.push_back(net.variable(i).id);
    return out;
}

/// Flat CPT lookup tables resolved to indices, for sampling and joint evaluation.
struct CompiledCpt {
    std::vector<VarIndex> parents;
    std::vector<std::size_t> strides; // per parent, in rows
    const std::vector<std::vector<double>>* rows = nullptr;

    std::size_t row_of(const Assignment& a) const {
        std::size_t r = 0;
        for (std::size_t j = 0; j < parents.size(); ++j) r += a[parents[j]] * strides[j];
        return r;
    }
};

inline std::vector<CompiledCpt> compile_cpts(const Network& net) {
    std::vector<CompiledCpt> out(net.size());
    for (VarIndex i = 0; i < net.size(); ++i) {
        auto& c = out[i];
        c.parents = net.parents_of(i);
        c.strides.assign(c.parents.size(), 1);
        for (std::size_t j = c.parents.size(); j-- > 1;)
            c.strides[j - 1] = c.strides[j] * net.variable(c.parents[j]).domain.size();
        c.rows = &net.cpt(i)->rows;
    }
    return out;
}

/// Resolves labels to states. Unknown variables or labels throw.
inline IndexedEvidence index_evidence(const Network& net, const Evidence& e) {
    IndexedEvidence out;
    for (const auto& [id, label] : e) {
        auto vi = net.find(id);
        if (!vi) throw ModelError("unknown variable '" + id + "'");
        auto s = net.variable(*vi).domain.index_of(label);
        if (!s) throw ModelError("label '" + label + "' is not in the domain of '" + id + "'");
        out.emplace(*vi, *s);
    }
    return out;
}

/// Converts a labeled total assignment to states.
inline Assignment to_assignment(const Network& net, const Evidence& labeled) {
    IndexedEvidence idx = index_evidence(net, labeled);
    if (idx.size() != net.size())
        throw ModelError("assignment is partial: binds " + std::to_string(idx.size()) + " of " +
                         std::to_string(net.size()) + " variables");
    Assignment a(net.size());
    for (const auto& [i, s] : idx) a[i] = s;
    return a;
}

/// Chain-rule probability of a total assignment.
inline double joint_probability(const Network& net, const Assignment& a) {
    if (a.size() != net.size())
        throw ModelError("assignment is partial: has " + std::to_string(a.size()) + " of " +
                         std::to_string(net.size()) + " states");
    double p = 1.0;
    for (VarIndex i = 0; i < net.size(); ++i) {
        if (a[i] >= net.variable(i).domain.size())
            throw ModelError("state out of range for '" + net.variable(i).id + "'");
        const auto& cpt = net.cpt(i);
        if (!cpt) throw ModelError("variable '" + net.variable(i).id + "' has no CPT");
        std::size_t row = 0;
        for (const auto& pid : cpt->parents) {
            VarIndex pi = net.at(pid);
            row = row * net.variable(pi).domain.size() + a[pi];
        }
        p *= cpt->rows.at(row).at(a[i]);
        if (p == 0.0) return 0.0;
    }
    return p;
}

inline double joint_probability(const Network& net, const Evidence& labeled) {
    return joint_probability(net, to_assignment(net, labeled));
}

/// Uniform double in [0, 1) from the top 53 bits of a 64-bit draw; avoids
/// implementation-defined distribution objects.
inline double unit_uniform(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// Ancestral sampler over a validated network. Owns its generator
/// (std::mt19937_64 seeded with `seed`).
class ForwardSampler {
public:
    ForwardSampler(const Network& net, std::uint64_t seed)
        : net_(&net), order_(topological_indices(net)), cpts_(compile_cpts(net)), rng_(seed) {}

    Assignment draw() {
        Assignment a(net_->size(), 0);
        for (VarIndex v : order_) {
            const auto& row = (*cpts_[v].rows)[cpts_[v].row_of(a)];
            const double u = unit_uniform(rng_);
            double acc = 0.0;
            State s = row.size() - 1;
            for (State k = 0; k < row.size(); ++k) {
                acc += row[k];
                if (u < acc) {
                    s = k;
                    break;
                }
            }
            // Guard against rounding landing on a zero-probability tail entry.
            while (row[s] == 0.0 && s > 0) --s;
            a[v] = s;
        }
        return a;
    }

    const std::vector<VarIndex>& order() const { return order_; }

private:
    const Network* net_;
    std::vector<VarIndex> order_;
    std::vector<CompiledCpt> cpts_;
    std::mt19937_64 rng_;
};

inline std::vector<Assignment> forward_sample(const Network& net, std::uint64_t seed, std::size_t n) {
    if (n < 1) throw ModelError("sample count must be at least 1");
    ForwardSampler sampler(net, seed);
    std::vector<Assignment> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) out.push_back(sampler.draw());
    return out;
}

} // namespace planrec::bayes
