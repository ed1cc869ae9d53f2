#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <set>
#include <string>
#include <vector>

#include "planrec/bayes/network.hpp"
#include "planrec/infer/factor.hpp"

namespace planrec::infer {

using bayes::Evidence;
using bayes::VariableId;

/// Total evidence mass at or below this is reported as inconsistent.
inline constexpr double kInconsistentMass = 1e-300;

struct Posterior {
    VariableId target;
    std::vector<std::string> labels;
    std::vector<double> distribution; // empty when inconsistent
    bool consistent = true;
    double evidence_probability = 0.0; // unnormalized P(e)

    double probability(const std::string& label) const {
        auto it = std::find(labels.begin(), labels.end(), label);
        if (it == labels.end()) throw ModelError("'" + label + "' is not a label of '" + target + "'");
        if (!consistent) throw ModelError("posterior of '" + target + "' is undefined: inconsistent evidence");
        return distribution[static_cast<std::size_t>(it - labels.begin())];
    }
};

/// Undirected interaction graph over variable indices.
using Graph = std::vector<std::set<VarIndex>>;

/// Moral graph: each variable linked to its parents, and co-parents married.
inline Graph moral_graph(const Network& net) {
    Graph g(net.size());
    for (VarIndex c = 0; c < net.size(); ++c) {
        auto ps = net.parents_of(c);
        for (std::size_t a = 0; a < ps.size(); ++a) {
            g[c].insert(ps[a]);
            g[ps[a]].insert(c);
            for (std::size_t b = a + 1; b < ps.size(); ++b) {
                g[ps[a]].insert(ps[b]);
                g[ps[b]].insert(ps[a]);
            }
        }
    }
    return g;
}

/// Number of missing edges among the neighbours of `v`.
inline std::size_t fill_in(const Graph& g, VarIndex v) {
    std::size_t fill = 0;
    const auto& nb = g[v];
    for (auto a = nb.begin(); a != nb.end(); ++a)
        for (auto b = std::next(a); b != nb.end(); ++b)
            if (!g[*a].count(*b)) ++fill;
    return fill;
}

/// Greedy min-fill elimination order over `candidates`. Ties go to the
/// lexicographically smallest variable id. Non-candidate nodes stay in the
/// graph and count toward fill.
inline std::vector<VarIndex> min_fill_order(Graph g, std::vector<VarIndex> candidates, const Network& net) {
    std::sort(candidates.begin(), candidates.end(),
              [&](VarIndex a, VarIndex b) { return net.variable(a).id < net.variable(b).id; });
    std::vector<VarIndex> order;
    order.reserve(candidates.size());
    std::vector<bool> done(candidates.size(), false);
    for (std::size_t step = 0; step < candidates.size(); ++step) {
        std::size_t best = candidates.size();
        std::size_t best_fill = std::numeric_limits<std::size_t>::max();
        for (std::size_t k = 0; k < candidates.size(); ++k) {
            if (done[k]) continue;
            const std::size_t f = fill_in(g, candidates[k]);
            if (f < best_fill) {
                best_fill = f;
                best = k;
            }
        }
        const VarIndex v = candidates[best];
        done[best] = true;
        order.push_back(v);
        for (VarIndex a : g[v])
            for (VarIndex b : g[v])
                if (a != b) g[a].insert(b);
        for (VarIndex a : g[v]) g[a].erase(v);
        g[v].clear();
    }
    return order;
}

/// Min-fill order on the moralized network over every variable not in `keep`.
inline std::vector<VariableId> min_fill_order(const Network& net, const std::set<VariableId>& keep) {
    std::vector<VarIndex> candidates;
    for (const auto& k : keep)
        if (!net.contains(k)) throw ModelError("unknown variable '" + k + "'");
    for (VarIndex i = 0; i < net.size(); ++i)
        if (!keep.count(net.variable(i).id)) candidates.push_back(i);
    std::vector<VariableId> out;
    for (VarIndex v : min_fill_order(moral_graph(net), std::move(candidates), net)) out.push_back(net.variable(v).id);
    return out;
}

namespace detail {

/// Ancestral closure of `seeds`; everything else is barren for the query.
inline std::vector<bool> relevant_set(const Network& net, const std::vector<VarIndex>& seeds) {
    std::vector<bool> rel(net.size(), false);
    std::vector<VarIndex> stack(seeds.begin(), seeds.end());
    while (!stack.empty()) {
        VarIndex v = stack.back();
        stack.pop_back();
        if (rel[v]) continue;
        rel[v] = true;
        for (VarIndex p : net.parents_of(v)) stack.push_back(p);
    }
    return rel;
}

struct ReducedProblem {
    std::vector<Factor> factors;
    std::vector<VarIndex> hidden; // relevant, unobserved, not kept
};

inline ReducedProblem reduce_problem(const Network& net, const IndexedEvidence& ev, const std::vector<VarIndex>& keep) {
    std::vector<VarIndex> seeds = keep;
    for (const auto& [v, s] : ev) {
        if (s >= net.variable(v).domain.size())
            throw ModelError("evidence state out of range for '" + net.variable(v).id + "'");
        seeds.push_back(v);
    }
    const auto rel = relevant_set(net, seeds);
    ReducedProblem p;
    for (VarIndex v = 0; v < net.size(); ++v) {
        if (!rel[v]) continue;
        p.factors.push_back(factor_reduce(factor_from_cpt(net, v), ev));
        if (!ev.count(v) && std::find(keep.begin(), keep.end(), v) == keep.end()) p.hidden.push_back(v);
    }
    return p;
}

inline Graph interaction_graph(std::size_t n, const std::vector<Factor>& factors) {
    Graph g(n);
    for (const auto& f : factors)
        for (VarIndex a : f.scope)
            for (VarIndex b : f.scope)
                if (a != b) g[a].insert(b);
    return g;
}

/// Sums out `order` (then any leftover hidden variables) and multiplies the rest.
inline Factor eliminate(std::vector<Factor> factors, const std::vector<VarIndex>& order,
                        const std::vector<VarIndex>& hidden) {
    std::vector<VarIndex> full;
    std::set<VarIndex> hidden_set(hidden.begin(), hidden.end());
    for (VarIndex v : order)
        if (hidden_set.erase(v)) full.push_back(v);
    full.insert(full.end(), hidden_set.begin(), hidden_set.end());

    for (VarIndex v : full) {
        Factor prod = Factor::scalar(1.0);
        bool touched = false;
        std::vector<Factor> rest;
        rest.reserve(factors.size());
        for (auto& f : factors) {
            if (f.contains(v)) {
                prod = touched ? factor_product(prod, f) : std::move(f);
                touched = true;
            } else {
                rest.push_back(std::move(f));
            }
        }
        factors = std::move(rest);
        if (touched) factors.push_back(factor_marginalize(prod, v));
    }
    Factor result = Factor::scalar(1.0);
    for (const auto& f : factors) result = factor_product(result, f);
    return result;
}

inline Posterior finish(const Network& net, VarIndex target, const IndexedEvidence& ev, const Factor& joint) {
    Posterior post;
    const auto& var = net.variable(target);
    post.target = var.id;
    post.labels = var.domain.labels();
    const double mass = joint.total();
    post.evidence_probability = mass;
    if (!(mass > kInconsistentMass)) {
        post.consistent = false;
        return post;
    }
    if (auto it = ev.find(target); it != ev.end()) {
        post.distribution.assign(var.domain.size(), 0.0);
        post.distribution[it->second] = 1.0;
        return post;
    }
    post.distribution.resize(var.domain.size());
    for (std::size_t k = 0; k < var.domain.size(); ++k) post.distribution[k] = joint.values[k] / mass;
    return post;
}

} // namespace detail

/// Exact P(target | e) by variable elimination along `order`. Variables in
/// `order` that are observed or irrelevant to the query are skipped; hidden
/// variables missing from `order` are eliminated last in index order.
inline Posterior posterior_with_order(const Network& net, const Evidence& e, const VariableId& target,
                                      const std::vector<VarIndex>& order) {
    const VarIndex t = net.at(target);
    const IndexedEvidence ev = bayes::index_evidence(net, e);
    const bool observed = ev.count(t) != 0;
    auto problem = detail::reduce_problem(net, ev, {t});
    Factor joint = detail::eliminate(std::move(problem.factors), order, problem.hidden);
    if (!observed && joint.scope != std::vector<VarIndex>{t})
        throw ModelError("elimination left an unexpected scope for '" + target + "'");
    return detail::finish(net, t, ev, joint);
}

/// Exact P(target | e): evidence reduction, barren-node pruning, then
/// elimination in min-fill order on the reduced interaction graph.
inline Posterior posterior(const Network& net, const Evidence& e, const VariableId& target) {
    const VarIndex t = net.at(target);
    const IndexedEvidence ev = bayes::index_evidence(net, e);
    auto problem = detail::reduce_problem(net, ev, {t});
    auto order = min_fill_order(detail::interaction_graph(net.size(), problem.factors), problem.hidden, net);
    Factor joint = detail::eliminate(std::move(problem.factors), order, problem.hidden);
    return detail::finish(net, t, ev, joint);
}

/// Unnormalized P(e).
inline double evidence_probability(const Network& net, const Evidence& e) {
    const IndexedEvidence ev = bayes::index_evidence(net, e);
    auto problem = detail::reduce_problem(net, ev, {});
    auto order = min_fill_order(detail::interaction_graph(net.size(), problem.factors), problem.hidden, net);
    return detail::eliminate(std::move(problem.factors), order, problem.hidden).total();
}

struct JointPosterior {
    Factor table; // normalized, scope in the order of the requested targets
    bool consistent = true;
    double evidence_probability = 0.0;
};

/// Joint distribution over up to three unobserved targets.
inline JointPosterior joint_posterior(const Network& net, const Evidence& e, const std::vector<VariableId>& targets) {
    if (targets.empty() || targets.size() > 3) throw ModelError("joint query needs 1 to 3 targets");
    const IndexedEvidence ev = bayes::index_evidence(net, e);
    std::vector<VarIndex> keep;
    for (const auto& t : targets) {
        VarIndex i = net.at(t);
        if (ev.count(i)) throw ModelError("joint query target '" + t + "' is observed");
        if (std::find(keep.begin(), keep.end(), i) != keep.end()) throw ModelError("duplicate target '" + t + "'");
        keep.push_back(i);
    }
    auto problem = detail::reduce_problem(net, ev, keep);
    auto order = min_fill_order(detail::interaction_graph(net.size(), problem.factors), problem.hidden, net);
    Factor joint = detail::eliminate(std::move(problem.factors), order, problem.hidden);
    // Bring the scope into target order.
    Factor ordered;
    ordered.scope = keep;
    for (VarIndex v : keep) ordered.cards.push_back(net.variable(v).domain.size());
    ordered.values.assign(joint.size(), 0.0);
    const auto js = joint.strides();
    std::vector<State> states(keep.size(), 0);
    for (std::size_t k = 0; k < ordered.values.size(); ++k) {
        std::size_t src = 0;
        for (std::size_t j = 0; j < keep.size(); ++j) src += states[j] * js[*joint.position(keep[j])];
        ordered.values[k] = joint.values[src];
        for (std::size_t j = keep.size(); j-- > 0;) {
            if (++states[j] < ordered.cards[j]) break;
            states[j] = 0;
        }
    }
    JointPosterior out;
    out.evidence_probability = ordered.total();
    if (!(out.evidence_probability > kInconsistentMass)) {
        out.consistent = false;
        return out;
    }
    for (auto& v : ordered.values) v /= out.evidence_probability;
    out.table = std::move(ordered);
    return out;
}

/// Default cap on enumerated states for the brute-force oracle.
inline constexpr std::uint64_t kDefaultEnumerationCap = 100'000'000;

/// Brute-force P(target | e): sums the chain-rule joint over every completion
/// of the evidence, depth-first in topological order. Prefixes whose partial
/// product is exactly zero contribute nothing and are not expanded. Throws if
/// more than `cap` partial assignments would be visited.
inline Posterior enumerate_posterior(const Network& net, const Evidence& e, const VariableId& target,
                                     std::uint64_t cap = kDefaultEnumerationCap) {
    const VarIndex t = net.at(target);
    const IndexedEvidence ev = bayes::index_evidence(net, e);
    const auto order = bayes::topological_indices(net);
    const auto cpts = bayes::compile_cpts(net);
    const std::size_t tk = net.variable(t).domain.size();

    std::vector<double> mass(tk, 0.0);
    bayes::Assignment a(net.size(), 0);
    std::uint64_t visited = 0;

    auto recurse = [&](auto&& self, std::size_t depth, double p) -> void {
        if (depth == order.size()) {
            mass[a[t]] += p;
            return;
        }
        if (++visited > cap)
            throw ModelError("enumeration cap of " + std::to_string(cap) + " states exceeded");
        const VarIndex v = order[depth];
        const auto& row = (*cpts[v].rows)[cpts[v].row_of(a)];
        if (auto it = ev.find(v); it != ev.end()) {
            const double q = p * row[it->second];
            if (q == 0.0) return;
            a[v] = it->second;
            self(self, depth + 1, q);
            return;
        }
        for (State s = 0; s < row.size(); ++s) {
            const double q = p * row[s];
            if (q == 0.0) continue;
            a[v] = s;
            self(self, depth + 1, q);
        }
    };
    recurse(recurse, 0, 1.0);

    Posterior post;
    post.target = target;
    post.labels = net.variable(t).domain.labels();
    double total = 0.0;
    for (double m : mass) total += m;
    post.evidence_probability = total;
    if (!(total > kInconsistentMass)) {
        post.consistent = false;
        return post;
    }
    post.distribution.resize(tk);
    for (std::size_t k = 0; k < tk; ++k) post.distribution[k] = mass[k] / total;
    return post;
}

/// Most probable label; ties go to the lowest domain index.
inline const std::string& argmax_posterior(const Posterior& p) {
    if (!p.consistent || p.distribution.empty())
        throw ModelError("argmax of '" + p.target + "' is undefined: inconsistent evidence");
    std::size_t best = 0;
    for (std::size_t k = 1; k < p.distribution.size(); ++k)
        if (p.distribution[k] > p.distribution[best]) best = k;
    return p.labels[best];
}

} // namespace planrec::infer
