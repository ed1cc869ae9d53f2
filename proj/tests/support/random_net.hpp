#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "planrec/bayes/network.hpp"
#include "planrec/infer/factor.hpp"

namespace planrec::testkit {

struct RandomNetSpec {
    std::size_t min_vars = 2;
    std::size_t max_vars = 12;
    std::size_t min_card = 2;
    std::size_t max_card = 4;
    std::size_t max_parents = 3;
    double edge_prob = 0.35;
    double zero_prob = 0.1; // chance a CPT entry is forced to 0
};

inline std::vector<double> random_row(std::mt19937_64& rng, std::size_t k, double zero_prob) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<double> row(k);
    for (auto& x : row) x = u(rng) < zero_prob ? 0.0 : u(rng) + 1e-3;
    if (std::all_of(row.begin(), row.end(), [](double x) { return x == 0.0; }))
        row[std::uniform_int_distribution<std::size_t>(0, k - 1)(rng)] = 1.0;
    const double s = std::accumulate(row.begin(), row.end(), 0.0);
    for (auto& x : row) x /= s;
    return row;
}

/// Random DAG over shuffled ids; edges only go from earlier to later in a
/// hidden random order so the declaration order says nothing about topology.
inline bayes::Network random_network(std::mt19937_64& rng, const RandomNetSpec& spec = {}) {
    std::uniform_int_distribution<std::size_t> nvars(spec.min_vars, spec.max_vars);
    std::uniform_int_distribution<std::size_t> card(spec.min_card, spec.max_card);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const std::size_t n = nvars(rng);
    std::vector<std::size_t> rank(n);
    std::iota(rank.begin(), rank.end(), 0);
    std::shuffle(rank.begin(), rank.end(), rng);

    bayes::Network net;
    std::vector<std::string> ids(n);
    for (std::size_t i = 0; i < n; ++i) {
        ids[i] = "v" + std::to_string(rank[i]);
        std::vector<std::string> labels;
        const std::size_t k = card(rng);
        for (std::size_t s = 0; s < k; ++s) labels.push_back("s" + std::to_string(s));
        net.add_variable(ids[i], bayes::Domain(labels), bayes::Role::Context, bayes::TimeIndex::t0, true);
    }
    for (std::size_t c = 0; c < n; ++c) {
        std::vector<std::string> parents;
        std::size_t rows = 1;
        for (std::size_t p = 0; p < n && parents.size() < spec.max_parents; ++p) {
            if (rank[p] < rank[c] && u(rng) < spec.edge_prob) {
                parents.push_back(ids[p]);
                rows *= net.variable(p).domain.size();
            }
        }
        std::shuffle(parents.begin(), parents.end(), rng);
        std::vector<std::vector<double>> table;
        for (std::size_t r = 0; r < rows; ++r) table.push_back(random_row(rng, net.variable(c).domain.size(), spec.zero_prob));
        net.set_cpt(ids[c], parents, table);
    }
    return net;
}

/// Random evidence on up to `max_observed` variables (possibly inconsistent).
inline bayes::Evidence random_evidence(std::mt19937_64& rng, const bayes::Network& net, std::size_t max_observed,
                                       const std::string& exclude = {}) {
    std::vector<std::size_t> order(net.size());
    std::iota(order.begin(), order.end(), 0);
    std::shuffle(order.begin(), order.end(), rng);
    const std::size_t k = std::uniform_int_distribution<std::size_t>(0, std::min(max_observed, net.size()))(rng);
    bayes::Evidence e;
    for (std::size_t j = 0; j < order.size() && e.size() < k; ++j) {
        const auto& v = net.variable(order[j]);
        if (v.id == exclude || !v.observable) continue;
        e[v.id] = v.domain.label(std::uniform_int_distribution<std::size_t>(0, v.domain.size() - 1)(rng));
    }
    return e;
}

inline infer::Factor random_factor(std::mt19937_64& rng, std::vector<bayes::VarIndex> scope,
                                   std::vector<std::size_t> cards) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    infer::Factor f;
    f.scope = std::move(scope);
    f.cards = std::move(cards);
    std::size_t total = 1;
    for (auto c : f.cards) total *= c;
    f.values.resize(total);
    for (auto& v : f.values) v = u(rng);
    return f;
}

/// Naive value lookup: decodes a flat row-major index by repeated division,
/// independently of Factor::strides.
inline double naive_at(const infer::Factor& f, const std::vector<std::size_t>& cards_by_var,
                       const std::vector<std::size_t>& full_assignment) {
    std::size_t flat = 0;
    for (std::size_t j = 0; j < f.scope.size(); ++j) flat = flat * cards_by_var[f.scope[j]] + full_assignment[f.scope[j]];
    return f.values[flat];
}

} // namespace planrec::testkit
