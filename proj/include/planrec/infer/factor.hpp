#pragma once

#include <algorithm>
#include <numeric>
#include <optional>
#include <vector>

#include "planrec/bayes/network.hpp"

namespace planrec::infer {

using bayes::IndexedEvidence;
using bayes::Network;
using bayes::State;
using bayes::VarIndex;

/// Nonnegative table over `scope`, row-major with the last scope variable
/// varying fastest. An empty scope holds a single scalar.
struct Factor {
    std::vector<VarIndex> scope;
    std::vector<std::size_t> cards;
    std::vector<double> values{1.0};

    static Factor scalar(double v) { return Factor{{}, {}, {v}}; }

    std::size_t size() const { return values.size(); }

    double total() const { return std::accumulate(values.begin(), values.end(), 0.0); }

    std::optional<std::size_t> position(VarIndex v) const {
        auto it = std::find(scope.begin(), scope.end(), v);
        if (it == scope.end()) return std::nullopt;
        return static_cast<std::size_t>(it - scope.begin());
    }

    bool contains(VarIndex v) const { return position(v).has_value(); }

    /// Strides per scope position.
    std::vector<std::size_t> strides() const {
        std::vector<std::size_t> s(scope.size(), 1);
        for (std::size_t j = scope.size(); j-- > 1;) s[j - 1] = s[j] * cards[j];
        return s;
    }

    /// Entry at a full assignment of the scope (states listed in scope order).
    double at(const std::vector<State>& states) const {
        std::size_t idx = 0;
        for (std::size_t j = 0; j < scope.size(); ++j) idx = idx * cards[j] + states[j];
        return values.at(idx);
    }
};

/// Factor over parents + child holding the CPT of `child`.
inline Factor factor_from_cpt(const Network& net, VarIndex child) {
    Factor f;
    f.scope = net.parents_of(child);
    f.scope.push_back(child);
    for (VarIndex v : f.scope) f.cards.push_back(net.variable(v).domain.size());
    const auto& rows = net.cpt(child)->rows;
    f.values.clear();
    f.values.reserve(rows.size() * f.cards.back());
    for (const auto& row : rows) f.values.insert(f.values.end(), row.begin(), row.end());
    return f;
}

/// Pointwise product over the union scope (f1's variables first, then f2's new ones).
inline Factor factor_product(const Factor& f1, const Factor& f2) {
    Factor out;
    out.scope = f1.scope;
    out.cards = f1.cards;
    for (std::size_t j = 0; j < f2.scope.size(); ++j) {
        if (auto p = f1.position(f2.scope[j])) {
            if (f1.cards[*p] != f2.cards[j])
                throw ModelError("factor product: variable " + std::to_string(f2.scope[j]) +
                                 " has mismatched domain sizes");
            continue;
        }
        out.scope.push_back(f2.scope[j]);
        out.cards.push_back(f2.cards[j]);
    }
    const std::size_t n = out.scope.size();
    const auto s1 = f1.strides();
    const auto s2 = f2.strides();
    std::vector<std::size_t> step1(n, 0), step2(n, 0);
    for (std::size_t j = 0; j < n; ++j) {
        if (auto p = f1.position(out.scope[j])) step1[j] = s1[*p];
        if (auto p = f2.position(out.scope[j])) step2[j] = s2[*p];
    }
    std::size_t total = 1;
    for (auto c : out.cards) total *= c;
    out.values.assign(total, 0.0);

    std::vector<std::size_t> counter(n, 0);
    std::size_t i1 = 0, i2 = 0;
    for (std::size_t k = 0; k < total; ++k) {
        out.values[k] = f1.values[i1] * f2.values[i2];
        for (std::size_t j = n; j-- > 0;) {
            if (++counter[j] < out.cards[j]) {
                i1 += step1[j];
                i2 += step2[j];
                break;
            }
            counter[j] = 0;
            i1 -= step1[j] * (out.cards[j] - 1);
            i2 -= step2[j] * (out.cards[j] - 1);
        }
    }
    return out;
}

/// Sums `v` out of `f`.
inline Factor factor_marginalize(const Factor& f, VarIndex v) {
    auto pos = f.position(v);
    if (!pos) throw ModelError("factor marginalize: variable " + std::to_string(v) + " not in scope");
    Factor out;
    for (std::size_t j = 0; j < f.scope.size(); ++j) {
        if (j == *pos) continue;
        out.scope.push_back(f.scope[j]);
        out.cards.push_back(f.cards[j]);
    }
    const std::size_t card = f.cards[*pos];
    const std::size_t inner = f.strides()[*pos];
    const std::size_t outer = f.size() / (card * inner);
    out.values.assign(outer * inner, 0.0);
    for (std::size_t o = 0; o < outer; ++o)
        for (std::size_t c = 0; c < card; ++c) {
            const double* src = &f.values[(o * card + c) * inner];
            double* dst = &out.values[o * inner];
            for (std::size_t i = 0; i < inner; ++i) dst[i] += src[i];
        }
    return out;
}

/// Slice of `f` consistent with the evidence; evidence on variables outside
/// the scope is ignored.
inline Factor factor_reduce(const Factor& f, const IndexedEvidence& e) {
    std::vector<std::optional<State>> fixed(f.scope.size());
    bool any = false;
    for (std::size_t j = 0; j < f.scope.size(); ++j) {
        auto it = e.find(f.scope[j]);
        if (it == e.end()) continue;
        if (it->second >= f.cards[j])
            throw ModelError("factor reduce: state " + std::to_string(it->second) + " outside domain of variable " +
                             std::to_string(f.scope[j]));
        fixed[j] = it->second;
        any = true;
    }
    if (!any) return f;
    Factor out;
    std::size_t base = 0;
    const auto strides = f.strides();
    std::vector<std::size_t> free_strides;
    for (std::size_t j = 0; j < f.scope.size(); ++j) {
        if (fixed[j]) {
            base += *fixed[j] * strides[j];
        } else {
            out.scope.push_back(f.scope[j]);
            out.cards.push_back(f.cards[j]);
            free_strides.push_back(strides[j]);
        }
    }
    std::size_t total = 1;
    for (auto c : out.cards) total *= c;
    out.values.assign(total, 0.0);
    const std::size_t n = out.scope.size();
    std::vector<std::size_t> counter(n, 0);
    std::size_t src = base;
    for (std::size_t k = 0; k < total; ++k) {
        out.values[k] = f.values[src];
        for (std::size_t j = n; j-- > 0;) {
            if (++counter[j] < out.cards[j]) {
                src += free_strides[j];
                break;
            }
            counter[j] = 0;
            src -= free_strides[j] * (out.cards[j] - 1);
        }
    }
    return out;
}

} // namespace planrec::infer
