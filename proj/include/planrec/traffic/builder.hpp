#pragma once

#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "planrec/bayes/network.hpp"
#include "planrec/traffic/params.hpp"
#include "planrec/traffic/rules.hpp"

namespace planrec::traffic {

namespace names {
inline const std::string x0 = "x position t0";
inline const std::string y0 = "y position t0";
inline const std::string speed0 = "y speed t0";
inline const std::string left_clr = "left clr t0";
inline const std::string right_clr = "right clr t0";
inline const std::string front_clr = "front clr t0";
inline const std::string back_clr = "back clr t0";
inline const std::string front_left_clr = "frontL clr t0";
inline const std::string front_right_clr = "frontR clr t0";
inline const std::string back_left_clr = "backL clr t0";
inline const std::string back_right_clr = "backR clr t0";
inline const std::string exit_position = "exit position";
inline const std::string target_speed = "target y speed";
inline const std::string at_exit = "at exit?";
inline const std::string at_target = "at target?";
inline const std::string gen = "gen maneuver";
inline const std::string acc = "acc maneuver";
inline const std::string spec = "spec pass";
inline const std::string signal_m0 = "signal m0";
inline const std::string signal_m1 = "signal m1";
inline const std::string lat_m0 = "lat act m0";
inline const std::string lat_m1 = "lat act m1";
inline const std::string fwd_m0 = "fwd act m0";
inline const std::string fwd_m1 = "fwd act m1";
inline const std::string x1 = "x position t1";
inline const std::string x2 = "x position t2";
inline const std::string y1 = "y position t1";
inline const std::string y2 = "y position t2";
inline const std::string speed1 = "y speed t1";
inline const std::string speed2 = "y speed t2";

inline const std::vector<std::string>& clearances() {
    static const std::vector<std::string> v{left_clr,       right_clr,       front_clr,     back_clr,
                                            front_left_clr, front_right_clr, back_left_clr, back_right_clr};
    return v;
}
} // namespace names

/// Sizes of the binned domains and which clearances exist as variables.
/// Clearances left out are pinned to "clear".
struct TrafficShape {
    std::size_t position_bins = 4;
    std::size_t speed_bins = 4;
    std::set<std::string> clearance_vars;

    static TrafficShape full() {
        return {4, 4, {names::clearances().begin(), names::clearances().end()}};
    }
    /// Oracle-sized build: two position/speed/exit bins, four clearances.
    static TrafficShape mini() {
        return {2, 2, {names::front_clr, names::front_left_clr, names::left_clr, names::right_clr}};
    }
};

namespace detail {

inline std::vector<std::string> bins(const std::string& prefix, std::size_t n) {
    std::vector<std::string> out;
    for (std::size_t i = 1; i <= n; ++i) out.push_back(prefix + std::to_string(i));
    return out;
}

/// Folds a 4-bin distribution into `n` bins by summing equal-width groups.
inline std::vector<double> fold(const Vec4& v, std::size_t n) {
    if (n == 4) return {v.begin(), v.end()};
    if (n != 2 && n != 1) throw ModelError("unsupported bin count " + std::to_string(n));
    std::vector<double> out(n, 0.0);
    for (std::size_t i = 0; i < 4; ++i) out[i * n / 4] += v[i];
    return out;
}

/// Sets a CPT by evaluating `row` on every parent assignment, last parent fastest.
inline void tabulate(bayes::Network& net, const std::string& child, std::vector<std::string> parents,
                     const std::function<std::vector<double>(const std::vector<std::size_t>&)>& row) {
    std::vector<std::size_t> cards;
    std::size_t total = 1;
    for (const auto& p : parents) {
        cards.push_back(net.variable(p).domain.size());
        total *= cards.back();
    }
    std::vector<std::vector<double>> rows;
    rows.reserve(total);
    std::vector<std::size_t> s(parents.size(), 0);
    for (std::size_t r = 0; r < total; ++r) {
        rows.push_back(row(s));
        for (std::size_t j = s.size(); j-- > 0;) {
            if (++s[j] < cards[j]) break;
            s[j] = 0;
        }
    }
    net.set_cpt(child, std::move(parents), std::move(rows));
}

template <std::size_t N>
std::vector<double> vec(const std::array<double, N>& a) {
    return {a.begin(), a.end()};
}

} // namespace detail

/// Builds the traffic-monitoring network for the given shape.
inline bayes::Network build_traffic(const TrafficParams& p, const TrafficShape& shape) {
    validate_params(p);
    using bayes::Role;
    using bayes::TimeIndex;
    using detail::bins;
    bayes::Network net;
    const std::size_t ny = shape.position_bins, ns = shape.speed_bins;
    const auto positions = bins("p", ny), speeds = bins("s", ns), exits = bins("e", ny);
    auto has = [&](const std::string& c) { return shape.clearance_vars.count(c) != 0; };

    // Context at t0.
    net.add_variable(names::x0, bayes::Domain(lane_labels()), Role::Context, TimeIndex::t0, true);
    net.add_variable(names::y0, bayes::Domain(positions), Role::Context, TimeIndex::t0, true);
    net.add_variable(names::speed0, bayes::Domain(speeds), Role::Context, TimeIndex::t0, true);
    for (const auto& c : names::clearances())
        if (has(c)) net.add_variable(c, bayes::Domain(bool_labels()), Role::Context, TimeIndex::t0, true);

    // Mental state.
    net.add_variable(names::exit_position, bayes::Domain(exits), Role::MentalState, TimeIndex::atemporal, false);
    net.add_variable(names::target_speed, bayes::Domain(speeds), Role::MentalState, TimeIndex::atemporal, false);
    net.add_variable(names::at_exit, bayes::Domain(bool_labels()), Role::MentalState, TimeIndex::atemporal, false);
    net.add_variable(names::at_target, bayes::Domain(at_target_labels()), Role::MentalState, TimeIndex::atemporal,
                     false);

    // Plan.
    net.add_variable(names::gen, bayes::Domain(maneuver_labels()), Role::Plan, TimeIndex::atemporal, false);
    net.add_variable(names::acc, bayes::Domain(fwd_act_labels()), Role::Plan, TimeIndex::atemporal, false);
    net.add_variable(names::spec, bayes::Domain(spec_pass_labels()), Role::Plan, TimeIndex::atemporal, false);

    // Communication and activity.
    net.add_variable(names::signal_m0, bayes::Domain(signal_labels()), Role::Communication, TimeIndex::m0, true);
    net.add_variable(names::signal_m1, bayes::Domain(signal_labels()), Role::Communication, TimeIndex::m1, true);
    net.add_variable(names::lat_m0, bayes::Domain(lat_act_labels()), Role::Activity, TimeIndex::m0, false);
    net.add_variable(names::lat_m1, bayes::Domain(lat_act_labels()), Role::Activity, TimeIndex::m1, false);
    net.add_variable(names::fwd_m0, bayes::Domain(fwd_act_labels()), Role::Activity, TimeIndex::m0, false);
    net.add_variable(names::fwd_m1, bayes::Domain(fwd_act_labels()), Role::Activity, TimeIndex::m1, false);

    // Effects.
    net.add_variable(names::x1, bayes::Domain(lane_labels()), Role::Effect, TimeIndex::t1, true);
    net.add_variable(names::y1, bayes::Domain(positions), Role::Effect, TimeIndex::t1, true);
    net.add_variable(names::speed1, bayes::Domain(speeds), Role::Effect, TimeIndex::t1, true);
    net.add_variable(names::x2, bayes::Domain(lane_labels()), Role::Effect, TimeIndex::t2, true);
    net.add_variable(names::y2, bayes::Domain(positions), Role::Effect, TimeIndex::t2, true);
    net.add_variable(names::speed2, bayes::Domain(speeds), Role::Effect, TimeIndex::t2, true);

    // Root priors.
    net.set_cpt(names::x0, {}, {detail::vec(p.lane_prior)});
    net.set_cpt(names::y0, {}, {detail::fold(p.y_position_prior, ny)});
    for (const auto& c : names::clearances())
        if (has(c)) net.set_cpt(c, {}, {{1.0 - p.clearance_prior, p.clearance_prior}});
    net.set_cpt(names::exit_position, {}, {detail::fold(p.exit_prior, ny)});
    net.set_cpt(names::target_speed, {}, {detail::fold(p.target_speed_prior, ns)});

    detail::tabulate(net, names::speed0, {names::x0},
                     [&](const auto& s) { return detail::fold(p.speed_given_lane[s[0]], ns); });
    detail::tabulate(net, names::at_exit, {names::y0, names::exit_position}, [&](const auto& s) {
        return at_exit_rule(s[0], s[1]) ? std::vector<double>{0.0, 1.0} : std::vector<double>{1.0, 0.0};
    });
    detail::tabulate(net, names::at_target, {names::speed0, names::target_speed}, [&](const auto& s) {
        std::vector<double> r(3, 0.0);
        r[idx(at_target_rule(s[0], s[1]))] = 1.0;
        return r;
    });
    detail::tabulate(net, names::acc, {names::at_target},
                     [&](const auto& s) { return detail::vec(p.acc_given_at_target[s[0]]); });

    // gen maneuver: at target?, at exit?, lane, then the six selection clearances present in this shape.
    const std::vector<std::string> selection{names::front_clr, names::back_clr,      names::left_clr,
                                             names::right_clr, names::back_left_clr, names::back_right_clr};
    std::vector<std::string> gen_parents{names::at_target, names::at_exit, names::x0};
    for (const auto& c : selection)
        if (has(c)) gen_parents.push_back(c);
    detail::tabulate(net, names::gen, gen_parents, [&](const auto& s) {
        std::map<std::string, bool> clear;
        for (std::size_t j = 3; j < gen_parents.size(); ++j) clear[gen_parents[j]] = s[j] == 1;
        auto get = [&](const std::string& c) { return clear.count(c) ? clear[c] : true; };
        Clearances clr{get(names::left_clr),  get(names::right_clr),     get(names::front_clr),
                       get(names::back_clr),  get(names::back_left_clr), get(names::back_right_clr)};
        return detail::vec(
            gen_maneuver_rule(static_cast<AtTarget>(s[0]), s[1] == 1, static_cast<Lane>(s[2]), clr, p));
    });

    const std::vector<std::string> side{names::left_clr, names::front_left_clr, names::right_clr,
                                        names::front_right_clr};
    std::vector<std::string> spec_parents{names::gen};
    for (const auto& c : side)
        if (has(c)) spec_parents.push_back(c);
    detail::tabulate(net, names::spec, spec_parents, [&](const auto& s) {
        std::map<std::string, bool> clear;
        for (std::size_t j = 1; j < spec_parents.size(); ++j) clear[spec_parents[j]] = s[j] == 1;
        auto get = [&](const std::string& c) { return clear.count(c) ? clear[c] : true; };
        return detail::vec(spec_pass_rule(static_cast<Maneuver>(s[0]), get(names::left_clr),
                                          get(names::front_left_clr), get(names::right_clr),
                                          get(names::front_right_clr), p));
    });

    // Rows for (gen, spec) pairs violating subsumption have probability zero;
    // they are filled as a blocked/plain plan so the table stays well formed.
    auto plan_of = [](std::size_t g, std::size_t sp) {
        auto gen = static_cast<Maneuver>(g);
        auto spec = static_cast<SpecPass>(sp);
        if (!consistent_plan(gen, spec)) spec = gen == Maneuver::pass ? SpecPass::blocked : SpecPass::none;
        return std::pair{gen, spec};
    };
    detail::tabulate(net, names::signal_m0, {names::gen, names::spec}, [&](const auto& s) {
        auto [g, sp] = plan_of(s[0], s[1]);
        return detail::vec(signal_m0_rule(g, sp, p));
    });
    detail::tabulate(net, names::signal_m1, {names::gen, names::spec, names::signal_m0}, [&](const auto& s) {
        auto [g, sp] = plan_of(s[0], s[1]);
        return detail::vec(signal_m1_rule(g, sp, static_cast<Signal>(s[2]), p));
    });
    detail::tabulate(net, names::lat_m0, {names::gen, names::spec}, [&](const auto& s) {
        auto [g, sp] = plan_of(s[0], s[1]);
        return detail::vec(plan_action_profile(g, sp, p.pass_completion_delay).m0);
    });
    detail::tabulate(net, names::lat_m1, {names::gen, names::spec}, [&](const auto& s) {
        auto [g, sp] = plan_of(s[0], s[1]);
        return detail::vec(plan_action_profile(g, sp, p.pass_completion_delay).m1);
    });
    for (const auto* fwd : {&names::fwd_m0, &names::fwd_m1})
        detail::tabulate(net, *fwd, {names::acc}, [&](const auto& s) {
            std::vector<double> r(3, 0.0);
            r[s[0]] = 1.0;
            return r;
        });

    auto lane_row = [](const auto& s) {
        std::vector<double> r(4, 0.0);
        r[idx(lane_transition(static_cast<Lane>(s[0]), static_cast<LatAct>(s[1])))] = 1.0;
        return r;
    };
    detail::tabulate(net, names::x1, {names::x0, names::lat_m0}, lane_row);
    detail::tabulate(net, names::x2, {names::x1, names::lat_m1}, lane_row);

    auto speed_row = [&](const auto& s) {
        return speed_transition(s[0], static_cast<FwdAct>(s[1]), p.accel_effect_noise, ns);
    };
    detail::tabulate(net, names::speed1, {names::speed0, names::fwd_m0}, speed_row);
    detail::tabulate(net, names::speed2, {names::speed1, names::fwd_m1}, speed_row);

    auto position_row = [&](const auto& s) { return position_transition(s[0], s[1], ny, ns); };
    detail::tabulate(net, names::y1, {names::y0, names::speed0}, position_row);
    detail::tabulate(net, names::y2, {names::y1, names::speed1}, position_row);
    return net;
}

inline bayes::Network build_traffic_network(const TrafficParams& p = {}) {
    return build_traffic(p, TrafficShape::full());
}

inline bayes::Network traffic_mini(const TrafficParams& p = {}) { return build_traffic(p, TrafficShape::mini()); }

} // namespace planrec::traffic
