#pragma once

#include <array>
#include <cmath>
#include <set>
#include <string>

#include <json.hpp>

#include "planrec/bayes/network.hpp"
#include "planrec/bayes/network_json.hpp"

namespace planrec::traffic {

using Vec4 = std::array<double, 4>;
using Vec3 = std::array<double, 3>;

/// Every tunable number of the traffic model. Calibration happens here and
/// nowhere else; the CPT generators only read these fields. The member
/// initializers are the shipped calibration and match data/defaults.json.
struct TrafficParams {
    // Root priors.
    double clearance_prior = 0.7;
    Vec4 target_speed_prior{0.05, 0.20, 0.55, 0.20};
    // Most drivers are early on the stretch and bound for the far exit.
    Vec4 exit_prior{0.001, 0.019, 0.03, 0.95};
    Vec4 y_position_prior{0.97, 0.01, 0.01, 0.01};
    Vec4 lane_prior{0.25, 0.25, 0.25, 0.25};

    // Plan selection.
    double plan_noise = 0.002;
    double exit_mass = 0.85;
    double slow_blocked_pass_mass = 0.60;
    double slow_blocked_right_mass = 0.17;
    double slow_clear_stay_mass = 0.85;
    double at_target_stay_mass = 0.80;
    double at_target_right_mass = 0.10;
    double too_fast_stay_mass = 0.75;
    double too_fast_right_mass = 0.12;
    /// Extra right1 mass when a car is close behind (yielding to it).
    double yield_right_mass = 0.22;

    // Passing direction.
    double pass_left_bias = 0.95;
    double pass_blocked_noise = 0.02;
    double one_side_open_mass = 0.93;
    double one_side_blocked_mass = 0.05;
    double both_blocked_mass = 0.96;
    double pass_completion_delay = 0.08;

    // Turn signals.
    double signal_compliance = 0.60;
    double signal_consistency = 0.90;
    double wrong_signal = 0.02;

    // Dynamics and acceleration plan.
    double accel_effect_noise = 0.05;
    /// y speed t0 given lane, rows (off, right, middle, left).
    std::array<Vec4, 4> speed_given_lane{{
        {0.60, 0.30, 0.08, 0.02},
        {0.25, 0.50, 0.20, 0.05},
        {0.05, 0.30, 0.50, 0.15},
        {0.02, 0.08, 0.40, 0.50},
    }};
    /// acc maneuver (accel, maintain, decel) given at target? (too-slow, at-target, too-fast).
    std::array<Vec3, 3> acc_given_at_target{{
        {0.90, 0.09, 0.01},
        {0.05, 0.90, 0.05},
        {0.01, 0.09, 0.90},
    }};
};

namespace detail {

template <std::size_t N>
void check_distribution(const std::array<double, N>& v, const std::string& name) {
    double s = 0.0;
    for (double x : v) {
        if (!std::isfinite(x) || x < 0.0) throw ModelError("params: " + name + " has a negative or non-finite entry");
        s += x;
    }
    if (std::abs(s - 1.0) > bayes::kNormTolerance) throw ModelError("params: " + name + " does not sum to 1");
}

inline void check_range(double v, double lo, double hi, bool lo_open, bool hi_open, const std::string& name) {
    const bool ok = std::isfinite(v) && (lo_open ? v > lo : v >= lo) && (hi_open ? v < hi : v <= hi);
    if (!ok)
        throw ModelError("params: " + name + " = " + std::to_string(v) + " outside " + (lo_open ? "(" : "[") +
                         std::to_string(lo) + ", " + std::to_string(hi) + (hi_open ? ")" : "]"));
}

inline void check_unit(double v, const std::string& name) { check_range(v, 0.0, 1.0, false, false, name); }

} // namespace detail

inline void validate_params(const TrafficParams& p) {
    using detail::check_range;
    using detail::check_unit;
    check_range(p.clearance_prior, 0.0, 1.0, true, true, "clearance_prior");
    detail::check_distribution(p.target_speed_prior, "target_speed_prior");
    detail::check_distribution(p.exit_prior, "exit_prior");
    detail::check_distribution(p.y_position_prior, "y_position_prior");
    detail::check_distribution(p.lane_prior, "lane_prior");
    for (std::size_t i = 0; i < 4; ++i)
        detail::check_distribution(p.speed_given_lane[i], "speed_given_lane[" + std::to_string(i) + "]");
    for (std::size_t i = 0; i < 3; ++i)
        detail::check_distribution(p.acc_given_at_target[i], "acc_given_at_target[" + std::to_string(i) + "]");

    check_range(p.plan_noise, 0.0, 0.1, true, false, "plan_noise");
    check_range(p.pass_completion_delay, 0.0, 0.5, false, false, "pass_completion_delay");
    check_range(p.signal_compliance, 0.0, 1.0, true, true, "signal_compliance");
    check_range(p.signal_consistency, 0.0, 1.0, true, true, "signal_consistency");
    check_unit(p.accel_effect_noise, "accel_effect_noise");

    for (auto [v, name] : {std::pair{p.exit_mass, "exit_mass"},
                           {p.slow_blocked_pass_mass, "slow_blocked_pass_mass"},
                           {p.slow_blocked_right_mass, "slow_blocked_right_mass"},
                           {p.slow_clear_stay_mass, "slow_clear_stay_mass"},
                           {p.at_target_stay_mass, "at_target_stay_mass"},
                           {p.at_target_right_mass, "at_target_right_mass"},
                           {p.too_fast_stay_mass, "too_fast_stay_mass"},
                           {p.too_fast_right_mass, "too_fast_right_mass"},
                           {p.yield_right_mass, "yield_right_mass"},
                           {p.pass_blocked_noise, "pass_blocked_noise"},
                           {p.one_side_open_mass, "one_side_open_mass"},
                           {p.one_side_blocked_mass, "one_side_blocked_mass"},
                           {p.both_blocked_mass, "both_blocked_mass"},
                           {p.wrong_signal, "wrong_signal"}})
        check_unit(v, name);

    // Room for the ε floor on the other feasible maneuvers (at most 4 of them).
    const double floor = 4.0 * p.plan_noise;
    if (p.exit_mass + floor > 1.0) throw ModelError("params: exit_mass leaves no room for plan_noise");
    if (p.slow_blocked_pass_mass + p.slow_blocked_right_mass + p.yield_right_mass + floor > 1.0)
        throw ModelError("params: slow_blocked masses leave no room for plan_noise");
    if (p.slow_clear_stay_mass <= 0.0 || p.at_target_stay_mass <= 0.0 || p.too_fast_stay_mass <= 0.0)
        throw ModelError("params: explicit stay masses must be positive");
    if (p.at_target_stay_mass + p.at_target_right_mass > 1.0)
        throw ModelError("params: at_target masses sum above 1");
    if (p.too_fast_stay_mass + p.too_fast_right_mass > 1.0) throw ModelError("params: too_fast masses sum above 1");

    check_range(p.pass_left_bias, 0.0, 1.0 - p.pass_blocked_noise, false, false, "pass_left_bias");
    if (p.one_side_open_mass + p.one_side_blocked_mass > 1.0)
        throw ModelError("params: one-side passing masses sum above 1");
    if (p.signal_compliance + p.wrong_signal > 1.0 || p.signal_consistency + p.wrong_signal > 1.0 ||
        2.0 * p.wrong_signal > 1.0)
        throw ModelError("params: signal probabilities sum above 1");
}

inline nlohmann::ordered_json params_to_json(const TrafficParams& p) {
    nlohmann::ordered_json j;
#define PLANREC_PARAM(field) j[#field] = p.field;
    PLANREC_PARAM(clearance_prior)
    PLANREC_PARAM(target_speed_prior)
    PLANREC_PARAM(exit_prior)
    PLANREC_PARAM(y_position_prior)
    PLANREC_PARAM(lane_prior)
    PLANREC_PARAM(plan_noise)
    PLANREC_PARAM(exit_mass)
    PLANREC_PARAM(slow_blocked_pass_mass)
    PLANREC_PARAM(slow_blocked_right_mass)
    PLANREC_PARAM(slow_clear_stay_mass)
    PLANREC_PARAM(at_target_stay_mass)
    PLANREC_PARAM(at_target_right_mass)
    PLANREC_PARAM(too_fast_stay_mass)
    PLANREC_PARAM(too_fast_right_mass)
    PLANREC_PARAM(yield_right_mass)
    PLANREC_PARAM(pass_left_bias)
    PLANREC_PARAM(pass_blocked_noise)
    PLANREC_PARAM(one_side_open_mass)
    PLANREC_PARAM(one_side_blocked_mass)
    PLANREC_PARAM(both_blocked_mass)
    PLANREC_PARAM(pass_completion_delay)
    PLANREC_PARAM(signal_compliance)
    PLANREC_PARAM(signal_consistency)
    PLANREC_PARAM(wrong_signal)
    PLANREC_PARAM(accel_effect_noise)
    PLANREC_PARAM(speed_given_lane)
    PLANREC_PARAM(acc_given_at_target)
#undef PLANREC_PARAM
    return j;
}

/// Reads a parameters document. Missing fields keep their built-in value;
/// unknown fields are rejected so a typo cannot silently fall back.
inline TrafficParams params_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw ModelError("params: document must be a JSON object");
    TrafficParams p;
    const auto known = params_to_json(p);
    for (const auto& [key, value] : j.items())
        if (!known.contains(key)) throw ModelError("params: unknown field '" + key + "'");
    try {
#define PLANREC_PARAM(field) \
    if (j.contains(#field)) j.at(#field).get_to(p.field);
        PLANREC_PARAM(clearance_prior)
        PLANREC_PARAM(target_speed_prior)
        PLANREC_PARAM(exit_prior)
        PLANREC_PARAM(y_position_prior)
        PLANREC_PARAM(lane_prior)
        PLANREC_PARAM(plan_noise)
        PLANREC_PARAM(exit_mass)
        PLANREC_PARAM(slow_blocked_pass_mass)
        PLANREC_PARAM(slow_blocked_right_mass)
        PLANREC_PARAM(slow_clear_stay_mass)
        PLANREC_PARAM(at_target_stay_mass)
        PLANREC_PARAM(at_target_right_mass)
        PLANREC_PARAM(too_fast_stay_mass)
        PLANREC_PARAM(too_fast_right_mass)
        PLANREC_PARAM(yield_right_mass)
        PLANREC_PARAM(pass_left_bias)
        PLANREC_PARAM(pass_blocked_noise)
        PLANREC_PARAM(one_side_open_mass)
        PLANREC_PARAM(one_side_blocked_mass)
        PLANREC_PARAM(both_blocked_mass)
        PLANREC_PARAM(pass_completion_delay)
        PLANREC_PARAM(signal_compliance)
        PLANREC_PARAM(signal_consistency)
        PLANREC_PARAM(wrong_signal)
        PLANREC_PARAM(accel_effect_noise)
        PLANREC_PARAM(speed_given_lane)
        PLANREC_PARAM(acc_given_at_target)
#undef PLANREC_PARAM
    } catch (const nlohmann::json::exception& ex) {
        throw ModelError(std::string("params: ") + ex.what());
    }
    validate_params(p);
    return p;
}

inline TrafficParams load_params_file(const std::string& path) {
    const std::string text = bayes::read_text_file(path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& ex) {
        throw ModelError(path + ": parse error at byte " + std::to_string(ex.byte) + ": " + ex.what());
    }
    try {
        return params_from_json(j);
    } catch (const ModelError& ex) {
        throw ModelError(path + ": " + ex.what());
    }
}

} // namespace planrec::traffic
