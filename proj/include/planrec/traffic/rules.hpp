#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "planrec/error.hpp"
#include "planrec/traffic/params.hpp"

namespace planrec::traffic {

// Enumerations follow the domain label order used in the network.

enum class Lane : std::size_t { off, right, middle, left };
enum class LatAct : std::size_t { left, same, right };
enum class Maneuver : std::size_t { stay, left1, right1, left2, right2, enter, exit, pass };
enum class SpecPass : std::size_t { pass_left, pass_right, blocked, none };
enum class Signal : std::size_t { Left, Right, Off };
enum class AtTarget : std::size_t { too_slow, at_target, too_fast };
enum class FwdAct : std::size_t { accel, maintain, decel };

inline constexpr std::size_t kManeuvers = 8;

inline constexpr std::size_t idx(auto e) { return static_cast<std::size_t>(e); }

inline const std::vector<std::string>& lane_labels() {
    static const std::vector<std::string> v{"off", "right", "middle", "left"};
    return v;
}
inline const std::vector<std::string>& lat_act_labels() {
    static const std::vector<std::string> v{"left", "same", "right"};
    return v;
}
inline const std::vector<std::string>& maneuver_labels() {
    static const std::vector<std::string> v{"stay", "left1", "right1", "left2", "right2", "enter", "exit", "pass"};
    return v;
}
inline const std::vector<std::string>& spec_pass_labels() {
    static const std::vector<std::string> v{"pass-left", "pass-right", "blocked", "none"};
    return v;
}
inline const std::vector<std::string>& signal_labels() {
    static const std::vector<std::string> v{"Left", "Right", "Off"};
    return v;
}
inline const std::vector<std::string>& at_target_labels() {
    static const std::vector<std::string> v{"too-slow", "at-target", "too-fast"};
    return v;
}
inline const std::vector<std::string>& fwd_act_labels() {
    static const std::vector<std::string> v{"accel", "maintain", "decel"};
    return v;
}
inline const std::vector<std::string>& bool_labels() {
    static const std::vector<std::string> v{"false", "true"};
    return v;
}

/// Deterministic lane update. Lanes are ordered off < right < middle < left;
/// a left shift moves one step up, a right shift one step down, both clamped.
inline constexpr Lane lane_transition(Lane x, LatAct act) {
    const std::size_t i = idx(x);
    switch (act) {
    case LatAct::left: return static_cast<Lane>(i == 3 ? 3 : i + 1);
    case LatAct::right: return static_cast<Lane>(i == 0 ? 0 : i - 1);
    case LatAct::same: return x;
    }
    return x;
}

inline constexpr Signal signal_for(LatAct a) {
    switch (a) {
    case LatAct::left: return Signal::Left;
    case LatAct::right: return Signal::Right;
    case LatAct::same: return Signal::Off;
    }
    return Signal::Off;
}

/// Whether maneuver `m` is physically possible from lane `x`. Labels are
/// mutually exclusive: a two-lane right shift from the middle lane is `exit`,
/// a one-lane left shift from off the highway is `enter`.
inline constexpr bool feasible(Maneuver m, Lane x) {
    switch (m) {
    case Maneuver::stay: return true;
    case Maneuver::left1: return x == Lane::right || x == Lane::middle;
    case Maneuver::left2: return x == Lane::right;
    case Maneuver::right1: return x == Lane::middle || x == Lane::left;
    case Maneuver::right2: return x == Lane::left;
    case Maneuver::enter: return x == Lane::off;
    case Maneuver::exit: return x == Lane::right || x == Lane::middle;
    case Maneuver::pass: return x != Lane::off;
    }
    return false;
}

inline constexpr bool consistent_plan(Maneuver gen, SpecPass spec) {
    return (gen == Maneuver::pass) == (spec != SpecPass::none);
}

/// Planned lateral shifts per stage, ignoring completion delay.
inline std::pair<LatAct, LatAct> planned_shifts(Maneuver gen, SpecPass spec) {
    if (!consistent_plan(gen, spec))
        throw ModelError("inconsistent plan: gen maneuver '" + maneuver_labels()[idx(gen)] + "' with spec pass '" +
                         spec_pass_labels()[idx(spec)] + "'");
    switch (gen) {
    case Maneuver::stay: return {LatAct::same, LatAct::same};
    case Maneuver::left1: return {LatAct::left, LatAct::same};
    case Maneuver::right1: return {LatAct::right, LatAct::same};
    case Maneuver::left2: return {LatAct::left, LatAct::left};
    case Maneuver::right2: return {LatAct::right, LatAct::right};
    case Maneuver::enter: return {LatAct::left, LatAct::same};
    case Maneuver::exit: return {LatAct::right, LatAct::right};
    case Maneuver::pass:
        switch (spec) {
        case SpecPass::pass_left: return {LatAct::left, LatAct::right};
        case SpecPass::pass_right: return {LatAct::right, LatAct::left};
        default: return {LatAct::same, LatAct::same};
        }
    }
    return {LatAct::same, LatAct::same};
}

using LatDist = std::array<double, 3>;

inline LatDist point_mass(LatAct a) {
    LatDist d{0.0, 0.0, 0.0};
    d[idx(a)] = 1.0;
    return d;
}

struct ActionProfile {
    LatDist m0;
    LatDist m1;
};

/// Lateral action distributions for both stages. Passes may delay the
/// return shift (stay in lane w.p. `delay`); everything else is deterministic.
inline ActionProfile plan_action_profile(Maneuver gen, SpecPass spec, double delay) {
    auto [a0, a1] = planned_shifts(gen, spec);
    ActionProfile out{point_mass(a0), point_mass(a1)};
    if (gen == Maneuver::pass && spec != SpecPass::blocked) {
        out.m1 = {0.0, 0.0, 0.0};
        out.m1[idx(a1)] = 1.0 - delay;
        out.m1[idx(LatAct::same)] += delay;
    }
    return out;
}

/// The six clearances that feed plan selection (true = slot is free).
struct Clearances {
    bool left = true;
    bool right = true;
    bool front = true;
    bool back = true;
    bool back_left = true;
    bool back_right = true;

    bool left_open() const { return left && back_left; }
    bool right_open() const { return right && back_right; }
};

using ManeuverDist = std::array<double, kManeuvers>;

/// Lane-maneuver selection.
///
/// The rule named by (at_exit, at_target, front) assigns masses to a few
/// maneuvers. Lane changes toward a blocked side (left/backL or right/backR)
/// and infeasible maneuvers hand their mass to `stay`. A car close behind
/// adds `yield_right_mass` to right1 outside the exit rule. Every remaining
/// feasible maneuver gets the floor `plan_noise`; infeasible ones get exactly
/// zero. Rules where stay is the remainder absorb the floor from stay;
/// rules with an explicit stay mass rescale their named masses to fill the
/// leftover.
inline ManeuverDist gen_maneuver_rule(AtTarget at_target, bool at_exit, Lane x0, const Clearances& clr,
                                      const TrafficParams& p) {
    ManeuverDist named{};
    bool stay_is_remainder = false;

    auto offer = [&](Maneuver m, double mass) {
        const bool blocked = ((m == Maneuver::right1 || m == Maneuver::right2 || m == Maneuver::exit) &&
                              !clr.right_open()) ||
                             ((m == Maneuver::left1 || m == Maneuver::left2 || m == Maneuver::enter) &&
                              !clr.left_open());
        if (feasible(m, x0) && !blocked)
            named[idx(m)] += mass;
        else
            named[idx(Maneuver::stay)] += mass;
    };

    if (at_exit && feasible(Maneuver::exit, x0)) {
        offer(Maneuver::exit, p.exit_mass);
        stay_is_remainder = true;
    } else if (at_target == AtTarget::too_slow && !clr.front) {
        offer(Maneuver::pass, p.slow_blocked_pass_mass);
        offer(Maneuver::right1, p.slow_blocked_right_mass);
        stay_is_remainder = true;
    } else if (at_target == AtTarget::too_slow) {
        named[idx(Maneuver::stay)] = p.slow_clear_stay_mass;
    } else if (at_target == AtTarget::at_target) {
        named[idx(Maneuver::stay)] = p.at_target_stay_mass;
        offer(Maneuver::right1, p.at_target_right_mass);
    } else {
        named[idx(Maneuver::stay)] = p.too_fast_stay_mass;
        offer(Maneuver::right1, p.too_fast_right_mass);
    }
    if (!clr.back && !(at_exit && feasible(Maneuver::exit, x0))) offer(Maneuver::right1, p.yield_right_mass);

    ManeuverDist out{};
    double floor_total = 0.0;
    for (std::size_t m = 0; m < kManeuvers; ++m) {
        const auto man = static_cast<Maneuver>(m);
        if (!feasible(man, x0) || man == Maneuver::stay) continue;
        if (named[m] > 0.0) {
            out[m] = named[m];
        } else {
            out[m] = p.plan_noise;
            floor_total += p.plan_noise;
        }
    }
    if (stay_is_remainder) {
        double others = 0.0;
        for (std::size_t m = 0; m < kManeuvers; ++m)
            if (m != idx(Maneuver::stay)) others += out[m];
        out[idx(Maneuver::stay)] = 1.0 - others;
        if (out[idx(Maneuver::stay)] >= p.plan_noise) return out;
        // Masses overshoot: stay keeps its floor and the named masses are rescaled.
        if (named[idx(Maneuver::stay)] > 0.0) {
            out[idx(Maneuver::stay)] = named[idx(Maneuver::stay)];
        } else {
            out[idx(Maneuver::stay)] = p.plan_noise;
            floor_total += p.plan_noise;
        }
    } else {
        out[idx(Maneuver::stay)] = named[idx(Maneuver::stay)];
    }
    double named_total = 0.0;
    for (std::size_t m = 0; m < kManeuvers; ++m)
        if (feasible(static_cast<Maneuver>(m), x0) && named[m] > 0.0) named_total += out[m];
    const double scale = (1.0 - floor_total) / named_total;
    for (std::size_t m = 0; m < kManeuvers; ++m)
        if (feasible(static_cast<Maneuver>(m), x0) && named[m] > 0.0) out[m] *= scale;
    return out;
}

using SpecDist = std::array<double, 4>;

/// Passing direction given the lane maneuver and the four side clearances.
/// Non-pass maneuvers put all mass on `none`.
inline SpecDist spec_pass_rule(Maneuver gen, bool left_clr, bool front_left_clr, bool right_clr, bool front_right_clr,
                               const TrafficParams& p) {
    SpecDist d{0.0, 0.0, 0.0, 0.0};
    if (gen != Maneuver::pass) {
        d[idx(SpecPass::none)] = 1.0;
        return d;
    }
    const bool left_open = left_clr && front_left_clr;
    const bool right_open = right_clr && front_right_clr;
    const std::size_t L = idx(SpecPass::pass_left), R = idx(SpecPass::pass_right), B = idx(SpecPass::blocked);
    if (left_open && right_open) {
        d[L] = p.pass_left_bias;
        d[B] = p.pass_blocked_noise;
        d[R] = 1.0 - p.pass_left_bias - p.pass_blocked_noise;
    } else if (left_open || right_open) {
        const std::size_t open = left_open ? L : R, closed = left_open ? R : L;
        d[open] = p.one_side_open_mass;
        d[B] = p.one_side_blocked_mass;
        d[closed] = 1.0 - p.one_side_open_mass - p.one_side_blocked_mass;
    } else {
        d[B] = p.both_blocked_mass;
        d[L] = d[R] = (1.0 - p.both_blocked_mass) / 2.0;
    }
    return d;
}

/// The driver is at its exit when the current position bin sits immediately
/// before the desired exit (same index).
inline constexpr bool at_exit_rule(std::size_t y_position, std::size_t exit_position) {
    return y_position == exit_position;
}

inline constexpr AtTarget at_target_rule(std::size_t speed, std::size_t target) {
    if (speed < target) return AtTarget::too_slow;
    if (speed > target) return AtTarget::too_fast;
    return AtTarget::at_target;
}

using SignalDist = std::array<double, 3>;

namespace detail {

inline SignalDist signal_row(Signal intended, double hit, double wrong) {
    SignalDist d{0.0, 0.0, 0.0};
    if (intended == Signal::Off) {
        d[idx(Signal::Off)] = 1.0 - 2.0 * wrong;
        d[idx(Signal::Left)] = d[idx(Signal::Right)] = wrong;
        return d;
    }
    const Signal other = intended == Signal::Left ? Signal::Right : Signal::Left;
    d[idx(intended)] = hit;
    d[idx(other)] = wrong;
    d[idx(Signal::Off)] = 1.0 - hit - wrong;
    return d;
}

} // namespace detail

/// First-stage turn signal: the direction of the planned first shift.
inline SignalDist signal_m0_rule(Maneuver gen, SpecPass spec, const TrafficParams& p) {
    const Signal intended = signal_for(planned_shifts(gen, spec).first);
    return detail::signal_row(intended, p.signal_compliance, p.wrong_signal);
}

/// Second-stage signal. Drivers who signalled the first shift correctly keep
/// signalling (consistency); drivers who did not signal it mostly stay silent.
inline SignalDist signal_m1_rule(Maneuver gen, SpecPass spec, Signal m0, const TrafficParams& p) {
    const auto [a0, a1] = planned_shifts(gen, spec);
    const Signal i0 = signal_for(a0), i1 = signal_for(a1);
    if (i1 == Signal::Off) return detail::signal_row(Signal::Off, 0.0, p.wrong_signal);
    if (i0 != Signal::Off && m0 == i0) return detail::signal_row(i1, p.signal_consistency, p.wrong_signal);
    if (i0 != Signal::Off && m0 == Signal::Off)
        return detail::signal_row(i1, 1.0 - p.signal_consistency - p.wrong_signal, p.wrong_signal);
    return detail::signal_row(i1, p.signal_compliance, p.wrong_signal);
}

/// Speed bin update for one stage. Clamped at both ends; clamped moves stay put.
inline std::vector<double> speed_transition(std::size_t speed, FwdAct act, double noise, std::size_t bins) {
    std::vector<double> d(bins, 0.0);
    auto move = [&](long delta, double mass) {
        long to = static_cast<long>(speed) + delta;
        if (to < 0 || to >= static_cast<long>(bins)) to = static_cast<long>(speed);
        d[static_cast<std::size_t>(to)] += mass;
    };
    switch (act) {
    case FwdAct::accel:
        move(+1, 1.0 - noise);
        move(0, noise);
        break;
    case FwdAct::decel:
        move(-1, 1.0 - noise);
        move(0, noise);
        break;
    case FwdAct::maintain:
        move(0, 1.0 - noise);
        move(+1, noise / 2.0);
        move(-1, noise / 2.0);
        break;
    }
    return d;
}

/// Position bin update: advance one bin w.p. (speed+1)/speed_bins, clamped at the last bin.
inline std::vector<double> position_transition(std::size_t position, std::size_t speed, std::size_t position_bins,
                                               std::size_t speed_bins) {
    std::vector<double> d(position_bins, 0.0);
    const double advance = static_cast<double>(speed + 1) / static_cast<double>(speed_bins);
    const std::size_t next = position + 1 < position_bins ? position + 1 : position;
    d[next] += advance;
    d[position] += 1.0 - advance;
    return d;
}

} // namespace planrec::traffic
