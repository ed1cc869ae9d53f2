#pragma once

#include <optional>
#include <string>
#include <vector>

#include "planrec/recog/scenario.hpp"
#include "planrec/traffic/builder.hpp"

namespace planrec::traffic {

/// Published posterior for one (variable, label) under a scenario.
struct ReferenceValue {
    std::string variable;
    std::string label;
    double value;
};

struct PaperScenario {
    recog::Scenario scenario;
    std::vector<ReferenceValue> reference;
};

/// The three worked observation sets for the car behind us in the middle lane:
/// A sees it move right with its front blocked, B adds a blocked front-left
/// slot, C additionally sees every other slot clear.
inline std::vector<PaperScenario> paper_scenarios() {
    const std::vector<std::string> targets{names::gen, names::x2};
    recog::Scenario a{"A", {{names::front_clr, "false"}, {names::x0, "middle"}, {names::x1, "right"}}, targets};
    recog::Scenario b = a;
    b.name = "B";
    b.evidence[names::front_left_clr] = "false";
    recog::Scenario c = b;
    c.name = "C";
    for (const auto& clr : {names::left_clr, names::right_clr, names::back_clr, names::front_right_clr,
                            names::back_left_clr, names::back_right_clr})
        c.evidence[clr] = "true";
    return {
        {a,
         {{names::gen, "right1", 0.64}, {names::gen, "pass", 0.35}, {names::x2, "right", 0.65},
          {names::x2, "middle", 0.34}}},
        {b,
         {{names::gen, "pass", 0.53}, {names::gen, "right1", 0.46}, {names::x2, "right", 0.51},
          {names::x2, "middle", 0.48}}},
        {c, {{names::gen, "pass", 0.61}, {names::gen, "right1", 0.39}}},
    };
}

} // namespace planrec::traffic
