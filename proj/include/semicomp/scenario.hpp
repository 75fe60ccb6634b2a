#pragma once

#include <string>

#include "semicomp/characteristics.hpp"
#include "semicomp/mc_engine.hpp"
#include "semicomp/ordering.hpp"
#include "semicomp/payoff.hpp"

namespace semicomp {

// A comparison problem: two models, the theorem to check, the primary payoff
// and the numerical budget.  Model X is the claimed dominating process
// (E f(Y_T) <= E f(X_T) is the asserted conclusion).
struct Scenario {
    int spec_version = 1;
    std::string name;
    TheoremId theorem = TheoremId::cx_emm;
    ProcessModel model_x;
    ProcessModel model_y;
    Payoff payoff;
    SimConfig sim;
    double grid_h = 1.0 / 128.0;
    OrderingAssumptions assume;
};

// Parse a scenario from JSON text; `origin` is used in error messages.
Scenario parse_scenario(const std::string& json_text, const std::string& origin = "<memory>");
// Load from a file path.
Scenario load_scenario(const std::string& path);

} // namespace semicomp
