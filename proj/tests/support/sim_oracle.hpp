#pragma once

// Reference simulator for the six bundled motions, written directly from
// their plain-language semantics. It shares the state data types with the
// engine but none of the template/validation machinery, so tests can compare
// the two routes independently.

#include <optional>
#include <string>
#include <vector>

#include "foon/core.hpp"

namespace foon::sim {

/// True when `step` can execute in `env` per the reference semantics.
bool feasible(const EnvironmentState& env, const PlanStep& step);

/// Executes a feasible step. Undefined for infeasible steps.
EnvironmentState apply(const EnvironmentState& env, const PlanStep& step);

/// Every feasible ground step in `env`, deterministically ordered.
std::vector<PlanStep> enumerate_feasible(const EnvironmentState& env);

}  // namespace foon::sim
