#pragma once

// Seeded generators for the property suites: random consistent environments,
// simulator-built valid plans, and single-token corruptions verified to be
// infeasible at their step.

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "foon/core.hpp"

namespace foon::testgen {

using Rng = std::mt19937_64;

/// A consistent random environment: 2..max_objects objects over all four
/// categories at base locations, optionally shuffled by a few simulator moves.
EnvironmentState random_environment(Rng& rng, int max_objects = 6, int shuffle_moves = 3);

/// A plan of up to max_len steps, each feasible per the simulator when
/// executed in order. Returns the steps and the simulator's final state.
struct GeneratedPlan {
  std::vector<PlanStep> steps;
  EnvironmentState final_env;
};
GeneratedPlan random_valid_plan(Rng& rng, const EnvironmentState& env, int max_len);

enum class CorruptionKind { HandToken, PlaceToken, ObjectToken };

struct Corruption {
  int step_index = 0;
  PlanStep corrupted;      // the step with one token replaced
  CorruptionKind kind = CorruptionKind::HandToken;
  std::string new_token;   // the replacement token
  std::string old_token;
};

/// Replaces one token of one step such that the simulator deems the corrupted
/// step infeasible in the state reached by the preceding prefix. Returns
/// nullopt when no such corruption is found for this plan.
std::optional<Corruption> corrupt_plan(Rng& rng, const EnvironmentState& env,
                                       const std::vector<PlanStep>& steps, int max_tries = 400);

}  // namespace foon::testgen
