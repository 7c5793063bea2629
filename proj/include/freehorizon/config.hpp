#pragma once

#include <string>

#include "freehorizon/horizon.hpp"

namespace freehorizon {

/// Config parse failure; message names the offending key and line.
struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// One experiment scenario: model, problem data, sweep and solver settings.
/// Parsed from an INI-style file with [model], [cost], [sweep], [solver]
/// sections; unknown keys are rejected.
struct ScenarioConfig {
  ModelId model_id = ModelId::car_like;
  ModelParams model_params;
  Vec x0;
  CostSpec cost;
  double M = 0.0;
  SweepParams sweep;
  SolverOptions solver;
  std::string output_dir = ".";

  Model make_model() const { return Model(model_id, model_params); }
  Problem make_problem() const { return Problem{make_model(), cost, x0}; }
};

ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::string& path);

}  // namespace freehorizon
