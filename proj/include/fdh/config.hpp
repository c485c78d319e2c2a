#pragma once

// JSON experiment configs. Parsing collects every schema violation (with its
// key path) before failing, and rejects unknown keys.

#include "fdh/conditions.hpp"
#include "fdh/dynamics.hpp"
#include "fdh/montecarlo.hpp"
#include "fdh/spectral_model.hpp"

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

namespace fdh {

using Json = nlohmann::json;

struct ConditionsSpec {
  AsymptoticSpec asymptotic;
  std::vector<std::string> checks;
  std::optional<DirichletExampleInput> dirichlet;
  /// Set when c1 or c2 is given: also test the q_i^2 sandwich on the model.
  bool dirichlet_model_sandwich = false;
  std::int64_t samples = 2000;
  std::uint64_t seed = 0;
};

struct ExperimentConfig {
  /// Config as parsed, with defaults left implicit; echoed in result records.
  Json source;
  std::optional<SpectralModel> model;
  CoefficientSet coeffs;
  EnsembleConfig run;
  StateVector x;
  StateVector y;
  double p = 2.0;
  TestFunction f = TestFunction::exp_neg_h_sq();
  double slack = 0.05;
  double eps0 = 0.01;
  ConditionsSpec conditions;
  std::vector<double> radii{0.1, 0.05, 0.025};
};

/// Condition check names accepted in conditions.checks.
const std::vector<std::string>& known_checks();

/// Throws SchemaError listing all violations, one per line as "key.path: message".
ExperimentConfig parse_config_json(const Json& doc);
/// Reads and parses a file. Errors: IOError, SchemaError.
ExperimentConfig parse_config(const std::string& path);
Json load_json_file(const std::string& path);

}  // namespace fdh
