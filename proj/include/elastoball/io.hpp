#pragma once

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "elastoball/ball_solver.hpp"
#include "elastoball/materials.hpp"
#include "elastoball/powerlaw.hpp"
#include "elastoball/selfsimilar.hpp"
#include "elastoball/sweep.hpp"

namespace elastoball {

using nlohmann::json;

/// Shortest decimal string that parses back to the same double; "inf",
/// "-inf" and "nan" for non-finite values.
std::string format_double(double v);

/// JSON value for a double: a number, "inf"/"-inf", or null for NaN.
json json_number(double v);
/// Inverse of json_number.
double number_from_json(const json& j);

class SpecError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A model spec as read from JSON. Either a builtin family
/// ({"family": "john", "nu": 0.1, ...}) or an explicit exponent table
/// ({"theta": [...], "beta": [[...], ...], "alpha": [[...], ...], "nu", "kappa"}),
/// where "alpha" may be omitted for Lame types.
struct ModelSpec {
  std::optional<ModelFamily> family;
  ExponentTable table;
  std::optional<Coefficients> alpha;
  double nu = 0.25;
  double kappa = 1.0;
  std::string name = "powerlaw";
};

/// Throws SpecError on structural problems (missing keys, wrong types, ragged rows).
ModelSpec parse_model_spec(const json& j);
MaterialModel build_model(const ModelSpec& spec);
/// Explicit-table spec with coefficients; parses back to a bit-identical model.
json model_to_json(const MaterialModel& model);

ModelFamily family_from_json(const json& j);
json family_to_json(const ModelFamily& family);

json config_to_json(const SolverConfig& config);
/// Overrides the fields present in `j`.
void config_from_json(const json& j, SolverConfig& config);

void write_profile_csv(std::ostream& os, const RadialProfile& profile);
json outcome_json(const BallOutcome& outcome, const MaterialModel& model);
json thresholds_json(const Thresholds& t, double delta_flat_numeric);
json selfsimilar_json(const SelfSimilarSolution& sol);

void write_sweep_csv(std::ostream& os, const SweepGrid& grid);
void write_boundary_csv(std::ostream& os, const BoundaryCurve& curve);

}  // namespace elastoball
