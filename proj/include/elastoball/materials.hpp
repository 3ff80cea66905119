#pragma once

#include <limits>
#include <optional>
#include <string>
#include <string_view>

#include "elastoball/powerlaw.hpp"

namespace elastoball {

enum class FamilyTag { SVK, John, Signorini, Hadamard, Fluid11, PolytropicAffine };

std::string_view to_string(FamilyTag tag);
/// Accepts the CLI spellings: svk, john, signorini, hadamard, fluid11, polyaffine.
FamilyTag parse_family(std::string_view name);

/// A builtin material family with its parameters. Fields that do not apply
/// to the chosen tag are ignored.
struct ModelFamily {
  FamilyTag tag = FamilyTag::SVK;
  double nu = 0.25;
  double kappa = 1.0;
  double tau = 0.0;       // Signorini
  double epsilon = 0.0;   // John
  double theta1 = -1.0;   // Fluid11
  double theta2 = 2.0 / 3.0;
  double theta = -2.0;    // PolytropicAffine
  double beta = 2.0;
};

class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Throws ParameterError when the family parameters are out of range.
void check_family(const ModelFamily& family);

MaterialModel make_model(const ModelFamily& family);

/// Exponent table of a family (independent of nu for every builtin).
ExponentTable family_exponents(const ModelFamily& family);

/// Closed-form radial (= tangential) pressure at a regular center.
double center_pressure(const ModelFamily& family, double delta_c);

struct Thresholds {
  /// Hyperbolicity limit; +inf when the center stays hyperbolic.
  double delta_flat = std::numeric_limits<double>::infinity();
  /// Upper end of the small-density window with positive center pressure.
  std::optional<double> delta_star;
  /// Sufficient-existence bound (Hadamard).
  std::optional<double> delta_sharp;
};

Thresholds thresholds(const ModelFamily& family);

/// Operational meaning of an infinite hyperbolicity limit.
inline constexpr double kDeltaFlatSearchCap = 1e6;

/// Smallest root above 1 of delta -> a_hat(delta, delta); +inf if none below the cap.
double delta_flat_generic(const MaterialModel& model);

}  // namespace elastoball
