#pragma once

#include <memory>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "elastoball/dopri5.hpp"
#include "elastoball/powerlaw.hpp"

namespace elastoball {

/// Nondimensional units: reference density 1, and g = (4 pi G / 3) K^2 / kappa.
struct SolverConfig {
  double g = 1.0;
  /// Series start radius as a fraction of the gravitational length.
  double r0_rel = 1e-4;
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double r_max = 1e3;
  double delta_max = 1e6;
  /// Floor for a_hat / kappa below which the system counts as non-hyperbolic.
  double hyp_eps = 1e-8;
  long max_steps = 2'000'000;
  /// Relative bound on |u' - f| for the dense output u at interior points of
  /// every step; steps that miss it are retried smaller. 0 disables the check.
  double defect_tol = 1e-7;

  void validate() const;
};

using State2 = Eigen::Vector2d;  // (delta, eta)

/// Dense representation of one integrated solution: the regular-center
/// series on [0, r0] followed by Dormand-Prince segments.
class Trajectory {
 public:
  Trajectory(MaterialModel model, double g, double delta_c, double d2, double r_start);

  const MaterialModel& model() const { return model_; }
  double g() const { return g_; }
  double r_start() const { return r_start_; }
  double r_end() const { return r_end_; }
  bool has_center() const { return has_center_; }

  State2 state(double r) const;
  State2 derivative(double r) const;

  void append(const DenseSegment<State2>& seg) { segments_.push_back(seg); }
  void set_end(double r, const State2& y) {
    r_end_ = r;
    y_end_ = y;
  }
  const std::vector<DenseSegment<State2>>& segments() const { return segments_; }

  /// Starts at an arbitrary radius instead of a regular center.
  static Trajectory from_state(MaterialModel model, double g, double r_start, const State2& y);

 private:
  Trajectory() = default;
  MaterialModel model_;
  double g_ = 1.0;
  bool has_center_ = true;
  double delta_c_ = 0.0;
  double d2_ = 0.0;
  double r_start_ = 0.0;
  State2 y_start_ = State2::Zero();
  double r_end_ = 0.0;
  State2 y_end_ = State2::Zero();
  std::vector<DenseSegment<State2>> segments_;
};

/// Sampled radial profile. Columns share one length; `trajectory` gives
/// dense access for resampling.
struct RadialProfile {
  Eigen::ArrayXd r, delta, eta, rho, p_rad, p_tan, m;
  std::shared_ptr<const Trajectory> trajectory;

  Eigen::Index size() const { return r.size(); }
};

/// Enclosed mass in nondimensional units, (4 pi / 3) eta r^3.
double enclosed_mass(double eta, double r);

RadialProfile sample_profile(std::shared_ptr<const Trajectory> trajectory,
                             const std::vector<double>& radii);

enum class OutcomeKind { FiniteBall, NoSurface, HyperbolicityBreakdown, DensityBlowup, InvalidCenter };

std::string_view to_string(OutcomeKind kind);
OutcomeKind parse_outcome(std::string_view name);

struct BallOutcome {
  OutcomeKind kind = OutcomeKind::InvalidCenter;
  double delta_c = 0.0;
  double p_center = 0.0;
  /// Radius and mass; meaningful for FiniteBall only.
  double R = 0.0;
  double M = 0.0;
  /// Radius where integration stopped (R for FiniteBall).
  double r_stop = 0.0;
  long steps = 0;
  RadialProfile profile;

  bool finite() const { return kind == OutcomeKind::FiniteBall; }
};

struct CenterExpansion {
  double d2;    // delta ~ delta_c + d2 r^2
  double eta2;  // eta ~ delta_c + eta2 r^2
};

class HyperbolicityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Quadratic Taylor coefficients of the regular solution. Throws
/// HyperbolicityError when a_hat at the center is below the floor.
CenterExpansion center_expansion(const MaterialModel& model, double delta_c,
                                 const SolverConfig& config);

/// Length over which gravity changes the central density by O(1).
double gravitational_length(const MaterialModel& model, double delta_c, const SolverConfig& config);

BallOutcome integrate_ball(const MaterialModel& model, double delta_c, const SolverConfig& config);

struct FreeIntegration {
  OutcomeKind kind;  // NoSurface when r_end was reached
  double r_stop;
  std::shared_ptr<const Trajectory> trajectory;
};

/// Integrates the static system from (r_start, y) to r_end without surface
/// detection. Used for self-similar data that do not start at a regular center.
FreeIntegration integrate_from(const MaterialModel& model, double r_start, const State2& y,
                               double r_end, const SolverConfig& config);

/// Right-hand side of the first-order static system; NaN outside the domain.
State2 static_rhs(const MaterialModel& model, double g, double r, const State2& y);

/// Uniformly spaced resampling on [0, r_last]; endpoints copied exactly.
RadialProfile resample_profile(const RadialProfile& profile, int n);

}  // namespace elastoball
