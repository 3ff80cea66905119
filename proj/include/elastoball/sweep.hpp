#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Core>

#include "elastoball/ball_solver.hpp"
#include "elastoball/materials.hpp"

namespace elastoball {

/// Sweep-level label: every outcome other than FiniteBall and InvalidCenter
/// is a NoBall variant.
bool is_no_ball(OutcomeKind kind);
/// "FiniteBall", "InvalidCenter", or "NoBall:<kind>".
std::string sweep_label(OutcomeKind kind);

OutcomeKind classify_point(const ModelFamily& family, double nu, double delta_c,
                           const SolverConfig& config);

class NoTransition : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DeltaCircle {
  double delta_circle = 0.0;
  double bracket_width = 0.0;
  double lo = 0.0;  // last NoBall point
  double hi = 0.0;  // last FiniteBall point
  double delta_star = 0.0;
  /// False when the coarse scan saw more than one label change; the result
  /// is then only a bracket around one of the transitions.
  bool monotone = true;
};

struct DeltaCircleOptions {
  double lo_frac = 0.01;
  double hi_frac = 0.999;
  double rel_width = 1e-4;
  int scan_points = 16;
};

/// Bisects the NoBall/FiniteBall transition inside (lo_frac, hi_frac) * delta_star.
/// Throws NoTransition when delta_star is undefined or both ends agree.
DeltaCircle find_delta_circle(const ModelFamily& family, double nu, const SolverConfig& config,
                              const DeltaCircleOptions& opts = {});

enum class DeltaScale { Absolute, RelativeStar, RelativeFlat };

std::string_view to_string(DeltaScale scale);
DeltaScale parse_delta_scale(std::string_view name);

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

/// n points from lo to hi inclusive; a single point sits at lo.
Eigen::ArrayXd grid_points(const Range& range, int n);

struct SweepGrid {
  ModelFamily family;
  DeltaScale scale = DeltaScale::Absolute;
  Eigen::ArrayXd nu_values;
  /// Column coordinates, in the units given by `scale`.
  Eigen::ArrayXd delta_c_values;
  /// Absolute center densities, one per cell.
  Eigen::MatrixXd delta_c;
  /// OutcomeKind values cast to int; rows follow nu, columns delta_c.
  Eigen::MatrixXi labels;
  SolverConfig meta;

  OutcomeKind label(Eigen::Index i, Eigen::Index j) const {
    return static_cast<OutcomeKind>(labels(i, j));
  }
};

using Progress = std::function<void(std::size_t done, std::size_t total)>;

/// Evaluates classify_point on every cell with up to `threads` workers.
/// Results do not depend on the thread count.
SweepGrid sweep_grid(const ModelFamily& family, const Range& nu_range, const Range& delta_c_range,
                     int nu_points, int delta_points, DeltaScale scale,
                     const SolverConfig& config, int threads = 1, const Progress& progress = {});

struct BoundaryCurve {
  Eigen::ArrayXd nu;
  /// NaN where no transition was found.
  Eigen::ArrayXd delta_circle;
  Eigen::ArrayXd bracket_width;
};

BoundaryCurve boundary_curve(const ModelFamily& family, const Eigen::ArrayXd& nu_values,
                             const SolverConfig& config, int threads = 1,
                             const DeltaCircleOptions& opts = {}, const Progress& progress = {});

}  // namespace elastoball
