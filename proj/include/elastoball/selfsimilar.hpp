#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include <Eigen/Core>

#include "elastoball/powerlaw.hpp"

namespace elastoball {

/// Exact solution delta = c r^alpha, eta = 3 delta / (3 + alpha) of the static
/// system for an affine power-law material.
struct SelfSimilarSolution {
  double alpha = 0.0;
  double c = 0.0;
  double theta = 0.0;
  double C_theta = 0.0;
  int block = -1;  // index of the single active block

  double delta(double r) const;
  double eta(double r) const;
};

class SelfSimilarError : public std::runtime_error {
 public:
  enum class Reason { NotAffine, ThetaExcluded, NotPositive };
  SelfSimilarError(Reason reason, const std::string& what)
      : std::runtime_error(what), reason_(reason) {}
  Reason reason() const { return reason_; }

 private:
  Reason reason_;
};

/// Index of the unique block with a beta outside {-1, 0}, if there is exactly one.
std::optional<int> check_affine(const MaterialModel& model);

/// eta / delta along the self-similar solution, (3 - 3 theta) / (1 - 3 theta).
double affine_ratio(double theta);

/// C(theta) from a_hat and b_hat of the model at (1, z), with kappa scaled out.
double affine_constant(const MaterialModel& model, double theta);

/// Solution in the solver's units, where the gravity term reads g kappa r eta delta.
SelfSimilarSolution selfsimilar_solution(const MaterialModel& model, double g = 1.0);

/// Same with explicit reference density and gravitational constant:
/// g = 4 pi G K^2 / (3 kappa).
SelfSimilarSolution selfsimilar_solution_physical(const MaterialModel& model, double K, double G);

/// Largest normalized residual of the static equation for delta along
/// `sol` on the given radii.
double affine_residual(const MaterialModel& model, const SelfSimilarSolution& sol,
                       const Eigen::ArrayXd& r_grid, double g = 1.0);

}  // namespace elastoball
