#include "elastoball/selfsimilar.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace elastoball {

double SelfSimilarSolution::delta(double r) const { return c * std::pow(r, alpha); }

double SelfSimilarSolution::eta(double r) const { return 3.0 * delta(r) / (3.0 + alpha); }

std::optional<int> check_affine(const MaterialModel& model) {
  const auto& active = model.active_blocks();
  if (active.size() != 1) return std::nullopt;
  return active.front();
}

double affine_ratio(double theta) { return (3.0 - 3.0 * theta) / (1.0 - 3.0 * theta); }

double affine_constant(const MaterialModel& model, double theta) {
  const double z = affine_ratio(theta);
  const auto c = evaluate(model, 1.0, z);
  const double a = c.a_hat / model.kappa();
  const double b = c.b_hat / model.kappa();
  // Balancing the three terms of the delta equation at delta = c r^alpha. The
  // factor z^-theta comes from a_hat(delta, z delta) = a_hat(1, z) delta^theta.
  return 2.0 / (theta - 1.0) * std::pow(z, -theta) *
         (-(1.0 - theta) / (1.0 - 3.0 * theta) * b - a);
}

SelfSimilarSolution selfsimilar_solution(const MaterialModel& model, double g) {
  if (!(g > 0.0)) throw std::invalid_argument("self-similar solutions need g > 0");
  const auto q = check_affine(model);
  if (!q)
    throw SelfSimilarError(SelfSimilarError::Reason::NotAffine,
                           "model is not affine: need exactly one block with beta outside {-1, 0}");
  const double theta = model.exponents().theta(*q);
  if (theta >= 1.0 / 3.0 && theta <= 1.0)
    throw SelfSimilarError(SelfSimilarError::Reason::ThetaExcluded,
                           "active exponent theta lies in [1/3, 1]");
  const double C = affine_constant(model, theta);
  if (!(C > 0.0))
    throw SelfSimilarError(SelfSimilarError::Reason::NotPositive,
                           "C(theta) <= 0: no self-similar solution with c > 0");
  SelfSimilarSolution sol;
  sol.block = *q;
  sol.theta = theta;
  sol.C_theta = C;
  sol.alpha = 2.0 / (theta - 1.0);
  sol.c = std::pow(C / g, 1.0 / (1.0 - theta)) * (1.0 - 3.0 * theta) / (3.0 - 3.0 * theta);
  return sol;
}

SelfSimilarSolution selfsimilar_solution_physical(const MaterialModel& model, double K, double G) {
  if (!(K > 0.0 && G > 0.0)) throw std::invalid_argument("K and G must be positive");
  return selfsimilar_solution(model, 4.0 * std::numbers::pi * G * K * K / (3.0 * model.kappa()));
}

double affine_residual(const MaterialModel& model, const SelfSimilarSolution& sol,
                       const Eigen::ArrayXd& r_grid, double g) {
  double worst = 0.0;
  for (const double r : r_grid) {
    const double delta = sol.delta(r);
    const double eta = sol.eta(r);
    const auto c = evaluate(model, delta, eta);
    const double t1 = c.a_hat * sol.alpha * delta / r;
    const double t2 = c.b_hat * (eta - delta) / r;
    const double t3 = g * model.kappa() * r * eta * delta;
    const double scale = std::max({std::abs(t1), std::abs(t2), std::abs(t3)});
    worst = std::max(worst, std::abs(t1 - t2 + t3) / scale);
  }
  return worst;
}

}  // namespace elastoball
