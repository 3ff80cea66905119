#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace elastoball {

/// Exponents of a power-law stored energy: one theta per block, and a
/// strictly increasing row of betas inside every block.
struct ExponentTable {
  Eigen::VectorXd theta;
  std::vector<Eigen::VectorXd> beta;

  std::size_t blocks() const { return beta.size(); }
  std::vector<int> shape() const;
  /// Total number of monomials (unknown coefficients).
  Eigen::Index size() const;
  /// Throws std::invalid_argument when theta and beta disagree on m.
  void check_structure() const;
};

enum class ViolationKind {
  TooFewBlocks,
  ThetaNotIncreasing,
  BetaNotIncreasing,
  SingleTermZeroTheta,
  SingleTermBetaMismatch,
  NoNontrivialBeta,
};

struct Violation {
  ViolationKind kind;
  int block = -1;
  std::string message;
};

struct ExponentReport {
  std::vector<Violation> violations;
  /// Every block has a single monomial (barotropic fluid).
  bool fluid = false;

  bool ok() const { return violations.empty(); }
};

ExponentReport validate_exponents(const ExponentTable& table);

/// Ragged coefficient array; alpha[j](i) multiplies eta^theta_j (delta/eta)^beta_ij.
using Coefficients = std::vector<Eigen::VectorXd>;

struct CoefficientSolution {
  Coefficients alpha;
  double w0 = 0.0;
  int nullity = 0;
  /// Columns span the solution freedom (flattened block-major); empty when nullity == 0.
  Eigen::MatrixXd nullspace;
};

class CoefficientError : public std::runtime_error {
 public:
  enum class Reason { InvalidExponents, Inadmissible, DegenerateAtNu };
  CoefficientError(Reason reason, const std::string& what)
      : std::runtime_error(what), reason_(reason) {}
  Reason reason() const { return reason_; }

 private:
  Reason reason_;
};

/// Linear conditions on the coefficients: linear-elastic compatibility,
/// natural state and isotropy. Rows of single-monomial blocks are dropped.
struct CoefficientSystem {
  Eigen::MatrixXd matrix;
  Eigen::VectorXd rhs;
};

CoefficientSystem assemble_coefficient_system(const ExponentTable& table, double nu);

struct SolvabilityProbe {
  double nu = 0.0;
  bool consistent = false;
  Eigen::Index rank = 0;
  Eigen::Index nullity = 0;
};

SolvabilityProbe probe_solvability(const ExponentTable& table, double nu);

/// Chebyshev-Gauss nodes in (-0.9, 0.5) used to decide admissibility.
std::array<double, 7> admissibility_samples();
std::vector<SolvabilityProbe> probe_admissibility(const ExponentTable& table);

CoefficientSolution solve_coefficients(const ExponentTable& table, double nu);

bool is_lame_type(const std::vector<int>& shape);

struct BulkPoisson {
  double kappa;
  double nu;
};
struct Lame {
  double lambda;
  double mu;
};
BulkPoisson from_lame(const Lame& lame);
Lame to_lame(const BulkPoisson& bp);

struct Monomial {
  double theta;
  double beta;
  double alpha;
};

class MaterialModel {
 public:
  MaterialModel() = default;
  MaterialModel(ExponentTable exponents, CoefficientSolution coeffs, double kappa, double nu,
                std::string name = "powerlaw");

  const ExponentTable& exponents() const { return exponents_; }
  const CoefficientSolution& coefficients() const { return coeffs_; }
  double kappa() const { return kappa_; }
  double nu() const { return nu_; }
  const std::string& name() const { return name_; }

  /// I_j: indices with beta not in {-1, 0}.
  const std::vector<std::vector<int>>& active_terms() const { return active_; }
  /// J: blocks with nonempty I_j.
  const std::vector<int>& active_blocks() const { return active_blocks_; }

  const std::vector<Monomial>& monomials() const { return monomials_; }

 private:
  ExponentTable exponents_;
  CoefficientSolution coeffs_;
  double kappa_ = 1.0;
  double nu_ = 0.0;
  std::string name_;
  std::vector<std::vector<int>> active_;
  std::vector<int> active_blocks_;
  std::vector<Monomial> monomials_;
};

/// Builds a model from exponents alone; coefficients from solve_coefficients.
MaterialModel make_powerlaw_model(const ExponentTable& table, double nu, double kappa = 1.0,
                                  std::string name = "powerlaw");
/// Builds a model with explicit coefficients (non-Lamé types).
MaterialModel make_powerlaw_model(const ExponentTable& table, const Coefficients& alpha,
                                  double nu, double kappa = 1.0, std::string name = "powerlaw");

namespace detail {

template <typename Scalar>
void require_positive(Scalar delta, Scalar eta) {
  if (!(delta > Scalar(0)) || !(eta > Scalar(0)))
    throw std::domain_error("constitutive functions need delta > 0 and eta > 0");
}

/// (x^p - 1)/(1 - x), with a Taylor branch next to x = 1.
template <typename Scalar>
Scalar removable_quotient(Scalar log_x, Scalar x, Scalar p) {
  using std::abs;
  using std::expm1;
  const Scalar u = x - Scalar(1);
  if (abs(u) < Scalar(1e-4)) {
    return -(p + p * (p - 1) / 2 * u + p * (p - 1) * (p - 2) / 6 * u * u);
  }
  return expm1(p * log_x) / (-u);
}

}  // namespace detail

template <typename Scalar>
struct Constitutive {
  Scalar p_rad;
  Scalar p_tan;
  Scalar a_hat;
  Scalar b_hat;
};

/// All four constitutive quantities at once, sharing the logarithms.
template <typename Scalar>
Constitutive<Scalar> evaluate(const MaterialModel& model, Scalar delta, Scalar eta) {
  using std::exp;
  using std::log;
  detail::require_positive(delta, eta);
  const Scalar log_eta = log(eta);
  const Scalar x = delta / eta;
  const Scalar log_x = log(x);
  Constitutive<Scalar> out{0, 0, 0, 0};
  for (const Monomial& t : model.monomials()) {
    const Scalar th = t.theta, be = t.beta, al = t.alpha;
    const Scalar eta_th = exp(th * log_eta);
    const Scalar x_b1 = exp((be + 1) * log_x);
    out.p_rad += eta * eta_th * al * be * x_b1;
    out.p_tan += eta * eta_th * al * (3 * th - be) * x_b1 / 2;
    out.a_hat += eta_th * al * be * (be + 1) * exp(be * log_x);
    out.b_hat += 3 * eta_th * al * (th - be) *
                 (detail::removable_quotient(log_x, x, be + 1) + be * x_b1);
  }
  const Scalar kappa = model.kappa();
  out.p_rad *= kappa;
  out.p_tan *= kappa;
  out.a_hat *= kappa;
  out.b_hat *= kappa;
  return out;
}

template <typename Scalar>
Scalar stored_energy(const MaterialModel& model, Scalar delta, Scalar eta) {
  using std::exp;
  using std::log;
  detail::require_positive(delta, eta);
  const Scalar log_eta = log(eta);
  const Scalar log_x = log(delta / eta);
  Scalar w = model.coefficients().w0;
  for (const Monomial& t : model.monomials())
    w += Scalar(t.alpha) * exp(Scalar(t.theta) * log_eta + Scalar(t.beta) * log_x);
  return Scalar(model.kappa()) * w;
}

template <typename Scalar>
Scalar p_rad(const MaterialModel& model, Scalar delta, Scalar eta) {
  return evaluate(model, delta, eta).p_rad;
}

template <typename Scalar>
Scalar p_tan(const MaterialModel& model, Scalar delta, Scalar eta) {
  return evaluate(model, delta, eta).p_tan;
}

template <typename Scalar>
Scalar a_hat(const MaterialModel& model, Scalar delta, Scalar eta) {
  return evaluate(model, delta, eta).a_hat;
}

template <typename Scalar>
Scalar b_hat(const MaterialModel& model, Scalar delta, Scalar eta) {
  return evaluate(model, delta, eta).b_hat;
}

/// Residuals of the four linear-elasticity compatibility conditions at the
/// natural state, from closed-form partials of the pressures.
std::array<double, 4> check_linear_compat(const MaterialModel& model);

}  // namespace elastoball
