#include "elastoball/powerlaw.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace elastoball {

namespace {

constexpr double kRankCutoff = 1e-10;
constexpr double kConsistencyTol = 1e-9;
constexpr double kZeroCoefficient = 1e-12;

Coefficients unflatten(const ExponentTable& table, const Eigen::VectorXd& flat) {
  Coefficients alpha;
  Eigen::Index k = 0;
  for (const auto& row : table.beta) {
    alpha.push_back(flat.segment(k, row.size()));
    k += row.size();
  }
  return alpha;
}

double sum_of(const Coefficients& alpha) {
  double s = 0.0;
  for (const auto& row : alpha) s += row.sum();
  return s;
}

struct SvdSolve {
  Eigen::VectorXd x;
  Eigen::Index rank = 0;
  bool consistent = false;
  Eigen::MatrixXd nullspace;
};

SvdSolve svd_solve(const CoefficientSystem& sys) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(sys.matrix, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd& sv = svd.singularValues();
  const double smax = sv.size() > 0 ? sv(0) : 0.0;
  svd.setThreshold(kRankCutoff);
  SvdSolve out;
  out.rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > kRankCutoff * smax) ++out.rank;
  out.x = svd.solve(sys.rhs);
  const double resid = (sys.matrix * out.x - sys.rhs).norm();
  out.consistent = resid <= kConsistencyTol * std::max(1.0, sys.rhs.norm());
  const Eigen::Index n = sys.matrix.cols();
  out.nullspace = svd.matrixV().rightCols(n - out.rank);
  return out;
}

std::string shape_string(const std::vector<int>& shape) {
  std::ostringstream os;
  os << '(';
  for (std::size_t i = 0; i < shape.size(); ++i) os << (i ? "," : "") << shape[i];
  os << ')';
  return os.str();
}

}  // namespace

std::vector<int> ExponentTable::shape() const {
  std::vector<int> s;
  s.reserve(beta.size());
  for (const auto& row : beta) s.push_back(static_cast<int>(row.size()));
  return s;
}

Eigen::Index ExponentTable::size() const {
  Eigen::Index n = 0;
  for (const auto& row : beta) n += row.size();
  return n;
}

void ExponentTable::check_structure() const {
  if (static_cast<std::size_t>(theta.size()) != beta.size())
    throw std::invalid_argument("exponent table: theta has " + std::to_string(theta.size()) +
                                " entries but beta has " + std::to_string(beta.size()) + " rows");
  for (std::size_t j = 0; j < beta.size(); ++j)
    if (beta[j].size() == 0)
      throw std::invalid_argument("exponent table: beta row " + std::to_string(j + 1) +
                                  " is empty");
}

ExponentReport validate_exponents(const ExponentTable& table) {
  table.check_structure();
  ExponentReport report;
  auto add = [&](ViolationKind kind, int block, std::string msg) {
    report.violations.push_back({kind, block, std::move(msg)});
  };
  const auto m = static_cast<int>(table.blocks());
  if (m < 2) add(ViolationKind::TooFewBlocks, -1, "at least two blocks are required");
  for (int j = 1; j < m; ++j)
    if (!(table.theta(j - 1) < table.theta(j)))
      add(ViolationKind::ThetaNotIncreasing, j, "theta must be strictly increasing");
  bool nontrivial = false;
  bool all_single = true;
  for (int j = 0; j < m; ++j) {
    const auto& row = table.beta[j];
    for (Eigen::Index i = 1; i < row.size(); ++i)
      if (!(row(i - 1) < row(i)))
        add(ViolationKind::BetaNotIncreasing, j,
            "beta row " + std::to_string(j + 1) + " must be strictly increasing");
    if (row.size() == 1) {
      if (table.theta(j) == 0.0)
        add(ViolationKind::SingleTermZeroTheta, j,
            "n_" + std::to_string(j + 1) + " = 1 requires theta_" + std::to_string(j + 1) +
                " != 0");
      if (table.theta(j) != row(0))
        add(ViolationKind::SingleTermBetaMismatch, j,
            "n_" + std::to_string(j + 1) + " = 1 requires theta_" + std::to_string(j + 1) +
                " = beta_1" + std::to_string(j + 1));
    } else {
      all_single = false;
    }
    for (double b : row)
      if (b != 0.0 && b != -1.0) nontrivial = true;
  }
  if (!nontrivial)
    add(ViolationKind::NoNontrivialBeta, -1, "at least one beta must differ from 0 and -1");
  report.fluid = all_single;
  return report;
}

CoefficientSystem assemble_coefficient_system(const ExponentTable& table, double nu) {
  table.check_structure();
  const Eigen::Index n = table.size();
  std::vector<int> multi;
  for (std::size_t j = 0; j < table.blocks(); ++j)
    if (table.beta[j].size() > 1) multi.push_back(static_cast<int>(j));
  const Eigen::Index rows = 3 + static_cast<Eigen::Index>(multi.size());

  CoefficientSystem sys{Eigen::MatrixXd::Zero(rows, n), Eigen::VectorXd::Zero(rows)};
  Eigen::Index col = 0;
  for (std::size_t j = 0; j < table.blocks(); ++j) {
    const double th = table.theta(static_cast<Eigen::Index>(j));
    const auto& row = table.beta[j];
    const auto it = std::find(multi.begin(), multi.end(), static_cast<int>(j));
    for (Eigen::Index i = 0; i < row.size(); ++i, ++col) {
      sys.matrix(0, col) = th;
      sys.matrix(1, col) = th * th;
      sys.matrix(2, col) = row(i) * row(i);
      if (it != multi.end()) sys.matrix(3 + (it - multi.begin()), col) = th - row(i);
    }
  }
  sys.rhs(1) = 1.0;
  sys.rhs(2) = 3.0 * (1.0 - nu) / (1.0 + nu);
  return sys;
}

SolvabilityProbe probe_solvability(const ExponentTable& table, double nu) {
  const auto s = svd_solve(assemble_coefficient_system(table, nu));
  return {nu, s.consistent, s.rank, table.size() - s.rank};
}

std::array<double, 7> admissibility_samples() {
  constexpr double lo = -0.9, hi = 0.5;
  std::array<double, 7> nus{};
  for (int k = 0; k < 7; ++k)
    nus[k] = 0.5 * (lo + hi) +
             0.5 * (hi - lo) * std::cos((2.0 * k + 1.0) * std::numbers::pi / 14.0);
  return nus;
}

std::vector<SolvabilityProbe> probe_admissibility(const ExponentTable& table) {
  std::vector<SolvabilityProbe> probes;
  for (double nu : admissibility_samples()) probes.push_back(probe_solvability(table, nu));
  return probes;
}

CoefficientSolution solve_coefficients(const ExponentTable& table, double nu) {
  const auto report = validate_exponents(table);
  if (!report.ok())
    throw CoefficientError(CoefficientError::Reason::InvalidExponents,
                           "exponent table violates the power-law conditions: " +
                               report.violations.front().message);
  if (!(nu > -1.0 && nu <= 0.5))
    throw std::invalid_argument("Poisson ratio must lie in (-1, 1/2]");

  if (report.fluid) {
    // Fluid tables are consistent only at nu = 1/2; the sampled interval test does not apply.
    if (nu != 0.5)
      throw CoefficientError(CoefficientError::Reason::Inadmissible,
                             "fluid type " + shape_string(table.shape()) +
                                 " admits coefficients only at nu = 1/2");
  } else {
    const auto probes = probe_admissibility(table);
    const auto bad = std::count_if(probes.begin(), probes.end(),
                                   [](const SolvabilityProbe& p) { return !p.consistent; });
    if (bad >= 6)
      throw CoefficientError(CoefficientError::Reason::Inadmissible,
                             "type " + shape_string(table.shape()) +
                                 " is inadmissible: coefficient system inconsistent at " +
                                 std::to_string(bad) + " of 7 sampled Poisson ratios");
  }

  const auto s = svd_solve(assemble_coefficient_system(table, nu));
  if (!s.consistent)
    throw CoefficientError(CoefficientError::Reason::DegenerateAtNu,
                           "coefficient system has no solution at nu = " + std::to_string(nu));

  CoefficientSolution sol;
  sol.alpha = unflatten(table, s.x);
  sol.w0 = -sum_of(sol.alpha);
  sol.nullity = static_cast<int>(table.size() - s.rank);
  if (sol.nullity > 0) {
    sol.nullspace = s.nullspace;
  } else {
    const double scale = s.x.cwiseAbs().maxCoeff();
    for (Eigen::Index k = 0; k < s.x.size(); ++k)
      if (std::abs(s.x(k)) <= kZeroCoefficient * scale)
        throw CoefficientError(CoefficientError::Reason::DegenerateAtNu,
                               "coefficient " + std::to_string(k + 1) + " vanishes at nu = " +
                                   std::to_string(nu));
  }
  return sol;
}

bool is_lame_type(const std::vector<int>& shape) {
  static const std::vector<std::vector<int>> kLame = {
      {1, 3}, {2, 3}, {1, 1, 2}, {1, 2, 2}, {2, 2, 2}};
  auto sorted = shape;
  std::sort(sorted.begin(), sorted.end());
  return std::find(kLame.begin(), kLame.end(), sorted) != kLame.end();
}

BulkPoisson from_lame(const Lame& lame) {
  return {lame.lambda + 2.0 * lame.mu / 3.0, lame.lambda / (2.0 * (lame.lambda + lame.mu))};
}

Lame to_lame(const BulkPoisson& bp) {
  // nu = lambda / (2(lambda + mu)), kappa = lambda + 2 mu / 3
  const double mu = 3.0 * bp.kappa * (1.0 - 2.0 * bp.nu) / (2.0 * (1.0 + bp.nu));
  return {bp.kappa - 2.0 * mu / 3.0, mu};
}

MaterialModel::MaterialModel(ExponentTable exponents, CoefficientSolution coeffs, double kappa,
                             double nu, std::string name)
    : exponents_(std::move(exponents)),
      coeffs_(std::move(coeffs)),
      kappa_(kappa),
      nu_(nu),
      name_(std::move(name)) {
  exponents_.check_structure();
  if (coeffs_.alpha.size() != exponents_.blocks())
    throw std::invalid_argument("coefficient rows do not match the exponent table");
  if (!(kappa_ > 0.0)) throw std::invalid_argument("bulk modulus must be positive");
  for (std::size_t j = 0; j < exponents_.blocks(); ++j) {
    const auto& b = exponents_.beta[j];
    const auto& a = coeffs_.alpha[j];
    if (a.size() != b.size())
      throw std::invalid_argument("coefficient row " + std::to_string(j + 1) +
                                  " does not match the exponent table");
    std::vector<int> act;
    for (Eigen::Index i = 0; i < b.size(); ++i) {
      monomials_.push_back({exponents_.theta(static_cast<Eigen::Index>(j)), b(i), a(i)});
      if (b(i) != 0.0 && b(i) != -1.0) act.push_back(static_cast<int>(i));
    }
    if (!act.empty()) active_blocks_.push_back(static_cast<int>(j));
    active_.push_back(std::move(act));
  }
  if (active_blocks_.empty())
    throw std::invalid_argument("no block carries an exponent beta outside {-1, 0}");
  coeffs_.w0 = -sum_of(coeffs_.alpha);
}

MaterialModel make_powerlaw_model(const ExponentTable& table, double nu, double kappa,
                                  std::string name) {
  return MaterialModel(table, solve_coefficients(table, nu), kappa, nu, std::move(name));
}

MaterialModel make_powerlaw_model(const ExponentTable& table, const Coefficients& alpha,
                                  double nu, double kappa, std::string name) {
  CoefficientSolution sol;
  sol.alpha = alpha;
  sol.w0 = -sum_of(alpha);
  return MaterialModel(table, std::move(sol), kappa, nu, std::move(name));
}

std::array<double, 4> check_linear_compat(const MaterialModel& model) {
  // p_rad = sum a b delta^(1+b) eta^(th-b), p_tan = 1/2 sum a (3th-b) delta^(1+b) eta^(th-b)
  double dprad_dd = 0, dprad_de = 0, dptan_dd = 0, dptan_de = 0;
  for (const Monomial& t : model.monomials()) {
    dprad_dd += t.alpha * t.beta * (1.0 + t.beta);
    dprad_de += t.alpha * t.beta * (t.theta - t.beta);
    dptan_dd += 0.5 * t.alpha * (3.0 * t.theta - t.beta) * (1.0 + t.beta);
    dptan_de += 0.5 * t.alpha * (3.0 * t.theta - t.beta) * (t.theta - t.beta);
  }
  const double nu = model.nu();
  return {std::abs(dprad_dd - 3.0 * (1.0 - nu) / (1.0 + nu)),
          std::abs(dprad_de + 2.0 * (1.0 - 2.0 * nu) / (1.0 + nu)),
          std::abs(dptan_dd - 3.0 * nu / (1.0 + nu)),
          std::abs(dptan_de - (1.0 - 2.0 * nu) / (1.0 + nu))};
}

}  // namespace elastoball
