#include "elastoball/materials.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

namespace elastoball {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Block {
  double theta;
  std::vector<std::pair<double, double>> terms;  // (beta, alpha)
};

/// Sorts blocks by theta and terms by beta, then splits into table + coefficients.
std::pair<ExponentTable, Coefficients> tabulate(std::vector<Block> blocks) {
  std::sort(blocks.begin(), blocks.end(),
            [](const Block& a, const Block& b) { return a.theta < b.theta; });
  ExponentTable table;
  table.theta.resize(static_cast<Eigen::Index>(blocks.size()));
  Coefficients alpha;
  for (std::size_t j = 0; j < blocks.size(); ++j) {
    auto& terms = blocks[j].terms;
    std::sort(terms.begin(), terms.end());
    table.theta(static_cast<Eigen::Index>(j)) = blocks[j].theta;
    Eigen::VectorXd b(static_cast<Eigen::Index>(terms.size()));
    Eigen::VectorXd a(b.size());
    for (std::size_t i = 0; i < terms.size(); ++i) {
      b(static_cast<Eigen::Index>(i)) = terms[i].first;
      a(static_cast<Eigen::Index>(i)) = terms[i].second;
    }
    table.beta.push_back(std::move(b));
    alpha.push_back(std::move(a));
  }
  return {std::move(table), std::move(alpha)};
}

std::vector<Block> family_blocks(const ModelFamily& f) {
  const double nu = f.nu;
  const double s = 1.0 + nu;
  switch (f.tag) {
    case FamilyTag::SVK:
      return {{-4.0 / 3.0,
               {{-4.0, 3.0 * (1.0 - nu) / (8.0 * s)}, {-2.0, 3.0 * nu / (2.0 * s)},
                {0.0, 3.0 / (4.0 * s)}}},
              {-2.0 / 3.0, {{-2.0, -0.75}, {0.0, -1.5}}}};
    case FamilyTag::John: {
      const double e = f.epsilon;
      return {{-1.0, {{-1.0, -e - 3.0 * (1.0 - 2.0 * nu) / s}}},
              {-2.0 / 3.0,
               {{-2.0, 3.0 * (1.0 - nu) / (2.0 * s)},
                {-1.0, 2.0 * e + 6.0 * (1.0 - nu) / s},
                {0.0, e + 6.0 * (1.0 - nu) / s}}},
              {-1.0 / 3.0,
               {{-1.0, -e - 3.0 * (2.0 - nu) / s}, {0.0, -2.0 * e - 6.0 * (2.0 - nu) / s}}}};
    }
    case FamilyTag::Signorini: {
      const double ts = f.tau * s;
      const double mid = (ts - 3.0 * (1.0 + 4.0 * nu)) / (4.0 * s);
      return {{-1.0, {{-1.0, (3.0 * (5.0 + 8.0 * nu) - ts) / (16.0 * s)}}},
              {-1.0 / 3.0, {{-1.0, mid}, {1.0, 0.5 * mid}}},
              {1.0 / 3.0,
               {{-1.0, 3.0 / (4.0 * s)},
                {1.0, (3.0 + ts) / (4.0 * s)},
                {3.0, (3.0 - ts) / (16.0 * s)}}}};
    }
    case FamilyTag::Hadamard:
      return {{-4.0 / 3.0, {{-2.0, 3.0 / (2.0 * s)}, {0.0, 3.0 / (4.0 * s)}}},
              {-1.0, {{-1.0, -3.0 * (1.0 - nu) / s}}},
              {-2.0 / 3.0, {{-2.0, -3.0 * nu / (2.0 * s)}, {0.0, -3.0 * nu / s}}}};
    case FamilyTag::Fluid11: {
      const double t1 = f.theta1, t2 = f.theta2;
      return {{t1, {{t1, 1.0 / (t1 * (t1 - t2))}}}, {t2, {{t2, -1.0 / (t2 * (t1 - t2))}}}};
    }
    case FamilyTag::PolytropicAffine: {
      const double th = f.theta, be = f.beta;
      const double k = 3.0 * (1.0 - nu) / s;
      return {{-1.0, {{-1.0, 1.0 / (1.0 + th)}}},
              {th,
               {{be - 1.0, k / (be * (be - 1.0))},
                {-1.0, k / be - 1.0 / (1.0 + th)},
                {0.0, 1.0 / th - k / (be - 1.0)}}}};
    }
  }
  throw ParameterError("unknown model family");
}

}  // namespace

std::string_view to_string(FamilyTag tag) {
  switch (tag) {
    case FamilyTag::SVK: return "svk";
    case FamilyTag::John: return "john";
    case FamilyTag::Signorini: return "signorini";
    case FamilyTag::Hadamard: return "hadamard";
    case FamilyTag::Fluid11: return "fluid11";
    case FamilyTag::PolytropicAffine: return "polyaffine";
  }
  return "unknown";
}

FamilyTag parse_family(std::string_view name) {
  for (auto tag : {FamilyTag::SVK, FamilyTag::John, FamilyTag::Signorini, FamilyTag::Hadamard,
                   FamilyTag::Fluid11, FamilyTag::PolytropicAffine})
    if (to_string(tag) == name) return tag;
  throw ParameterError("unknown model family '" + std::string(name) + "'");
}

void check_family(const ModelFamily& f) {
  if (!(f.kappa > 0.0)) throw ParameterError("bulk modulus must be positive");
  if (!(f.nu > -1.0 && f.nu <= 0.5)) throw ParameterError("Poisson ratio must lie in (-1, 1/2]");
  switch (f.tag) {
    case FamilyTag::Hadamard:
      if (!(f.nu > 0.0)) throw ParameterError("the Hadamard model requires nu > 0");
      break;
    case FamilyTag::Fluid11:
      if (f.nu != 0.5) throw ParameterError("fluid models require nu = 1/2");
      if (!(f.theta1 < f.theta2)) throw ParameterError("fluid exponents need theta1 < theta2");
      if (f.theta1 == 0.0 || f.theta2 == 0.0)
        throw ParameterError("fluid exponents must be nonzero");
      if (f.theta1 == -1.0 && f.theta2 == -1.0)
        throw ParameterError("one fluid exponent must differ from -1");
      break;
    case FamilyTag::PolytropicAffine:
      if (f.theta == 0.0 || f.theta == -1.0)
        throw ParameterError("polytropic-affine model requires theta not in {0, -1}");
      if (f.beta == 0.0 || f.beta == 1.0)
        throw ParameterError("polytropic-affine model requires beta not in {0, 1}");
      break;
    default:
      break;
  }
}

ExponentTable family_exponents(const ModelFamily& family) {
  return tabulate(family_blocks(family)).first;
}

MaterialModel make_model(const ModelFamily& family) {
  check_family(family);
  auto [table, alpha] = tabulate(family_blocks(family));
  return make_powerlaw_model(table, alpha, family.nu, family.kappa,
                             std::string(to_string(family.tag)));
}

double center_pressure(const ModelFamily& f, double dc) {
  const double nu = f.nu;
  const double s = std::cbrt(dc);
  double p = 0.0;
  switch (f.tag) {
    case FamilyTag::SVK:
      p = 3.0 * (s * s - 1.0) / (2.0 * s);
      break;
    case FamilyTag::John:
      p = 3.0 * (s - 1.0) * ((2.0 - nu) * s + 2.0 * nu - 1.0) / (1.0 + nu) +
          f.epsilon * (s - 1.0) * (s - 1.0);
      break;
    case FamilyTag::Signorini: {
      const double t = s * s;
      p = 3.0 * (t - 1.0) * (3.0 * t + 8.0 * nu + 5.0) / (16.0 * (nu + 1.0)) +
          f.tau * (t - 1.0) * (t - 1.0) / 16.0;
      break;
    }
    case FamilyTag::Hadamard:
      p = 3.0 * (s - 1.0) * (nu * s + 1.0) / ((nu + 1.0) * s);
      break;
    case FamilyTag::Fluid11:
      p = (std::pow(dc, 1.0 + f.theta2) - std::pow(dc, 1.0 + f.theta1)) / (f.theta2 - f.theta1);
      break;
    case FamilyTag::PolytropicAffine:
      p = (std::pow(dc, 1.0 + f.theta) - 1.0) / (1.0 + f.theta);
      break;
  }
  return f.kappa * p;
}

Thresholds thresholds(const ModelFamily& f) {
  check_family(f);
  const double nu = f.nu;
  Thresholds t;
  auto in_unit = [](double v) -> std::optional<double> {
    if (v > 0.0 && v < 1.0) return v;
    return std::nullopt;
  };
  switch (f.tag) {
    case FamilyTag::SVK:
      t.delta_flat = std::pow((3.0 - nu) / (1.0 + nu), 1.5);
      break;
    case FamilyTag::John: {
      const double es = f.epsilon * (1.0 + nu);
      const double root = (es + 3.0 * (1.0 - 2.0 * nu)) / (es + 3.0 * (2.0 - nu));
      if (auto r = in_unit(root)) t.delta_star = (*r) * (*r) * (*r);
      break;
    }
    case FamilyTag::Signorini: {
      const double ts = f.tau * (1.0 + nu);
      const double root = (ts - 3.0 * (8.0 * nu + 5.0)) / (9.0 + ts);
      if (auto r = in_unit(root)) t.delta_star = std::pow(*r, 1.5);
      if (f.tau != 0.0) t.delta_flat = delta_flat_generic(make_model(f));
      break;
    }
    case FamilyTag::Hadamard:
      t.delta_flat = std::pow(1.0 / nu, 1.5);
      t.delta_sharp = std::pow(1.0 / (2.0 * nu), 1.5);
      break;
    case FamilyTag::Fluid11:
      t.delta_flat = delta_flat_generic(make_model(f));
      break;
    case FamilyTag::PolytropicAffine:
      break;
  }
  return t;
}

double delta_flat_generic(const MaterialModel& model) {
  auto hyperbolic = [&](double d) { return a_hat(model, d, d) > 0.0; };
  constexpr int kGrid = 1200;
  const double log_cap = std::log(kDeltaFlatSearchCap);
  double lo = 0.0;  // log delta
  for (int k = 1; k <= kGrid; ++k) {
    double hi = log_cap * k / kGrid;
    if (hyperbolic(std::exp(hi))) {
      lo = hi;
      continue;
    }
    while (hi - lo > 1e-14 * std::max(1.0, hi)) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (hyperbolic(std::exp(mid)))
        lo = mid;
      else
        hi = mid;
    }
    return std::exp(0.5 * (lo + hi));
  }
  return kInf;
}

}  // namespace elastoball
