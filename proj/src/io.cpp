#include "elastoball/io.hpp"

#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>

namespace elastoball {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

json json_number(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double number_from_json(const json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    throw SpecError("expected a number, got \"" + s + "\"");
  }
  if (!j.is_number()) throw SpecError("expected a number");
  return j.get<double>();
}

namespace {

Eigen::VectorXd vector_from_json(const json& j, const char* what) {
  if (!j.is_array()) throw SpecError(std::string(what) + " must be an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw SpecError(std::string(what) + " entries must be numbers");
    v(static_cast<Eigen::Index>(i)) = j[i].get<double>();
  }
  return v;
}

std::vector<Eigen::VectorXd> rows_from_json(const json& j, const char* what) {
  if (!j.is_array()) throw SpecError(std::string(what) + " must be an array of arrays");
  std::vector<Eigen::VectorXd> rows;
  for (const auto& row : j) rows.push_back(vector_from_json(row, what));
  return rows;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json out = json::array();
  for (const double x : v) out.push_back(x);
  return out;
}

double get_number(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  try {
    return number_from_json(j.at(key));
  } catch (const SpecError& e) {
    throw SpecError(std::string(key) + ": " + e.what());
  }
}

}  // namespace

ModelFamily family_from_json(const json& j) {
  if (!j.is_object() || !j.contains("family") || !j["family"].is_string())
    throw SpecError("family spec needs a string \"family\"");
  ModelFamily f;
  try {
    f.tag = parse_family(j["family"].get<std::string>());
  } catch (const ParameterError& e) {
    throw SpecError(e.what());
  }
  f.nu = get_number(j, "nu", f.nu);
  f.kappa = get_number(j, "kappa", f.kappa);
  f.tau = get_number(j, "tau", f.tau);
  f.epsilon = get_number(j, "epsilon", f.epsilon);
  f.theta1 = get_number(j, "theta1", f.theta1);
  f.theta2 = get_number(j, "theta2", f.theta2);
  f.theta = get_number(j, "theta", f.theta);
  f.beta = get_number(j, "beta", f.beta);
  return f;
}

json family_to_json(const ModelFamily& f) {
  json j{{"family", std::string(to_string(f.tag))}, {"nu", f.nu}, {"kappa", f.kappa}};
  switch (f.tag) {
    case FamilyTag::John: j["epsilon"] = f.epsilon; break;
    case FamilyTag::Signorini: j["tau"] = f.tau; break;
    case FamilyTag::Fluid11:
      j["theta1"] = f.theta1;
      j["theta2"] = f.theta2;
      break;
    case FamilyTag::PolytropicAffine:
      j["theta"] = f.theta;
      j["beta"] = f.beta;
      break;
    default: break;
  }
  return j;
}

ModelSpec parse_model_spec(const json& j) {
  if (!j.is_object()) throw SpecError("model spec must be a JSON object");
  ModelSpec spec;
  if (j.contains("family")) {
    spec.family = family_from_json(j);
    spec.nu = spec.family->nu;
    spec.kappa = spec.family->kappa;
    spec.name = std::string(to_string(spec.family->tag));
    try {
      spec.table = family_exponents(*spec.family);
    } catch (const ParameterError& e) {
      throw SpecError(e.what());
    }
    return spec;
  }
  if (!j.contains("theta") || !j.contains("beta"))
    throw SpecError("model spec needs \"theta\" and \"beta\" (or \"family\")");
  spec.table.theta = vector_from_json(j["theta"], "theta");
  spec.table.beta = rows_from_json(j["beta"], "beta");
  try {
    spec.table.check_structure();
  } catch (const std::invalid_argument& e) {
    throw SpecError(e.what());
  }
  if (j.contains("shape")) {
    std::vector<int> shape;
    try {
      shape = j["shape"].get<std::vector<int>>();
    } catch (const json::exception&) {
      throw SpecError("shape must be an array of integers");
    }
    if (shape != spec.table.shape()) throw SpecError("shape disagrees with the beta rows");
  }
  if (j.contains("alpha")) {
    Coefficients alpha = rows_from_json(j["alpha"], "alpha");
    if (alpha.size() != spec.table.blocks()) throw SpecError("alpha and beta differ in row count");
    for (std::size_t b = 0; b < alpha.size(); ++b)
      if (alpha[b].size() != spec.table.beta[b].size())
        throw SpecError("alpha row " + std::to_string(b) + " has the wrong length");
    spec.alpha = std::move(alpha);
  }
  spec.nu = get_number(j, "nu", spec.nu);
  spec.kappa = get_number(j, "kappa", spec.kappa);
  if (j.contains("name")) {
    if (!j["name"].is_string()) throw SpecError("name must be a string");
    spec.name = j["name"].get<std::string>();
  }
  return spec;
}

MaterialModel build_model(const ModelSpec& spec) {
  if (spec.family) return make_model(*spec.family);
  if (spec.alpha) return make_powerlaw_model(spec.table, *spec.alpha, spec.nu, spec.kappa, spec.name);
  return make_powerlaw_model(spec.table, spec.nu, spec.kappa, spec.name);
}

json model_to_json(const MaterialModel& model) {
  const auto& t = model.exponents();
  json beta = json::array(), alpha = json::array();
  for (std::size_t b = 0; b < t.blocks(); ++b) {
    beta.push_back(vector_to_json(t.beta[b]));
    alpha.push_back(vector_to_json(model.coefficients().alpha[b]));
  }
  return json{{"name", model.name()},       {"shape", t.shape()},  {"theta", vector_to_json(t.theta)},
              {"beta", beta},               {"alpha", alpha},      {"nu", model.nu()},
              {"kappa", model.kappa()}};
}

json config_to_json(const SolverConfig& c) {
  return json{{"g", c.g},           {"r0_rel", c.r0_rel},       {"rel_tol", c.rel_tol},
              {"abs_tol", c.abs_tol}, {"r_max", c.r_max},       {"delta_max", c.delta_max},
              {"hyp_eps", c.hyp_eps}, {"max_steps", c.max_steps},   {"defect_tol", c.defect_tol}};
}

void config_from_json(const json& j, SolverConfig& c) {
  if (!j.is_object()) throw SpecError("solver config must be a JSON object");
  c.g = get_number(j, "g", c.g);
  c.r0_rel = get_number(j, "r0_rel", c.r0_rel);
  c.rel_tol = get_number(j, "rel_tol", c.rel_tol);
  c.abs_tol = get_number(j, "abs_tol", c.abs_tol);
  c.r_max = get_number(j, "r_max", c.r_max);
  c.delta_max = get_number(j, "delta_max", c.delta_max);
  c.hyp_eps = get_number(j, "hyp_eps", c.hyp_eps);
  c.defect_tol = get_number(j, "defect_tol", c.defect_tol);
  if (j.contains("max_steps")) c.max_steps = j["max_steps"].get<long>();
}

void write_profile_csv(std::ostream& os, const RadialProfile& p) {
  os << "r,delta,eta,rho,p_rad,p_tan,m\n";
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    os << format_double(p.r(i)) << ',' << format_double(p.delta(i)) << ','
       << format_double(p.eta(i)) << ',' << format_double(p.rho(i)) << ','
       << format_double(p.p_rad(i)) << ',' << format_double(p.p_tan(i)) << ','
       << format_double(p.m(i)) << '\n';
  }
}

json outcome_json(const BallOutcome& o, const MaterialModel& model) {
  json j{{"kind", std::string(to_string(o.kind))},
         {"r_stop", json_number(o.r_stop)},
         {"delta_c", json_number(o.delta_c)},
         {"p_center", json_number(o.p_center)},
         {"steps", o.steps},
         {"nu", model.nu()},
         {"model", model.name()}};
  j["R"] = o.finite() ? json_number(o.R) : json(nullptr);
  j["M"] = o.finite() ? json_number(o.M) : json(nullptr);
  return j;
}

json thresholds_json(const Thresholds& t, double delta_flat_numeric) {
  return json{{"delta_flat", json_number(t.delta_flat)},
              {"delta_star", t.delta_star ? json_number(*t.delta_star) : json(nullptr)},
              {"delta_sharp", t.delta_sharp ? json_number(*t.delta_sharp) : json(nullptr)},
              {"delta_flat_numeric", json_number(delta_flat_numeric)}};
}

json selfsimilar_json(const SelfSimilarSolution& s) {
  return json{{"alpha", s.alpha}, {"c", s.c}, {"C_theta", s.C_theta}, {"theta", s.theta}};
}

void write_sweep_csv(std::ostream& os, const SweepGrid& g) {
  os << "nu,delta_c,delta_c_rel,label\n";
  for (Eigen::Index i = 0; i < g.labels.rows(); ++i)
    for (Eigen::Index j = 0; j < g.labels.cols(); ++j) {
      const double rel = g.scale == DeltaScale::Absolute ? std::numeric_limits<double>::quiet_NaN()
                                                         : g.delta_c_values(j);
      os << format_double(g.nu_values(i)) << ',' << format_double(g.delta_c(i, j)) << ','
         << format_double(rel) << ',' << sweep_label(g.label(i, j)) << '\n';
    }
}

void write_boundary_csv(std::ostream& os, const BoundaryCurve& c) {
  os << "nu,delta_circle,bracket_width\n";
  for (Eigen::Index i = 0; i < c.nu.size(); ++i)
    os << format_double(c.nu(i)) << ',' << format_double(c.delta_circle(i)) << ','
       << format_double(c.bracket_width(i)) << '\n';
}

}  // namespace elastoball
