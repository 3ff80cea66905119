// Command-line frontend: model validation, single solves, thresholds,
// self-similar solutions and phase-diagram sweeps.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include "elastoball/io.hpp"

namespace fs = std::filesystem;
using namespace elastoball;

namespace {

constexpr const char* kVersion = "0.1.0";

/// Exit codes: 0 success (including physics outcomes), 1 invalid input or
/// InvalidCenter, 2 unreadable or malformed spec.
struct ExitError {
  int code;
  std::string message;
};

json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ExitError{2, "cannot open " + path};
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ExitError{2, path + ": " + e.what()};
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ExitError{1, "cannot write " + path.string()};
  out << text;
}

struct Globals {
  std::string model = "svk";
  double nu = 0.25, kappa = 1.0, tau = 0.0, epsilon = 0.0;
  double theta = -2.0, beta = 2.0, theta1 = -1.0, theta2 = 2.0 / 3.0;
  std::string spec_file;
  std::string out_dir = ".";
  int threads = 0;
  std::string config_file;
  SolverConfig solver;

  // Set by the config file; flags given explicitly win.
  json inputs = json::object();
};

/// Option handles so we can tell explicit flags from defaults.
struct Flags {
  CLI::Option *model, *nu, *kappa, *tau, *epsilon, *theta, *beta, *theta1, *theta2, *spec;
  CLI::Option *g, *r0_rel, *rtol, *atol, *r_max, *delta_max, *hyp_eps, *defect_tol;
};

template <typename T>
void take(CLI::Option* opt, const json& j, const char* key, T& target) {
  if (opt->count() == 0 && j.is_object() && j.contains(key)) {
    if constexpr (std::is_same_v<T, double>)
      target = number_from_json(j[key]);
    else
      target = j[key].get<T>();
  }
}

void apply_config(Globals& g, const Flags& f) {
  if (g.config_file.empty()) return;
  const json doc = read_json_file(g.config_file);
  g.inputs = doc.contains("inputs") ? doc["inputs"] : doc;
  const json& inputs = g.inputs;
  if (inputs.contains("model")) {
    const json& m = inputs["model"];
    if (m.contains("family")) {
      take(f.model, m, "family", g.model);
      take(f.nu, m, "nu", g.nu);
      take(f.kappa, m, "kappa", g.kappa);
      take(f.tau, m, "tau", g.tau);
      take(f.epsilon, m, "epsilon", g.epsilon);
      take(f.theta, m, "theta", g.theta);
      take(f.beta, m, "beta", g.beta);
      take(f.theta1, m, "theta1", g.theta1);
      take(f.theta2, m, "theta2", g.theta2);
    }
  }
  if (inputs.contains("solver")) {
    const json& s = inputs["solver"];
    take(f.g, s, "g", g.solver.g);
    take(f.r0_rel, s, "r0_rel", g.solver.r0_rel);
    take(f.rtol, s, "rel_tol", g.solver.rel_tol);
    take(f.atol, s, "abs_tol", g.solver.abs_tol);
    take(f.r_max, s, "r_max", g.solver.r_max);
    take(f.delta_max, s, "delta_max", g.solver.delta_max);
    take(f.hyp_eps, s, "hyp_eps", g.solver.hyp_eps);
    take(f.defect_tol, s, "defect_tol", g.solver.defect_tol);
    if (s.contains("max_steps")) g.solver.max_steps = s["max_steps"].get<long>();
  }
}

ModelFamily family_of(const Globals& g) {
  ModelFamily f;
  try {
    f.tag = parse_family(g.model);
  } catch (const ParameterError& e) {
    throw ExitError{1, e.what()};
  }
  f.nu = g.nu;
  f.kappa = g.kappa;
  f.tau = g.tau;
  f.epsilon = g.epsilon;
  f.theta = g.theta;
  f.beta = g.beta;
  f.theta1 = g.theta1;
  f.theta2 = g.theta2;
  return f;
}

/// Explicit spec from --spec or from a config whose model is a table; otherwise the family.
std::optional<ModelSpec> explicit_spec(const Globals& g, const Flags& f) {
  json j;
  if (!g.spec_file.empty())
    j = read_json_file(g.spec_file);
  else if (f.model->count() == 0 && g.inputs.contains("model") &&
           !g.inputs["model"].contains("family"))
    j = g.inputs["model"];
  else
    return std::nullopt;
  try {
    return parse_model_spec(j);
  } catch (const SpecError& e) {
    throw ExitError{2, std::string("model spec: ") + e.what()};
  }
}

MaterialModel resolve_model(const Globals& g, const Flags& f, json& model_input) {
  try {
    if (auto spec = explicit_spec(g, f)) {
      if (spec->family) {
        model_input = family_to_json(*spec->family);
        return make_model(*spec->family);
      }
      const MaterialModel m = build_model(*spec);
      model_input = model_to_json(m);
      return m;
    }
    const ModelFamily fam = family_of(g);
    model_input = family_to_json(fam);
    return make_model(fam);
  } catch (const ExitError&) {
    throw;
  } catch (const std::exception& e) {
    throw ExitError{1, e.what()};
  }
}

int thread_count(const Globals& g) {
  if (g.threads > 0) return g.threads;
  if (const char* env = std::getenv("ELASTOBALL_THREADS")) {
    const int n = std::atoi(env);
    if (n > 0) return n;
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

json manifest(const std::string& command, json inputs, const json& outputs, double seconds) {
  return json{{"command", command},
              {"tool_version", kVersion},
              {"inputs", std::move(inputs)},
              {"outputs", outputs},
              {"wall_seconds", seconds}};
}

std::string shape_string(const std::vector<int>& shape) {
  std::string s = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) s += (i ? "," : "") + std::to_string(shape[i]);
  return s + ")";
}

// validate ------------------------------------------------------------------

int cmd_validate(const Globals& g, const Flags& f, const std::string& emit) {
  std::optional<ModelSpec> spec = explicit_spec(g, f);
  if (!spec) {
    ModelSpec s;
    s.family = family_of(g);
    try {
      s.table = family_exponents(*s.family);
    } catch (const std::exception& e) {
      throw ExitError{1, e.what()};
    }
    s.nu = s.family->nu;
    s.name = std::string(to_string(s.family->tag));
    spec = s;
  }
  const ExponentTable& table = spec->table;
  const auto shape = table.shape();
  const ExponentReport report = validate_exponents(table);
  const bool lame = is_lame_type(shape);

  std::cout << "type " << shape_string(shape) << (lame ? ", Lame type" : ", not a Lame type")
            << (report.fluid ? ", fluid" : "") << "\n";
  for (const auto& v : report.violations) std::cout << "violation: " << v.message << "\n";
  if (!report.ok()) {
    std::cout << "invalid\n";
    return 1;
  }

  if (!report.fluid) {
    std::cout << "solvability by nu:\n";
    for (const auto& p : probe_admissibility(table))
      std::cout << "  nu=" << format_double(p.nu) << (p.consistent ? " solvable" : " inconsistent")
                << " rank=" << p.rank << " nullity=" << p.nullity << "\n";
  }

  MaterialModel model;
  try {
    model = build_model(*spec);
  } catch (const CoefficientError& e) {
    if (e.reason() == CoefficientError::Reason::Inadmissible)
      std::cout << "inadmissible: " << e.what() << "\n";
    else
      std::cout << "invalid: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cout << "invalid: " << e.what() << "\n";
    return 1;
  }

  const auto& coeffs = model.coefficients();
  std::cout << "coefficients at nu=" << format_double(model.nu()) << ":\n";
  for (std::size_t b = 0; b < table.blocks(); ++b) {
    std::cout << "  theta=" << format_double(table.theta(static_cast<Eigen::Index>(b))) << ":";
    for (Eigen::Index i = 0; i < table.beta[b].size(); ++i)
      std::cout << " [beta=" << format_double(table.beta[b](i))
                << " alpha=" << format_double(coeffs.alpha[b](i)) << "]";
    std::cout << "\n";
  }
  std::cout << "w0=" << format_double(coeffs.w0) << " nullity=" << coeffs.nullity << "\n";
  const auto compat = check_linear_compat(model);
  double worst = 0.0;
  for (double r : compat) worst = std::max(worst, std::abs(r));
  std::cout << "linear compatibility residual " << format_double(worst) << "\n";
  std::cout << "valid, " << (lame ? "Lame type " : "type ") << shape_string(shape) << "\n";

  if (!emit.empty()) write_text(emit, model_to_json(model).dump(2) + "\n");
  return 0;
}

// solve ---------------------------------------------------------------------

struct SolveArgs {
  double delta_c = 0.0;
  std::string out = "ball";
  int samples = 0;
  double ref_density = 0.0;
  double grav_const = 0.0;
};

int cmd_solve(const Globals& g, const Flags& f, const SolveArgs& a) {
  const auto t0 = std::chrono::steady_clock::now();
  json model_input;
  const MaterialModel model = resolve_model(g, f, model_input);
  try {
    g.solver.validate();
  } catch (const std::invalid_argument& e) {
    throw ExitError{1, e.what()};
  }
  if (!(a.delta_c > 0.0)) throw ExitError{1, "--delta-c must be positive"};

  const BallOutcome outcome = integrate_ball(model, a.delta_c, g.solver);
  RadialProfile profile = outcome.profile;
  if (a.samples >= 2 && outcome.profile.size() >= 2)
    profile = resample_profile(outcome.profile, a.samples);

  fs::create_directories(g.out_dir);
  const fs::path dir(g.out_dir);
  const fs::path csv = dir / (a.out + "_profile.csv");
  const fs::path out_json = dir / (a.out + "_outcome.json");
  const fs::path man = dir / (a.out + "_manifest.json");

  std::ostringstream os;
  write_profile_csv(os, profile);
  write_text(csv, os.str());
  write_text(out_json, outcome_json(outcome, model).dump(2) + "\n");
  json outputs = json::array({csv.string(), out_json.string()});

  if (a.ref_density > 0.0 && a.grav_const > 0.0) {
    // Length unit of the nondimensional system for the given K and G.
    const double ell = std::sqrt(3.0 * g.solver.g * model.kappa() /
                                 (4.0 * std::numbers::pi * a.grav_const * a.ref_density *
                                  a.ref_density));
    RadialProfile phys = profile;
    phys.r *= ell;
    phys.rho *= a.ref_density;
    phys.m *= a.ref_density * ell * ell * ell;
    const fs::path pcsv = dir / (a.out + "_profile_physical.csv");
    std::ostringstream ps;
    write_profile_csv(ps, phys);
    write_text(pcsv, ps.str());
    outputs.push_back(pcsv.string());
  }

  json inputs{{"model", model_input},
              {"solver", config_to_json(g.solver)},
              {"delta_c", a.delta_c},
              {"samples", a.samples}};
  if (a.ref_density > 0.0) inputs["ref_density"] = a.ref_density;
  if (a.grav_const > 0.0) inputs["grav_const"] = a.grav_const;
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_text(man, manifest("solve", inputs, outputs, secs).dump(2) + "\n");

  std::cout << to_string(outcome.kind);
  if (outcome.finite())
    std::cout << " R=" << format_double(outcome.R) << " M=" << format_double(outcome.M);
  else if (outcome.kind == OutcomeKind::InvalidCenter)
    std::cout << " p_center=" << format_double(outcome.p_center);
  else
    std::cout << " r_stop=" << format_double(outcome.r_stop);
  std::cout << "\n";
  return outcome.kind == OutcomeKind::InvalidCenter ? 1 : 0;
}

// thresholds ----------------------------------------------------------------

int cmd_thresholds(const Globals& g) {
  const ModelFamily fam = family_of(g);
  try {
    const Thresholds t = thresholds(fam);
    const double numeric = delta_flat_generic(make_model(fam));
    std::cout << thresholds_json(t, numeric).dump(2) << "\n";
  } catch (const std::exception& e) {
    throw ExitError{1, e.what()};
  }
  return 0;
}

// selfsimilar ---------------------------------------------------------------

int cmd_selfsimilar(const Globals& g, const Flags& f) {
  json model_input;
  const MaterialModel model = resolve_model(g, f, model_input);
  try {
    const auto sol = selfsimilar_solution(model, g.solver.g);
    std::cout << selfsimilar_json(sol).dump(2) << "\n";
  } catch (const SelfSimilarError& e) {
    static const char* names[] = {"NotAffine", "ThetaExcluded", "NotPositive"};
    throw ExitError{1, std::string(names[static_cast<int>(e.reason())]) + ": " + e.what()};
  }
  return 0;
}

// sweep ---------------------------------------------------------------------

struct SweepArgs {
  double nu_min = -0.95, nu_max = 0.45;
  int nu_points = 50;
  double dc_min = 0.02, dc_max = 0.98;
  int dc_points = 50;
  std::string scale = "star";
  bool boundary = false;
  std::string out = "sweep";
};

int cmd_sweep(const Globals& g, const SweepArgs& a) {
  const auto t0 = std::chrono::steady_clock::now();
  const ModelFamily fam = family_of(g);
  const int threads = thread_count(g);
  DeltaScale scale;
  try {
    scale = parse_delta_scale(a.scale);
    g.solver.validate();
  } catch (const std::invalid_argument& e) {
    throw ExitError{1, e.what()};
  }

  auto progress = [](const char* what) {
    return [what](std::size_t done, std::size_t total) {
      if (done == total || done % 50 == 0)
        std::cerr << "\r" << what << " " << done << "/" << total << (done == total ? "\n" : "")
                  << std::flush;
    };
  };

  SweepGrid grid;
  try {
    grid = sweep_grid(fam, {a.nu_min, a.nu_max}, {a.dc_min, a.dc_max}, a.nu_points, a.dc_points,
                      scale, g.solver, threads, progress("sweep"));
  } catch (const std::invalid_argument& e) {
    throw ExitError{1, e.what()};
  }

  fs::create_directories(g.out_dir);
  const fs::path dir(g.out_dir);
  const fs::path csv = dir / (a.out + ".csv");
  std::ostringstream os;
  write_sweep_csv(os, grid);
  write_text(csv, os.str());
  json outputs = json::array({csv.string()});

  if (a.boundary) {
    const BoundaryCurve curve =
        boundary_curve(fam, grid.nu_values, g.solver, threads, {}, progress("boundary"));
    const fs::path bcsv = dir / (a.out + "_boundary.csv");
    std::ostringstream bs;
    write_boundary_csv(bs, curve);
    write_text(bcsv, bs.str());
    outputs.push_back(bcsv.string());
  }

  json inputs{{"model", family_to_json(fam)},
              {"solver", config_to_json(g.solver)},
              {"nu_min", a.nu_min},
              {"nu_max", a.nu_max},
              {"nu_points", a.nu_points},
              {"dc_min", a.dc_min},
              {"dc_max", a.dc_max},
              {"dc_points", a.dc_points},
              {"scale", a.scale},
              {"boundary", a.boundary}};
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const fs::path side = dir / (a.out + ".json");
  write_text(side, manifest("sweep", inputs, outputs, secs).dump(2) + "\n");
  return 0;
}

template <typename T>
void take_input(CLI::App* sub, const char* flag, const json& inputs, const char* key, T& target) {
  if (sub->get_option(flag)->count() == 0 && inputs.contains(key)) target = inputs[key].get<T>();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Static self-gravitating elastic balls with power-law materials"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  Globals g;
  Flags f{};
  f.model = app.add_option("--model", g.model,
                           "Material family: svk, john, signorini, hadamard, fluid11, polyaffine");
  f.nu = app.add_option("--nu", g.nu, "Poisson ratio");
  f.kappa = app.add_option("--kappa", g.kappa, "Bulk modulus");
  f.tau = app.add_option("--tau", g.tau, "Signorini parameter");
  f.epsilon = app.add_option("--epsilon", g.epsilon, "John parameter");
  f.theta = app.add_option("--theta", g.theta, "Polytropic-affine theta");
  f.beta = app.add_option("--beta", g.beta, "Polytropic-affine beta");
  f.theta1 = app.add_option("--theta1", g.theta1, "Fluid exponent theta1");
  f.theta2 = app.add_option("--theta2", g.theta2, "Fluid exponent theta2");
  f.spec = app.add_option("--spec", g.spec_file, "Model spec JSON (overrides --model)");
  app.add_option("--out-dir", g.out_dir, "Directory for output files");
  app.add_option("--threads", g.threads, "Worker threads (default: ELASTOBALL_THREADS or all cores)");
  app.add_option("--config", g.config_file, "JSON config or run manifest to take inputs from");

  f.g = app.add_option("--g", g.solver.g, "Nondimensional gravity coupling");
  f.r0_rel = app.add_option("--r0-rel", g.solver.r0_rel, "Series start / gravitational length");
  f.rtol = app.add_option("--rtol", g.solver.rel_tol, "Relative tolerance");
  f.atol = app.add_option("--atol", g.solver.abs_tol, "Absolute tolerance");
  f.r_max = app.add_option("--r-max", g.solver.r_max, "Give-up radius");
  f.delta_max = app.add_option("--delta-max", g.solver.delta_max, "Density blow-up cap");
  f.hyp_eps = app.add_option("--hyp-eps", g.solver.hyp_eps, "Hyperbolicity floor for a_hat/kappa");
  f.defect_tol = app.add_option("--defect-tol", g.solver.defect_tol,
                                "Relative bound on the dense-output defect (0 disables)");

  auto* validate = app.add_subcommand("validate", "Check a model spec and report its coefficients");
  std::string emit;
  validate->add_option("spec", g.spec_file, "Model spec JSON file");
  validate->add_option("--emit", emit, "Write the resolved model spec here");

  auto* solve = app.add_subcommand("solve", "Integrate one ball from its center density");
  SolveArgs sa;
  solve->add_option("--delta-c", sa.delta_c, "Center density (normalized)");
  solve->add_option("--out", sa.out, "Output file prefix");
  solve->add_option("--samples", sa.samples, "Resample the profile to N uniform radii");
  solve->add_option("--ref-density", sa.ref_density, "Reference density for physical output");
  solve->add_option("--grav-const", sa.grav_const, "Gravitational constant for physical output");

  auto* thr = app.add_subcommand("thresholds", "Report the model's center-density thresholds");
  auto* ss = app.add_subcommand("selfsimilar", "Self-similar solution of an affine model");

  auto* sweep = app.add_subcommand("sweep", "Classify outcomes over a (nu, delta_c) grid");
  SweepArgs wa;
  sweep->add_option("--nu-min", wa.nu_min);
  sweep->add_option("--nu-max", wa.nu_max);
  sweep->add_option("--nu-points", wa.nu_points);
  sweep->add_option("--dc-min", wa.dc_min, "Lower delta_c, in units of --scale");
  sweep->add_option("--dc-max", wa.dc_max);
  sweep->add_option("--dc-points", wa.dc_points);
  sweep->add_option("--scale", wa.scale, "delta_c units: absolute, star, flat");
  sweep->add_flag("--boundary", wa.boundary, "Also bisect the existence boundary per nu");
  sweep->add_option("--out", wa.out, "Output file prefix");

  for (auto* sub : {validate, solve, thr, ss, sweep}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    apply_config(g, f);
    const json& in = g.inputs;
    if (*solve) {
      take_input(solve, "--delta-c", in, "delta_c", sa.delta_c);
      take_input(solve, "--samples", in, "samples", sa.samples);
      take_input(solve, "--ref-density", in, "ref_density", sa.ref_density);
      take_input(solve, "--grav-const", in, "grav_const", sa.grav_const);
      return cmd_solve(g, f, sa);
    }
    if (*sweep) {
      take_input(sweep, "--nu-min", in, "nu_min", wa.nu_min);
      take_input(sweep, "--nu-max", in, "nu_max", wa.nu_max);
      take_input(sweep, "--nu-points", in, "nu_points", wa.nu_points);
      take_input(sweep, "--dc-min", in, "dc_min", wa.dc_min);
      take_input(sweep, "--dc-max", in, "dc_max", wa.dc_max);
      take_input(sweep, "--dc-points", in, "dc_points", wa.dc_points);
      take_input(sweep, "--scale", in, "scale", wa.scale);
      take_input(sweep, "--boundary", in, "boundary", wa.boundary);
      return cmd_sweep(g, wa);
    }
    if (*validate) return cmd_validate(g, f, emit);
    if (*thr) return cmd_thresholds(g);
    if (*ss) return cmd_selfsimilar(g, f);
  } catch (const ExitError& e) {
    std::cerr << "error: " << e.message << "\n";
    return e.code;
  } catch (const json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
