// Acceptance driver: one PASS/FAIL line per criterion.
//   acceptance               run all seven
//   acceptance --criterion N run one
// Exit status is nonzero if any selected criterion fails.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "elastoball/ball_solver.hpp"
#include "elastoball/materials.hpp"
#include "elastoball/powerlaw.hpp"
#include "elastoball/selfsimilar.hpp"
#include "elastoball/sweep.hpp"
#include "oracles.hpp"

using namespace elastoball;
using oracle::family;

namespace {

/// Collects failed checks; the criterion passes when none failed.
struct Report {
  std::vector<std::string> failures;
  std::ostringstream notes;

  void check(bool ok, const std::string& what) {
    if (!ok) failures.push_back(what);
  }
  template <typename... T>
  std::string fmt(const char* f, T... v) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, v...);
    return buf;
  }
};

double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

ExponentTable table(std::vector<double> theta, std::vector<std::vector<double>> beta) {
  ExponentTable t;
  t.theta = Eigen::Map<Eigen::VectorXd>(theta.data(), static_cast<Eigen::Index>(theta.size()));
  for (auto& row : beta)
    t.beta.push_back(Eigen::Map<Eigen::VectorXd>(row.data(), static_cast<Eigen::Index>(row.size())));
  return t;
}

std::vector<double> sorted_draws(std::mt19937_64& rng, int n, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v;
  while (static_cast<int>(v.size()) < n) {
    const double x = u(rng);
    if (std::none_of(v.begin(), v.end(), [x](double y) { return std::abs(x - y) < 0.05; }))
      v.push_back(x);
  }
  std::sort(v.begin(), v.end());
  return v;
}

// ---------------------------------------------------------------------------

void thresholds_vs_captions(Report& rep) {
  auto near = [&](const char* name, double got, double want, double tol) {
    rep.check(std::abs(got - want) <= tol, rep.fmt("%s = %.6g, want %.6g +- %.1g", name, got, want, tol));
    rep.notes << name << "=" << got << " ";
  };
  near("flat(svk)", thresholds(family(FamilyTag::SVK, 0.25)).delta_flat, 3.263, 0.01);
  const auto had = thresholds(family(FamilyTag::Hadamard, 0.25));
  near("sharp(hadamard)", had.delta_sharp.value_or(NAN), 2.828, 0.01);
  near("flat(hadamard)", had.delta_flat, 8.0, 1e-6);
  near("star(john)", thresholds(family(FamilyTag::John, 0.1)).delta_star.value_or(NAN), 0.0746, 5e-4);
  near("star(signorini)", thresholds(family(FamilyTag::Signorini, -0.7)).delta_star.value_or(NAN),
       0.0894, 5e-4);
}

void outcomes(Report& rep) {
  const SolverConfig cfg;
  auto expect = [&](FamilyTag tag, double nu, double dc, bool finite) {
    const auto kind = integrate_ball(make_model(family(tag, nu)), dc, cfg).kind;
    const bool ok = finite ? kind == OutcomeKind::FiniteBall : is_no_ball(kind);
    rep.check(ok, rep.fmt("%s nu=%g dc=%.6g gave %s", std::string(to_string(tag)).c_str(), nu, dc,
                          std::string(to_string(kind)).c_str()));
  };
  const double svk_flat = thresholds(family(FamilyTag::SVK, 0.25)).delta_flat;
  expect(FamilyTag::SVK, 0.25, 0.99 * svk_flat, true);
  expect(FamilyTag::SVK, 0.25, 1.01 * svk_flat, false);

  const auto had = thresholds(family(FamilyTag::Hadamard, 0.25));
  expect(FamilyTag::Hadamard, 0.25, 0.99 * *had.delta_sharp, true);
  expect(FamilyTag::Hadamard, 0.25, 1.01 * *had.delta_sharp, true);
  expect(FamilyTag::Hadamard, 0.25, 0.99 * had.delta_flat, true);
  expect(FamilyTag::Hadamard, 0.25, 1.01 * had.delta_flat, false);

  const double john_star = *thresholds(family(FamilyTag::John, 0.1)).delta_star;
  expect(FamilyTag::John, 0.1, 0.99 * john_star, true);
  expect(FamilyTag::John, 0.1, 0.90 * john_star, false);

  for (double nu : {-0.5, 0.25}) {
    expect(FamilyTag::John, nu, 2.0, true);
    expect(FamilyTag::Signorini, nu, 2.0, true);
  }

  const double sig_star = *thresholds(family(FamilyTag::Signorini, -0.7)).delta_star;
  expect(FamilyTag::Signorini, -0.7, 0.70 * sig_star, true);
  expect(FamilyTag::Signorini, -0.7, 0.65 * sig_star, false);
}

void circle_brackets(Report& rep) {
  const SolverConfig cfg;
  auto run = [&](FamilyTag tag, double nu, double lo, double hi) {
    const auto name = std::string(to_string(tag));
    try {
      const auto d = find_delta_circle(family(tag, nu), nu, cfg);
      const double x = d.delta_circle / d.delta_star;
      rep.notes << name << "=" << x << "*star (width " << d.bracket_width / d.delta_star << ") ";
      rep.check(x > lo && x < hi, rep.fmt("%s: circle/star = %.6f outside (%g, %g)", name.c_str(), x, lo, hi));
      rep.check(d.bracket_width <= 1e-4 * d.delta_star,
                rep.fmt("%s: bracket width %.3g > 1e-4 star", name.c_str(), d.bracket_width / d.delta_star));
    } catch (const std::exception& e) {
      rep.check(false, name + ": " + e.what());
    }
  };
  run(FamilyTag::John, 0.1, 0.90, 0.99);
  run(FamilyTag::Signorini, -0.7, 0.65, 0.70);
}

void selfsimilar_oracle(Report& rep) {
  const Eigen::ArrayXd grid = Eigen::ArrayXd::LinSpaced(400, 0.1, 10.0);
  auto residual = [&](const std::string& name, const MaterialModel& m) {
    try {
      const double r = affine_residual(m, selfsimilar_solution(m), grid);
      rep.check(r < 1e-10, rep.fmt("%s: residual %.3g", name.c_str(), r));
    } catch (const std::exception& e) {
      rep.check(false, name + ": " + e.what());
    }
  };
  for (double nu : {-0.5, 0.1, 0.3}) residual(rep.fmt("john nu=%g", nu), make_model(family(FamilyTag::John, nu)));
  for (double th : {-2.0, 2.0}) {
    auto f = family(FamilyTag::PolytropicAffine, 0.25);
    f.theta = th;
    residual(rep.fmt("polytropic-affine theta=%g", th), make_model(f));
  }

  // Sign of C(theta) against the stated domain (-inf, 1/3) u (1, 5/2).
  int mismatches = 0, samples = 0;
  for (double nu : {-0.5, 0.0, 0.25, 0.45}) {
    for (double th : {-3.0, -2.0, -1.5, -0.5, -0.2, 0.2, 0.3, 1.1, 1.5, 2.0, 2.4, 2.6, 3.0, 4.0}) {
      auto f = family(FamilyTag::PolytropicAffine, nu);
      f.theta = th;
      const bool want = th < 1.0 / 3 || (th > 1.0 && th < 2.5);
      const bool got = affine_constant(make_model(f), th) > 0;
      ++samples;
      if (got != want) ++mismatches;
    }
  }
  rep.notes << "C(theta) sign mismatches " << mismatches << "/" << samples << " ";
  rep.check(mismatches == 0, rep.fmt("C(theta) positivity differs from (-inf,1/3)u(1,5/2) at %d/%d samples",
                                     mismatches, samples));

  // Integrator against exact data over one decade.
  for (double nu : {0.1, 0.3}) {
    const auto m = make_model(family(FamilyTag::John, nu));
    const auto sol = selfsimilar_solution(m);
    const auto run = integrate_from(m, 0.1, State2(sol.delta(0.1), sol.eta(0.1)), 1.0, SolverConfig{});
    double worst = 0;
    for (double r : oracle::log_grid(0.1, 1.0, 101)) {
      const State2 y = run.trajectory->state(r);
      worst = std::max({worst, rel(y(0), sol.delta(r)), rel(y(1), sol.eta(r))});
    }
    rep.check(worst < 1e-6, rep.fmt("john nu=%g tracking error %.3g", nu, worst));
  }
}

void algebra(Report& rep) {
  int bad = 0;
  for (double nu : {-0.5, -0.25, 0.05, 0.25, 0.45}) {
    for (const auto& f : oracle::builtins_at(nu)) {
      const auto m = make_model(f);
      for (double r : check_linear_compat(m)) bad += !(r < 1e-10);
      for (double d : oracle::log_grid(1e-2, 1e2, 41))
        bad += !(std::abs(p_rad(m, d, d) - p_tan(m, d, d)) < 1e-10 * m.kappa());
    }
  }
  rep.check(bad == 0, rep.fmt("%d linear-compatibility or isotropy violations", bad));

  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> unu(-0.9, 0.5);
  double worst = 0;
  for (int checked = 0; checked < 100;) {
    const auto th = sorted_draws(rng, 3, -2, 2);
    std::vector<Eigen::Vector2d> be;
    std::vector<std::vector<double>> rows;
    for (int j = 0; j < 3; ++j) {
      const auto b = sorted_draws(rng, 2, -3, 3);
      be.emplace_back(b[0], b[1]);
      rows.push_back(b);
    }
    const Eigen::Vector3d tv(th[0], th[1], th[2]);
    if (std::abs(oracle::a_222(tv, be)) <= 1e-3) continue;
    const double nu = unu(rng);
    const auto want = oracle::closed_form_222(tv, be, nu);
    const auto sol = solve_coefficients(table(th, rows), nu);
    double scale = 0;
    for (double w : want) scale = std::max(scale, std::abs(w));
    for (int k = 0; k < 6; ++k) worst = std::max(worst, std::abs(sol.alpha[k / 2](k % 2) - want[k]) / scale);
    ++checked;
  }
  rep.notes << "(2,2,2) worst " << worst << " ";
  rep.check(worst <= 1e-9, rep.fmt("(2,2,2) closed forms differ by %.3g", worst));

  int admitted = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const auto th = sorted_draws(rng, 2, -2, 2);
    const auto b = sorted_draws(rng, 2, -3, 3);
    const auto c = sorted_draws(rng, 2, -3, 3);
    for (const auto& t : {table({th[0], th[1]}, {{th[0]}, {b[0], b[1]}}),
                          table({th[0], th[1]}, {{b[0], b[1]}, {th[1]}}),
                          table({th[0], th[1]}, {{b[0], b[1]}, {c[0], c[1]}})}) {
      try {
        solve_coefficients(t, 0.2);
        ++admitted;
      } catch (const CoefficientError& e) {
        admitted += e.reason() != CoefficientError::Reason::Inadmissible;
      }
    }
  }
  rep.check(admitted == 0, rep.fmt("%d tables of type (1,2), (2,1), (2,2) not reported inadmissible", admitted));

  // Every shape with up to four blocks of up to four terms.
  const std::set<std::multiset<int>> lame{{1, 3}, {2, 3}, {1, 1, 2}, {1, 2, 2}, {2, 2, 2}};
  int wrong = 0;
  std::vector<int> shape;
  std::function<void()> walk = [&] {
    if (!shape.empty())
      wrong += is_lame_type(shape) != lame.count(std::multiset<int>(shape.begin(), shape.end()));
    if (shape.size() == 4) return;
    for (int n = 1; n <= 4; ++n) {
      shape.push_back(n);
      walk();
      shape.pop_back();
    }
  };
  walk();
  rep.check(wrong == 0, rep.fmt("is_lame_type wrong on %d shapes", wrong));
}

/// Relative mismatch of the radial momentum balance from a central difference
/// of p_rad along the dense solution, normalized by the largest term.
double euler_residual(const MaterialModel& m, const Trajectory& t, double g, double r) {
  const double h = 1e-5 * r;
  auto pr = [&](double s) {
    const State2 y = t.state(s);
    return p_rad(m, y(0), y(1));
  };
  const double lhs = (pr(r + h) - pr(r - h)) / (2 * h);
  const State2 y = t.state(r);
  const auto c = evaluate(m, y(0), y(1));
  const double tan_term = 2 * (c.p_tan - c.p_rad) / r;
  const double grav = g * m.kappa() * y(0) * y(1) * r;
  const double scale = std::max({std::abs(lhs), std::abs(tan_term), std::abs(grav)});
  return std::abs(lhs - tan_term + grav) / scale;
}

void solver_integrity(Report& rep) {
  const SolverConfig cfg;
  struct Case {
    FamilyTag tag;
    double nu, dc;
  };
  double worst_quad = 0, worst_euler = 0;
  int eta_violations = 0;
  for (const auto& c : {Case{FamilyTag::SVK, 0.25, 1.5}, Case{FamilyTag::SVK, -0.5, 3.0},
                        Case{FamilyTag::Hadamard, 0.25, 2.9}, Case{FamilyTag::Hadamard, 0.25, 7.9},
                        Case{FamilyTag::John, 0.25, 2.0}, Case{FamilyTag::John, -0.5, 2.0},
                        Case{FamilyTag::John, 0.1, 0.07}, Case{FamilyTag::Signorini, -0.5, 2.0},
                        Case{FamilyTag::Signorini, 0.25, 2.0}, Case{FamilyTag::Signorini, -0.7, 0.063}}) {
    const auto m = make_model(family(c.tag, c.nu));
    const auto o = integrate_ball(m, c.dc, cfg);
    if (!o.finite()) {
      rep.check(false, rep.fmt("%s nu=%g dc=%g not finite", std::string(to_string(c.tag)).c_str(), c.nu, c.dc));
      continue;
    }
    const auto& t = *o.profile.trajectory;
    for (int k = 1; k <= 400; ++k) {
      const State2 y = t.state(o.R * k / 400.0);
      eta_violations += !(y(1) > y(0));
    }
    for (double frac : {0.1, 0.5, 0.9, 1.0}) {
      const double r = frac * o.R;
      const double integral = oracle::simpson([&](double s) { return t.state(s)(0) * s * s; }, 0.0, r, 2000);
      worst_quad = std::max(worst_quad, rel(3 * integral / (r * r * r), t.state(r)(1)));
    }
    for (int k = 1; k < 50; ++k) worst_euler = std::max(worst_euler, euler_residual(m, t, cfg.g, o.R * k / 50.0));
  }
  rep.notes << "quadrature " << worst_quad << ", residual " << worst_euler << " ";
  rep.check(eta_violations == 0, rep.fmt("eta <= delta at %d dense points", eta_violations));
  rep.check(worst_quad < 1e-7, rep.fmt("eta quadrature mismatch %.3g", worst_quad));
  rep.check(worst_euler < 1e-6, rep.fmt("momentum balance residual %.3g", worst_euler));

  SolverConfig half = cfg;
  half.rel_tol /= 2;
  half.abs_tol /= 2;
  half.r0_rel /= 2;
  const auto svk = make_model(family(FamilyTag::SVK, 0.25));
  const auto a = integrate_ball(svk, 1.5, cfg);
  const auto b = integrate_ball(svk, 1.5, half);
  rep.notes << "R drift " << rel(a.R, b.R) << ", M drift " << rel(a.M, b.M) << " ";
  rep.check(rel(a.R, b.R) < 1e-6 && rel(a.M, b.M) < 1e-6,
            rep.fmt("tolerance halving moved R by %.3g and M by %.3g", rel(a.R, b.R), rel(a.M, b.M)));
}

void phase_diagrams(Report& rep) {
  const SolverConfig cfg;
  auto inspect = [&](FamilyTag tag, Range nus) {
    const auto name = std::string(to_string(tag));
    const auto g = sweep_grid(family(tag, nus.lo), nus, {0.02, 0.98}, 50, 50, DeltaScale::RelativeStar, cfg, 4);
    int finite = 0, no_ball = 0, other = 0, bad_rows = 0, flat_rows = 0;
    for (Eigen::Index i = 0; i < g.labels.rows(); ++i) {
      int changes = 0;
      bool rising = true;
      for (Eigen::Index j = 0; j < g.labels.cols(); ++j) {
        const auto k = g.label(i, j);
        if (k == OutcomeKind::FiniteBall) ++finite;
        else if (is_no_ball(k)) ++no_ball;
        else ++other;
        if (j > 0 && is_no_ball(k) != is_no_ball(g.label(i, j - 1))) {
          ++changes;
          rising = rising && is_no_ball(g.label(i, j - 1));
        }
      }
      // A column whose boundary lies above the top of the grid has no change.
      bad_rows += !(changes <= 1 && rising);
      flat_rows += changes == 0;
    }
    rep.notes << name << ": " << finite << " finite, " << no_ball << " no-ball, " << flat_rows
              << " columns without a change ";
    rep.check(finite > 0 && no_ball > 0, rep.fmt("%s: only one region present", name.c_str()));
    rep.check(other == 0, rep.fmt("%s: %d cells neither FiniteBall nor NoBall", name.c_str(), other));
    rep.check(bad_rows == 0,
              rep.fmt("%s: labels alternate in %d nu columns", name.c_str(), bad_rows));
  };
  inspect(FamilyTag::John, {-0.95, 0.45});
  inspect(FamilyTag::Signorini, {-0.95, -0.65});
}

struct Criterion {
  const char* name;
  void (*run)(Report&);
  double budget_s;
};

const Criterion kCriteria[] = {
    {"thresholds", thresholds_vs_captions, 1.0},
    {"outcomes", outcomes, 10.0},
    {"circle brackets", circle_brackets, 30.0},
    {"self-similar oracle", selfsimilar_oracle, 5.0},
    {"algebra", algebra, 5.0},
    {"solver integrity", solver_integrity, 10.0},
    {"phase diagrams", phase_diagrams, 300.0},
};

bool run_one(int n) {
  const auto& c = kCriteria[n - 1];
  Report rep;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    c.run(rep);
  } catch (const std::exception& e) {
    rep.check(false, std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  rep.check(secs < c.budget_s, rep.fmt("took %.2f s, budget %.0f s", secs, c.budget_s));
  const bool ok = rep.failures.empty();
  std::printf("%s criterion %d (%s) [%.2fs] %s\n", ok ? "PASS" : "FAIL", n, c.name, secs, rep.notes.str().c_str());
  for (const auto& f : rep.failures) std::printf("    %s\n", f.c_str());
  std::fflush(stdout);
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  int which = 0;
  app.add_option("--criterion", which, "Run only this criterion (1-7)")->check(CLI::Range(1, 7));
  CLI11_PARSE(app, argc, argv);

  bool ok = true;
  for (int n = 1; n <= 7; ++n)
    if (which == 0 || which == n) ok = run_one(n) && ok;
  return ok ? 0 : 1;
}
