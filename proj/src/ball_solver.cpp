#include "elastoball/ball_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace elastoball {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kEps = std::numeric_limits<double>::epsilon();

struct LoopResult {
  OutcomeKind kind = OutcomeKind::NoSurface;
  double r_stop = 0.0;
  long steps = 0;
};

OutcomeKind classify_stall(const MaterialModel& model, const State2& y, const SolverConfig& cfg) {
  if (y(0) > 0.0 && y(1) > 0.0 && a_hat(model, y(0), y(1)) < cfg.hyp_eps * model.kappa())
    return OutcomeKind::HyperbolicityBreakdown;
  return OutcomeKind::DensityBlowup;
}

/// Bisects p_rad along the interpolant between a positive and a nonpositive end.
double locate_surface(const MaterialModel& model, const DenseSegment<State2>& seg) {
  auto pressure = [&](double r) {
    const State2 y = seg(r);
    return p_rad(model, y(0), y(1));
  };
  double a = seg.t0, b = seg.t1();
  double pa = pressure(a), pb = pressure(b);
  for (int it = 0; it < 200 && b - a > 2.0 * kEps * b; ++it) {
    const double mid = 0.5 * (a + b);
    const double pm = pressure(mid);
    if (pm > 0.0) {
      a = mid;
      pa = pm;
    } else {
      b = mid;
      pb = pm;
    }
  }
  return std::abs(pb) <= std::abs(pa) ? b : a;
}

/// Largest mismatch between the interpolant's derivative and the right-hand
/// side at interior points of a step, in units of the allowed defect.
double defect_ratio(const MaterialModel& model, double g, const DenseSegment<State2>& seg,
                    const SolverConfig& cfg) {
  if (!(cfg.defect_tol > 0.0)) return 0.0;
  double worst = 0.0;
  for (const double s : {0.25, 0.5, 0.75}) {
    const double r = seg.t0 + s * seg.h;
    const State2 u = seg(r);
    const State2 du = seg.derivative(r);
    const State2 f = static_rhs(model, g, r, u);
    if (!f.allFinite() || !du.allFinite()) return std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < 2; ++i) {
      // Roundoff floor: the right-hand side divides differences of u by r.
      const double floor = (64.0 * kEps * std::abs(u(i)) + cfg.abs_tol) / r;
      const double scale = cfg.defect_tol * std::max(std::abs(du(i)), std::abs(f(i))) + floor;
      worst = std::max(worst, std::abs(du(i) - f(i)) / scale);
    }
  }
  return worst;
}

LoopResult run_static(const MaterialModel& model, const SolverConfig& cfg, double r_end,
                      bool detect_surface, Trajectory& traj, std::vector<double>& samples) {
  const double g = cfg.g;
  auto rhs = [&model, g](double r, const State2& y) { return static_rhs(model, g, r, y); };
  const Dopri5<State2, decltype(rhs)> stepper(rhs, {cfg.rel_tol, cfg.abs_tol});

  double r = traj.r_start();
  State2 y = traj.state(r);
  State2 f = stepper.rhs(r, y);
  LoopResult res;
  if (!f.allFinite()) {
    res.kind = classify_stall(model, y, cfg);
    res.r_stop = r;
    traj.set_end(r, y);
    return res;
  }
  double h = 0.1 * r;

  while (true) {
    if (r >= r_end) {
      res.kind = OutcomeKind::NoSurface;
      break;
    }
    if (res.steps >= cfg.max_steps) {
      res.kind = classify_stall(model, y, cfg);
      break;
    }
    h = std::min(h, r_end - r);
    const double h_try = h;
    const double r_prev = r;
    const State2 y_prev = y, f_prev = f;
    DenseSegment<State2> seg;
    bool accepted = stepper.try_step(r, y, f, h, seg);
    if (accepted) {
      const double d = defect_ratio(model, g, seg, cfg);
      if (d > 1.0) {
        r = r_prev;
        y = y_prev;
        f = f_prev;
        h = h_try * (std::isfinite(d) ? std::clamp(0.9 * std::pow(d, -0.25), 0.2, 0.9) : 0.2);
        accepted = false;
      }
    }
    if (!accepted) {
      if (h_try < 16.0 * kEps * r) {
        res.kind = classify_stall(model, y, cfg);
        break;
      }
      continue;
    }
    ++res.steps;
    traj.append(seg);

    const auto c = evaluate(model, y(0), y(1));
    if (detect_surface && c.p_rad <= 0.0) {
      const double R = locate_surface(model, seg);
      samples.push_back(R);
      traj.set_end(R, seg(R));
      res.kind = OutcomeKind::FiniteBall;
      res.r_stop = R;
      return res;
    }
    samples.push_back(r);
    if (c.a_hat < cfg.hyp_eps * model.kappa()) {
      res.kind = OutcomeKind::HyperbolicityBreakdown;
      break;
    }
    if (y(0) > cfg.delta_max) {
      res.kind = OutcomeKind::DensityBlowup;
      break;
    }
  }
  res.r_stop = r;
  traj.set_end(r, y);
  return res;
}

BallOutcome center_only(const MaterialModel& model, const SolverConfig& cfg, double delta_c,
                        OutcomeKind kind, double p_center) {
  auto traj = std::make_shared<Trajectory>(model, cfg.g, delta_c, 0.0, 0.0);
  traj->set_end(0.0, State2(delta_c, delta_c));
  BallOutcome out;
  out.kind = kind;
  out.delta_c = delta_c;
  out.p_center = p_center;
  out.profile = sample_profile(traj, {0.0});
  return out;
}

}  // namespace

void SolverConfig::validate() const {
  if (!(g >= 0.0)) throw std::invalid_argument("solver config: g must be nonnegative");
  if (!(r0_rel > 0.0 && rel_tol > 0.0 && abs_tol > 0.0 && r_max > 0.0 && delta_max > 0.0 &&
        hyp_eps > 0.0 && max_steps > 0))
    throw std::invalid_argument("solver config: all tolerances and limits must be positive");
  if (!(defect_tol >= 0.0)) throw std::invalid_argument("solver config: defect_tol must be >= 0");
}

Trajectory::Trajectory(MaterialModel model, double g, double delta_c, double d2, double r_start)
    : model_(std::move(model)),
      g_(g),
      has_center_(true),
      delta_c_(delta_c),
      d2_(d2),
      r_start_(r_start),
      y_start_(delta_c + d2 * r_start * r_start, delta_c + 0.6 * d2 * r_start * r_start),
      r_end_(r_start),
      y_end_(y_start_) {}

Trajectory Trajectory::from_state(MaterialModel model, double g, double r_start, const State2& y) {
  Trajectory t;
  t.model_ = std::move(model);
  t.g_ = g;
  t.has_center_ = false;
  t.r_start_ = r_start;
  t.y_start_ = y;
  t.r_end_ = r_start;
  t.y_end_ = y;
  return t;
}

State2 Trajectory::state(double r) const {
  if (r == r_end_) return y_end_;
  if (r <= r_start_) {
    if (!has_center_ && r < r_start_)
      throw std::out_of_range("trajectory: radius before the integration start");
    if (!has_center_) return y_start_;
    return {delta_c_ + d2_ * r * r, delta_c_ + 0.6 * d2_ * r * r};
  }
  if (r > r_end_ * (1.0 + 1e-12) || segments_.empty())
    throw std::out_of_range("trajectory: radius beyond the integrated range");
  auto it = std::upper_bound(segments_.begin(), segments_.end(), r,
                             [](double v, const DenseSegment<State2>& s) { return v < s.t0; });
  if (it != segments_.begin()) --it;
  return (*it)(r);
}

State2 Trajectory::derivative(double r) const {
  if (r <= r_start_) {
    if (!has_center_) return static_rhs(model_, g_, r_start_, y_start_);
    return {2.0 * d2_ * r, 1.2 * d2_ * r};
  }
  if (segments_.empty() || r > r_end_ * (1.0 + 1e-12))
    throw std::out_of_range("trajectory: radius beyond the integrated range");
  auto it = std::upper_bound(segments_.begin(), segments_.end(), r,
                             [](double v, const DenseSegment<State2>& s) { return v < s.t0; });
  if (it != segments_.begin()) --it;
  return it->derivative(r);
}

double enclosed_mass(double eta, double r) {
  return 4.0 * std::numbers::pi / 3.0 * eta * r * r * r;
}

RadialProfile sample_profile(std::shared_ptr<const Trajectory> trajectory,
                             const std::vector<double>& radii) {
  const auto n = static_cast<Eigen::Index>(radii.size());
  RadialProfile p;
  for (auto* col : {&p.r, &p.delta, &p.eta, &p.rho, &p.p_rad, &p.p_tan, &p.m}) col->resize(n);
  const MaterialModel& model = trajectory->model();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double r = radii[static_cast<std::size_t>(i)];
    const State2 y = trajectory->state(r);
    p.r(i) = r;
    p.delta(i) = y(0);
    p.eta(i) = y(1);
    p.rho(i) = y(0);
    if (y(0) > 0.0 && y(1) > 0.0) {
      const auto c = evaluate(model, y(0), y(1));
      p.p_rad(i) = c.p_rad;
      p.p_tan(i) = c.p_tan;
    } else {
      p.p_rad(i) = p.p_tan(i) = kNaN;
    }
    p.m(i) = enclosed_mass(y(1), r);
  }
  p.trajectory = std::move(trajectory);
  return p;
}

std::string_view to_string(OutcomeKind kind) {
  switch (kind) {
    case OutcomeKind::FiniteBall: return "FiniteBall";
    case OutcomeKind::NoSurface: return "NoSurface";
    case OutcomeKind::HyperbolicityBreakdown: return "HyperbolicityBreakdown";
    case OutcomeKind::DensityBlowup: return "DensityBlowup";
    case OutcomeKind::InvalidCenter: return "InvalidCenter";
  }
  return "Unknown";
}

OutcomeKind parse_outcome(std::string_view name) {
  for (auto k : {OutcomeKind::FiniteBall, OutcomeKind::NoSurface,
                 OutcomeKind::HyperbolicityBreakdown, OutcomeKind::DensityBlowup,
                 OutcomeKind::InvalidCenter})
    if (to_string(k) == name) return k;
  throw std::invalid_argument("unknown outcome kind '" + std::string(name) + "'");
}

State2 static_rhs(const MaterialModel& model, double g, double r, const State2& y) {
  const double delta = y(0), eta = y(1);
  if (!(delta > 0.0 && eta > 0.0) || !std::isfinite(delta) || !std::isfinite(eta))
    return {kNaN, kNaN};
  const auto c = evaluate(model, delta, eta);
  if (!(c.a_hat > 0.0)) return {kNaN, kNaN};
  const double gk = g * model.kappa();
  return {(c.b_hat * (eta - delta) / r - gk * r * eta * delta) / c.a_hat,
          3.0 * (delta - eta) / r};
}

CenterExpansion center_expansion(const MaterialModel& model, double delta_c,
                                 const SolverConfig& config) {
  const auto c = evaluate(model, delta_c, delta_c);
  if (!(c.a_hat > config.hyp_eps * model.kappa()))
    throw HyperbolicityError("a_hat at the center is below the hyperbolicity floor");
  const double d2 =
      -config.g * model.kappa() * delta_c * delta_c / (2.0 * c.a_hat + 0.4 * c.b_hat);
  return {d2, 0.6 * d2};
}

double gravitational_length(const MaterialModel& model, double delta_c,
                            const SolverConfig& config) {
  if (config.g == 0.0) return 1.0;
  const auto c = evaluate(model, delta_c, delta_c);
  return std::sqrt(std::abs(2.0 * c.a_hat + 0.4 * c.b_hat) /
                   (config.g * model.kappa() * delta_c));
}

BallOutcome integrate_ball(const MaterialModel& model, double delta_c,
                           const SolverConfig& config) {
  config.validate();
  if (!(delta_c > 0.0)) throw std::invalid_argument("central density must be positive");
  const double p_c = p_rad(model, delta_c, delta_c);
  if (delta_c == 1.0) return center_only(model, config, delta_c, OutcomeKind::FiniteBall, p_c);
  if (!(p_c > 0.0)) return center_only(model, config, delta_c, OutcomeKind::InvalidCenter, p_c);

  CenterExpansion ce{};
  try {
    ce = center_expansion(model, delta_c, config);
  } catch (const HyperbolicityError&) {
    return center_only(model, config, delta_c, OutcomeKind::HyperbolicityBreakdown, p_c);
  }
  const double r0 = config.r0_rel * gravitational_length(model, delta_c, config);
  auto traj = std::make_shared<Trajectory>(model, config.g, delta_c, ce.d2, r0);
  std::vector<double> samples{0.0, r0};
  const auto res = run_static(model, config, config.r_max, true, *traj, samples);

  BallOutcome out;
  out.kind = res.kind;
  out.delta_c = delta_c;
  out.p_center = p_c;
  out.r_stop = res.r_stop;
  out.steps = res.steps;
  if (samples.back() != traj->r_end()) samples.push_back(traj->r_end());
  out.profile = sample_profile(traj, samples);
  if (out.finite()) {
    out.R = res.r_stop;
    out.M = enclosed_mass(traj->state(out.R)(1), out.R);
  }
  return out;
}

FreeIntegration integrate_from(const MaterialModel& model, double r_start, const State2& y,
                               double r_end, const SolverConfig& config) {
  config.validate();
  auto traj = std::make_shared<Trajectory>(Trajectory::from_state(model, config.g, r_start, y));
  std::vector<double> samples{r_start};
  const auto res = run_static(model, config, r_end, false, *traj, samples);
  return {res.kind, res.r_stop, traj};
}

RadialProfile resample_profile(const RadialProfile& profile, int n) {
  if (n < 2) throw std::invalid_argument("resample_profile needs n >= 2");
  if (!profile.trajectory || profile.size() == 0)
    throw std::invalid_argument("resample_profile needs a profile with a trajectory");
  const Eigen::Index last = profile.size() - 1;
  const double r0 = profile.r(0), r1 = profile.r(last);
  std::vector<double> radii(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) radii[static_cast<std::size_t>(i)] = r0 + (r1 - r0) * i / (n - 1);
  radii.back() = r1;
  RadialProfile out = sample_profile(profile.trajectory, radii);
  auto copy_row = [&](Eigen::Index dst, Eigen::Index src) {
    out.r(dst) = profile.r(src);
    out.delta(dst) = profile.delta(src);
    out.eta(dst) = profile.eta(src);
    out.rho(dst) = profile.rho(src);
    out.p_rad(dst) = profile.p_rad(src);
    out.p_tan(dst) = profile.p_tan(src);
    out.m(dst) = profile.m(src);
  };
  copy_row(0, 0);
  copy_row(n - 1, last);
  return out;
}

}  // namespace elastoball
