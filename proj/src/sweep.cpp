#include "elastoball/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <thread>
#include <vector>

namespace elastoball {

namespace {

/// Runs fn(i) for i in [0, n) on up to `threads` workers pulling from a shared counter.
template <typename Fn>
void parallel_for(std::size_t n, int threads, Fn&& fn, const Progress& progress) {
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> done{0};
  std::mutex progress_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      fn(i);
      const std::size_t d = ++done;
      if (progress) {
        std::lock_guard lock(progress_mutex);
        progress(d, n);
      }
    }
  };
  const auto count = static_cast<std::size_t>(std::max(1, threads));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < std::min(count, n); ++t) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();
}

double delta_star_at(const ModelFamily& family, double nu) {
  ModelFamily f = family;
  f.nu = nu;
  const auto t = thresholds(f);
  if (!t.delta_star) throw NoTransition("delta_star is undefined at nu = " + std::to_string(nu));
  return *t.delta_star;
}

}  // namespace

bool is_no_ball(OutcomeKind kind) {
  return kind != OutcomeKind::FiniteBall && kind != OutcomeKind::InvalidCenter;
}

std::string sweep_label(OutcomeKind kind) {
  if (is_no_ball(kind)) return "NoBall:" + std::string(to_string(kind));
  return std::string(to_string(kind));
}

OutcomeKind classify_point(const ModelFamily& family, double nu, double delta_c,
                           const SolverConfig& config) {
  ModelFamily f = family;
  f.nu = nu;
  return integrate_ball(make_model(f), delta_c, config).kind;
}

DeltaCircle find_delta_circle(const ModelFamily& family, double nu, const SolverConfig& config,
                              const DeltaCircleOptions& opts) {
  ModelFamily f = family;
  f.nu = nu;
  const double ds = delta_star_at(f, nu);
  const MaterialModel model = make_model(f);
  auto finite = [&](double dc) { return integrate_ball(model, dc, config).finite(); };

  const int n = std::max(2, opts.scan_points);
  std::vector<double> xs(static_cast<std::size_t>(n));
  std::vector<bool> fs(xs.size());
  for (int k = 0; k < n; ++k) {
    const double frac = opts.lo_frac + (opts.hi_frac - opts.lo_frac) * k / (n - 1);
    xs[static_cast<std::size_t>(k)] = frac * ds;
    fs[static_cast<std::size_t>(k)] = finite(frac * ds);
  }
  if (fs.front() || !fs.back())
    throw NoTransition("no NoBall to FiniteBall transition between the bracket ends");

  int changes = 0;
  std::size_t first = xs.size();
  for (std::size_t k = 1; k < xs.size(); ++k) {
    if (fs[k] != fs[k - 1]) {
      ++changes;
      if (first == xs.size() && fs[k]) first = k;
    }
  }

  DeltaCircle out;
  out.delta_star = ds;
  out.monotone = changes == 1;
  double a = xs[first - 1], b = xs[first];
  while (b - a > opts.rel_width * ds) {
    const double mid = 0.5 * (a + b);
    if (finite(mid))
      b = mid;
    else
      a = mid;
  }
  out.lo = a;
  out.hi = b;
  out.delta_circle = 0.5 * (a + b);
  out.bracket_width = b - a;
  return out;
}

std::string_view to_string(DeltaScale scale) {
  switch (scale) {
    case DeltaScale::Absolute: return "absolute";
    case DeltaScale::RelativeStar: return "star";
    case DeltaScale::RelativeFlat: return "flat";
  }
  return "unknown";
}

DeltaScale parse_delta_scale(std::string_view name) {
  for (auto s : {DeltaScale::Absolute, DeltaScale::RelativeStar, DeltaScale::RelativeFlat})
    if (to_string(s) == name) return s;
  throw std::invalid_argument("unknown delta scale '" + std::string(name) + "'");
}

Eigen::ArrayXd grid_points(const Range& range, int n) {
  if (n < 1) throw std::invalid_argument("grid needs at least one point");
  if (n == 1) return Eigen::ArrayXd::Constant(1, range.lo);
  return Eigen::ArrayXd::LinSpaced(n, range.lo, range.hi);
}

SweepGrid sweep_grid(const ModelFamily& family, const Range& nu_range, const Range& delta_c_range,
                     int nu_points, int delta_points, DeltaScale scale,
                     const SolverConfig& config, int threads, const Progress& progress) {
  config.validate();
  SweepGrid grid;
  grid.family = family;
  grid.scale = scale;
  grid.meta = config;
  grid.nu_values = grid_points(nu_range, nu_points);
  grid.delta_c_values = grid_points(delta_c_range, delta_points);
  const Eigen::Index rows = grid.nu_values.size(), cols = grid.delta_c_values.size();

  // Models and scale factors are built up front so parameter errors surface
  // before any work starts.
  std::vector<MaterialModel> models;
  Eigen::ArrayXd unit = Eigen::ArrayXd::Ones(rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    ModelFamily f = family;
    f.nu = grid.nu_values(i);
    models.push_back(make_model(f));
    if (scale == DeltaScale::RelativeStar) {
      const auto t = thresholds(f);
      if (!t.delta_star)
        throw ParameterError("delta_star is undefined at nu = " + std::to_string(f.nu));
      unit(i) = *t.delta_star;
    } else if (scale == DeltaScale::RelativeFlat) {
      const double flat = thresholds(f).delta_flat;
      if (!std::isfinite(flat))
        throw ParameterError("delta_flat is infinite at nu = " + std::to_string(f.nu));
      unit(i) = flat;
    }
  }
  grid.delta_c.resize(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) grid.delta_c(i, j) = unit(i) * grid.delta_c_values(j);

  grid.labels.resize(rows, cols);
  const auto total = static_cast<std::size_t>(rows * cols);
  parallel_for(
      total, threads,
      [&](std::size_t k) {
        const auto i = static_cast<Eigen::Index>(k) / cols;
        const auto j = static_cast<Eigen::Index>(k) % cols;
        grid.labels(i, j) = static_cast<int>(
            integrate_ball(models[static_cast<std::size_t>(i)], grid.delta_c(i, j), config).kind);
      },
      progress);
  return grid;
}

BoundaryCurve boundary_curve(const ModelFamily& family, const Eigen::ArrayXd& nu_values,
                             const SolverConfig& config, int threads,
                             const DeltaCircleOptions& opts, const Progress& progress) {
  config.validate();
  constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
  BoundaryCurve curve;
  curve.nu = nu_values;
  curve.delta_circle = Eigen::ArrayXd::Constant(nu_values.size(), kNaN);
  curve.bracket_width = Eigen::ArrayXd::Constant(nu_values.size(), kNaN);
  parallel_for(
      static_cast<std::size_t>(nu_values.size()), threads,
      [&](std::size_t k) {
        const auto i = static_cast<Eigen::Index>(k);
        try {
          const auto dc = find_delta_circle(family, nu_values(i), config, opts);
          curve.delta_circle(i) = dc.delta_circle;
          curve.bracket_width(i) = dc.bracket_width;
        } catch (const NoTransition&) {
        }
      },
      progress);
  return curve;
}

}  // namespace elastoball
