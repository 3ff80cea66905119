#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include <Eigen/Core>

namespace elastoball {

/// Continuous extension of one accepted Dormand-Prince step (4th order).
template <typename State>
struct DenseSegment {
  double t0 = 0.0;
  double h = 0.0;
  std::array<State, 5> rc;

  double t1() const { return t0 + h; }

  State operator()(double t) const {
    const double s = (t - t0) / h;
    const double s1 = 1.0 - s;
    return rc[0] + s * (rc[1] + s1 * (rc[2] + s * (rc[3] + s1 * rc[4])));
  }

  /// d/dt of the interpolant.
  State derivative(double t) const {
    const double s = (t - t0) / h;
    const double s1 = 1.0 - s;
    const State T = rc[3] + s1 * rc[4];
    const State S = rc[2] + s * T;
    const State dS = T - s * rc[4];
    const State P = rc[1] + s1 * S;
    const State dP = -S + s1 * dS;
    return (P + s * dP) / h;
  }
};

struct Dopri5Options {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double safety = 0.9;
  double min_factor = 0.2;
  double max_factor = 5.0;
};

/// Embedded 5(4) Dormand-Prince pair with FSAL and dense output.
/// `Rhs` is callable as `State rhs(double t, const State& y)`; a non-finite
/// component in any stage rejects the step.
template <typename State, typename Rhs>
class Dopri5 {
 public:
  Dopri5(Rhs rhs, Dopri5Options opts) : rhs_(std::move(rhs)), opts_(opts) {}

  State rhs(double t, const State& y) const { return rhs_(t, y); }

  /// Attempts a step of size `h` from (t, y) with derivative `f0`. On success
  /// advances t, y, f0 and fills `seg`. In both cases `h` becomes the suggested
  /// next step size.
  bool try_step(double& t, State& y, State& f0, double& h, DenseSegment<State>& seg) const {
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                     a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                     a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                     a75 = -2187.0 / 6784, a76 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                     e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                     d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                     d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

    const State& k1 = f0;
    const State k2 = rhs_(t + c2 * h, y + h * (a21 * k1));
    const State k3 = rhs_(t + c3 * h, y + h * (a31 * k1 + a32 * k2));
    const State k4 = rhs_(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const State k5 = rhs_(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const State k6 =
        rhs_(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
    const State y1 = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
    const State k7 = rhs_(t + h, y1);
    const State err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    double norm = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
      const double sc = opts_.abs_tol + opts_.rel_tol * std::max(std::abs(y(i)), std::abs(y1(i)));
      const double r = err(i) / sc;
      norm += r * r;
    }
    norm = std::sqrt(norm / static_cast<double>(y.size()));

    if (!std::isfinite(norm) || !y1.allFinite() || !k7.allFinite()) {
      h *= opts_.min_factor;
      return false;
    }
    const double factor =
        norm == 0.0 ? opts_.max_factor
                    : std::clamp(opts_.safety * std::pow(norm, -0.2), opts_.min_factor,
                                 opts_.max_factor);
    if (norm > 1.0) {
      h *= std::min(1.0, factor);
      return false;
    }

    seg.t0 = t;
    seg.h = h;
    seg.rc[0] = y;
    seg.rc[1] = y1 - y;
    seg.rc[2] = h * k1 - seg.rc[1];
    seg.rc[3] = seg.rc[1] - h * k7 - seg.rc[2];
    seg.rc[4] = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);

    t += h;
    y = y1;
    f0 = k7;
    h *= factor;
    return true;
  }

 private:
  Rhs rhs_;
  Dopri5Options opts_;
};

}  // namespace elastoball
