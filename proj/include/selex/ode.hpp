#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "selex/errors.hpp"

namespace selex::integrator {

struct RkOptions {
  double rel_tol = 1e-8;
  double abs_tol = 1e-10;
  double min_step = 1e-10;
  double max_step = 10.0;
};

struct RkStats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
};

// One accepted step with the data needed for cubic Hermite dense output.
struct RkStep {
  double t0, t1;
  std::span<const double> y0, y1, f0, f1;
};

inline void hermite_eval(const RkStep& s, double t, std::span<double> out) {
  const double h = s.t1 - s.t0;
  const double th = (t - s.t0) / h;
  const double a = th * th * (3.0 - 2.0 * th);
  const double b0 = th * (th - 1.0) * (th - 1.0) * h;
  const double b1 = th * th * (th - 1.0) * h;
  for (std::size_t i = 0; i < out.size(); ++i)
    out[i] = s.y0[i] + a * (s.y1[i] - s.y0[i]) + b0 * s.f0[i] + b1 * s.f1[i];
}

// Dormand-Prince 5(4) with a PI step controller. `rhs(t, y, dy)` fills the
// derivative; `acceptable(y)` may veto a proposed state (reject-and-halve,
// used for the S >= 0 guard); `sink(step)` receives each accepted step.
template <class Rhs, class Guard, class Sink>
RkStats rk45_integrate(Rhs&& rhs, std::vector<double> y, double t0, double t1,
                       const RkOptions& opt, Guard&& acceptable, Sink&& sink) {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5,
                          c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                          a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                          a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                          b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  // b - bhat (embedded 4th order) for the error estimate
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695,
                          e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;

  if (!(opt.min_step > 0.0) || !(opt.min_step <= opt.max_step))
    throw ArgumentError("rk45: need 0 < min_step <= max_step");
  if (!(opt.rel_tol > 0.0) || !(opt.abs_tol > 0.0))
    throw ArgumentError("rk45: tolerances must be > 0");
  if (!(t1 > t0)) throw ArgumentError("rk45: need t1 > t0");

  const std::size_t n = y.size();
  std::vector<double> k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n);
  std::vector<double> ytmp(n), ynew(n);

  RkStats stats;
  double t = t0;
  double h = std::min({opt.max_step, (t1 - t0) / 100.0, 1e-2});
  h = std::max(h, opt.min_step);
  double err_prev = 1.0;

  rhs(t, std::span<const double>(y), std::span<double>(k1));
  while (t < t1) {
    h = std::min(h, t1 - t);
    bool guard_reject = false;

    auto stage = [&](std::vector<double>& out, auto... pairs) {
      // out = y + h * sum(coef * k)
      for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        ((acc += pairs.first * pairs.second[i]), ...);
        out[i] = y[i] + h * acc;
      }
    };

    stage(ytmp, std::pair{a21, k1.data()});
    rhs(t + c2 * h, std::span<const double>(ytmp), std::span<double>(k2));
    stage(ytmp, std::pair{a31, k1.data()}, std::pair{a32, k2.data()});
    rhs(t + c3 * h, std::span<const double>(ytmp), std::span<double>(k3));
    stage(ytmp, std::pair{a41, k1.data()}, std::pair{a42, k2.data()},
          std::pair{a43, k3.data()});
    rhs(t + c4 * h, std::span<const double>(ytmp), std::span<double>(k4));
    stage(ytmp, std::pair{a51, k1.data()}, std::pair{a52, k2.data()},
          std::pair{a53, k3.data()}, std::pair{a54, k4.data()});
    rhs(t + c5 * h, std::span<const double>(ytmp), std::span<double>(k5));
    stage(ytmp, std::pair{a61, k1.data()}, std::pair{a62, k2.data()},
          std::pair{a63, k3.data()}, std::pair{a64, k4.data()},
          std::pair{a65, k5.data()});
    rhs(t + h, std::span<const double>(ytmp), std::span<double>(k6));
    stage(ynew, std::pair{b1, k1.data()}, std::pair{b3, k3.data()},
          std::pair{b4, k4.data()}, std::pair{b5, k5.data()},
          std::pair{b6, k6.data()});
    rhs(t + h, std::span<const double>(ynew), std::span<double>(k7));

    double err_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double ei = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] +
                             e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      const double sc =
          opt.abs_tol +
          opt.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      err_sq += (ei / sc) * (ei / sc);
    }
    double err = std::sqrt(err_sq / static_cast<double>(n));
    guard_reject = !acceptable(std::span<const double>(ynew));

    if (err <= 1.0 && !guard_reject) {
      sink(RkStep{t, t + h,
                  std::span<const double>(y), std::span<const double>(ynew),
                  std::span<const double>(k1), std::span<const double>(k7)});
      t += h;
      y.swap(ynew);
      k1.swap(k7);  // FSAL
      ++stats.accepted;
      const double e = std::max(err, 1e-10);
      double fac = 0.9 * std::pow(e, -0.7 / 5.0) * std::pow(err_prev, 0.4 / 5.0);
      fac = std::clamp(fac, 0.2, 5.0);
      h = std::min(h * fac, opt.max_step);
      err_prev = e;
    } else {
      ++stats.rejected;
      if (guard_reject) {
        h *= 0.5;
      } else {
        const double fac =
            std::clamp(0.9 * std::pow(err, -0.2), 0.1, 0.5);
        h *= fac;
      }
      if (h < opt.min_step)
        throw StiffnessError("rk45: step underflow", t, y[0],
                             n > 1 ? y[1] : 0.0);
    }
  }
  return stats;
}

}  // namespace selex::integrator
