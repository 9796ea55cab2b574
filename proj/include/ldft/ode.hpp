#ifndef LDFT_ODE_HPP
#define LDFT_ODE_HPP

#include <algorithm>
#include <cmath>
#include <functional>

#include "ldft/types.hpp"

namespace ldft {

// Adaptive Dormand-Prince 5(4) endpoint integration of y' = f(s, y).
// Returns y(s1). Throws CurveStiff when the step size collapses.
inline Vec integrate_rk45(const std::function<Vec(double, const Vec&)>& f,
                          Vec y, double s0, double s1, double tol = 1e-11,
                          int max_steps = 100000) {
  const double span = s1 - s0;
  if (span == 0.0) return y;
  const double dir = span > 0 ? 1.0 : -1.0;

  // Dormand-Prince coefficients.
  static const double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static const double a21 = 1.0 / 5;
  static const double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static const double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static const double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                      a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static const double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                      a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                      a65 = -5103.0 / 18656;
  static const double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                      b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static const double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                      e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

  double s = s0;
  double h = dir * std::min(std::abs(span), std::abs(span) / 4 + 1e-30);
  h = dir * std::abs(span);  // first try the whole interval; control shrinks it

  for (int step = 0; step < max_steps; ++step) {
    if (dir * (s - s1) >= 0) return y;
    if (dir * (s + h - s1) > 0) h = s1 - s;

    const Vec k1 = f(s, y);
    const Vec k2 = f(s + c2 * h, y + h * (a21 * k1));
    const Vec k3 = f(s + c3 * h, y + h * (a31 * k1 + a32 * k2));
    const Vec k4 = f(s + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3));
    const Vec k5 =
        f(s + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
    const Vec k6 = f(s + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 +
                                     a64 * k4 + a65 * k5));
    const Vec y5 =
        y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Vec k7 = f(s + h, y5);
    const Vec err_v =
        h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    const double scale = 1.0 + y.cwiseAbs().maxCoeff();
    const double err = err_v.cwiseAbs().maxCoeff() / scale;

    if (err <= tol) {
      s += h;
      y = y5;
      const double grow = err > 0 ? 0.9 * std::pow(tol / err, 0.2) : 5.0;
      h *= std::min(5.0, std::max(1.0, grow));
    } else {
      h *= std::max(0.1, 0.9 * std::pow(tol / err, 0.2));
    }
    if (std::abs(h) < 1e-14 * std::abs(span))
      throw CurveStiff("step size collapsed in rk45");
  }
  throw CurveStiff("rk45 exceeded max step count");
}

}  // namespace ldft

#endif
