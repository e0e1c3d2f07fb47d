#pragma once

#include <algorithm>
#include <cmath>
#include <complex>

#include "holo/error.hpp"
#include "holo/lie.hpp"

namespace holo::ode {

struct Result {
  Mat y;
  double error_estimate = 0.0;  ///< sum of accepted local error estimates
  int steps = 0;
};

struct Options {
  double tol = 1e-9;        ///< local error per unit of the independent variable
  double h_min = 1e-13;     ///< relative to |t1 - t0|
  int max_steps = 2'000'000;
  bool renormalize_det = true;  ///< rescale by det^{-1/n} when |det - 1| > 1e-12
};

/// Dormand-Prince 5(4) for matrix ODEs y' = rhs(t, y), with local extrapolation.
/// A step of size h is accepted when |y5 - y4| / max(1, |y|) <= tol * |h|, so the
/// accumulated error estimate over [t0, t1] stays below tol * |t1 - t0|.
/// Throws Numerical/ToleranceNotMet on step-size underflow.
template <class Rhs>
Result dopri5(Rhs&& rhs, Mat y0, double t0, double t1, const Options& opt) {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                          a65 = -5103.0 / 18656;
  static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                          e6 = 22.0 / 525, e7 = -1.0 / 40;

  Result res{std::move(y0), 0.0, 0};
  const double span = t1 - t0;
  if (span == 0.0) return res;
  const double dir = span > 0 ? 1.0 : -1.0;
  const double length = std::abs(span);
  const int n = static_cast<int>(res.y.rows());

  double t = t0;
  double h = dir * 0.05 * length;
  Mat k1 = rhs(t, res.y);
  bool fresh_k1 = true;
  int attempts = 0;

  while (dir * (t1 - t) > 0.0) {
    if (++attempts > opt.max_steps) throw numerical_error("ToleranceNotMet", "step budget exhausted");
    if (dir * (t + h - t1) > 0.0) h = t1 - t;
    if (!fresh_k1) {
      k1 = rhs(t, res.y);
      fresh_k1 = true;
    }
    const Mat& y = res.y;
    const Mat k2 = rhs(t + c2 * h, Mat(y + h * (a21 * k1)));
    const Mat k3 = rhs(t + c3 * h, Mat(y + h * (a31 * k1 + a32 * k2)));
    const Mat k4 = rhs(t + c4 * h, Mat(y + h * (a41 * k1 + a42 * k2 + a43 * k3)));
    const Mat k5 = rhs(t + c5 * h, Mat(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
    const Mat k6 = rhs(t + h, Mat(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));
    Mat y5 = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
    const Mat k7 = rhs(t + h, y5);
    const Mat err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

    const double scale = std::max(1.0, y5.cwiseAbs().maxCoeff());
    const double errn = err.cwiseAbs().maxCoeff() / scale;
    const double allowed = opt.tol * std::abs(h);
    if (!std::isfinite(errn) || !y5.allFinite()) {
      h *= 0.2;
    } else if (errn <= allowed) {
      t += h;
      res.error_estimate += errn;
      ++res.steps;
      res.y = std::move(y5);
      k1 = k7;
      if (opt.renormalize_det) {
        const cplx det = res.y.determinant();
        if (std::abs(det - 1.0) > 1e-12 && std::abs(det) > 0.0) {
          res.y *= std::pow(det, -1.0 / static_cast<double>(n));
          fresh_k1 = false;
        }
      }
      const double factor = errn > 0.0 ? 0.9 * std::pow(allowed / errn, 0.25) : 5.0;
      h *= std::clamp(factor, 0.2, 5.0);
    } else {
      h *= std::clamp(0.9 * std::pow(allowed / errn, 0.25), 0.1, 0.9);
    }
    if (std::abs(h) < opt.h_min * length && dir * (t1 - t) > opt.h_min * length) {
      throw numerical_error("ToleranceNotMet", "step size underflow");
    }
  }
  return res;
}

}  // namespace holo::ode
