#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "holo/lie.hpp"
#include "holo/rational.hpp"
#include "holo/surface.hpp"

namespace holo {

/// Pointwise evaluator of a matrix-valued holomorphic function on a surface.
/// Used both for algebra-valued currents and for coefficients of 1-forms A(z) dz
/// that are not representable in rational form (gauge-transformed forms, log
/// derivatives of group currents).
class MatrixField {
 public:
  using Fn = std::function<Mat(cplx)>;

  MatrixField(int n, SurfaceModel surface, Fn fn) : n_(n), surface_(std::move(surface)), fn_(std::move(fn)) {}

  Mat operator()(cplx z) const { return fn_(z); }
  int n() const noexcept { return n_; }
  const SurfaceModel& surface() const noexcept { return surface_; }

  MatrixField operator+(const MatrixField& o) const;
  MatrixField scaled(cplx s) const;

 private:
  int n_;
  SurfaceModel surface_;
  Fn fn_;
};

struct CurrentTerm {
  lie::AlgebraElement coefficient;
  RationalFunction scalar;
};

/// sl(n)-valued rational function on the surface: sum_m A_m r_m(z), poles only
/// at punctures.
class AlgebraCurrent {
 public:
  AlgebraCurrent(SurfaceModel surface, int n);
  /// Throws Input/PoleOffSurface when a term has a pole outside the puncture set.
  AlgebraCurrent(SurfaceModel surface, std::vector<CurrentTerm> terms);

  static AlgebraCurrent constant(SurfaceModel surface, const lie::AlgebraElement& x);

  Mat operator()(cplx z) const;
  /// Exact derivative, evaluated at z.
  Mat derivative(cplx z) const;
  AlgebraCurrent derivative() const;

  AlgebraCurrent operator+(const AlgebraCurrent& o) const;
  AlgebraCurrent operator-(const AlgebraCurrent& o) const;
  AlgebraCurrent scaled(cplx s) const;

  MatrixField field() const;

  const std::vector<CurrentTerm>& terms() const noexcept { return terms_; }
  const SurfaceModel& surface() const noexcept { return surface_; }
  int n() const noexcept { return n_; }

 private:
  void refresh();

  SurfaceModel surface_;
  int n_;
  std::vector<CurrentTerm> terms_;
  std::vector<RationalFunction> derivs_;  // d/dz of each term's scalar
};

/// Pointwise bracket, exact in the rational representation.
AlgebraCurrent bracket(const AlgebraCurrent& x, const AlgebraCurrent& y);

/// Holomorphic 1-form coefficient(z) dz.
struct OneForm {
  AlgebraCurrent coefficient;

  Mat operator()(cplx z) const { return coefficient(z); }
  MatrixField field() const { return coefficient.field(); }
  const SurfaceModel& surface() const noexcept { return coefficient.surface(); }
  int n() const noexcept { return coefficient.n(); }
};

/// z -> exp(X_1(z)) exp(X_2(z)) ... exp(X_m(z)).
class GroupCurrent {
 public:
  /// Constant identity.
  GroupCurrent(SurfaceModel surface, int n);
  explicit GroupCurrent(std::vector<AlgebraCurrent> factors);

  static GroupCurrent exp(const AlgebraCurrent& x);

  Mat operator()(cplx z) const;
  lie::GroupElement value(cplx z) const;

  /// Pointwise product: factors of this followed by factors of o.
  GroupCurrent operator*(const GroupCurrent& o) const;
  GroupCurrent inverse() const;

  const std::vector<AlgebraCurrent>& factors() const noexcept { return factors_; }
  const SurfaceModel& surface() const noexcept { return surface_; }
  int n() const noexcept { return n_; }

 private:
  SurfaceModel surface_;
  int n_;
  std::vector<AlgebraCurrent> factors_;
};

/// Value and left logarithmic derivative of a group current at one point.
struct GroupJet {
  Mat value;
  Mat log_derivative;
};

GroupJet jet(const GroupCurrent& f, cplx z);
/// Coefficient of dz in f^{-1} df at z.
Mat log_derivative(const GroupCurrent& f, cplx z);
MatrixField log_derivative(const GroupCurrent& f);

/// (alpha * f)(z) = delta(f)(z) + Ad(f(z))^{-1} alpha(z), evaluated lazily.
MatrixField gauge_act(const MatrixField& alpha, const GroupCurrent& f);

/// Fourier polynomial X(theta) = sum_{|m| <= M} c_m e^{i m theta}.
class LoopCurrent {
 public:
  LoopCurrent(int n, int bandwidth);
  /// coeffs[m + M], size 2M + 1.
  explicit LoopCurrent(std::vector<Mat> coeffs);

  static LoopCurrent constant(const lie::AlgebraElement& x);

  Mat operator()(double theta) const;
  Mat derivative(double theta) const;

  const Mat& coefficient(int m) const;
  Mat& coefficient(int m);
  int bandwidth() const noexcept { return bandwidth_; }
  int n() const noexcept { return n_; }

 private:
  int n_;
  int bandwidth_;
  std::vector<Mat> coeffs_;
};

/// Loop parameter theta on a circle contour: z(theta) = c + r e^{i(theta0 + o theta)}.
struct CircleChart {
  Contour::Circle circle;
  cplx point(double theta) const;
  /// dz/dtheta
  cplx tangent(double theta) const;
};
/// Throws Input/NotACircle.
CircleChart circle_chart(const Contour& c);

struct LoopRestriction {
  LoopCurrent loop;
  bool aliasing_warning = false;
};

/// DFT of x sampled at 2M + 2 equispaced points of the circle.
LoopRestriction restrict_to_loop(const MatrixField& x, const Contour& circle, int bandwidth);
inline LoopRestriction restrict_to_loop(const AlgebraCurrent& x, const Contour& circle, int bandwidth) {
  return restrict_to_loop(x.field(), circle, bandwidth);
}
/// Pull-back of the form coefficient(z) dz to the circle: coefficient(z(theta)) z'(theta).
LoopRestriction restrict_form_to_loop(const MatrixField& form, const Contour& circle, int bandwidth);

struct GroupLoopRestriction {
  std::vector<double> thetas;
  std::vector<Mat> samples;
  /// Fourier data of the principal logarithm of the samples when it is defined.
  std::optional<LoopCurrent> log_fourier;
  bool aliasing_warning = false;
};

GroupLoopRestriction restrict_to_loop(const GroupCurrent& f, const Contour& circle, int bandwidth);

/// max |d alpha + 1/2 [alpha, alpha]| over the samples, evaluated on the real
/// frame (d/dx, d/dy).
double mc_residual(const OneForm& alpha, std::span<const cplx> samples);

}  // namespace holo
