#include "holo/currents.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

#include <unsupported/Eigen/MatrixFunctions>

#include "holo/error.hpp"

namespace holo {

namespace {
constexpr double kPi = std::numbers::pi;
}

// ---------------------------------------------------------------------------
// MatrixField

MatrixField MatrixField::operator+(const MatrixField& o) const {
  if (o.n_ != n_) throw input_error("SizeMismatch", "fields have different matrix sizes");
  auto a = fn_;
  auto b = o.fn_;
  return MatrixField(n_, surface_, [a, b](cplx z) -> Mat { return a(z) + b(z); });
}

MatrixField MatrixField::scaled(cplx s) const {
  auto a = fn_;
  return MatrixField(n_, surface_, [a, s](cplx z) -> Mat { return s * a(z); });
}

// ---------------------------------------------------------------------------
// AlgebraCurrent

AlgebraCurrent::AlgebraCurrent(SurfaceModel surface, int n) : surface_(std::move(surface)), n_(n) {
  if (n < 2 || n > kMaxRank) throw input_error("BadMatrixSize", "unsupported matrix size");
}

AlgebraCurrent::AlgebraCurrent(SurfaceModel surface, std::vector<CurrentTerm> terms)
    : surface_(std::move(surface)), n_(0), terms_(std::move(terms)) {
  if (terms_.empty()) throw input_error("EmptyCurrent", "use the (surface, n) constructor for the zero current");
  n_ = terms_.front().coefficient.n();
  for (const auto& t : terms_) {
    if (t.coefficient.n() != n_) throw input_error("SizeMismatch", "current terms have different matrix sizes");
    if (!t.scalar.poles_within(surface_.punctures())) {
      throw input_error("PoleOffSurface", "current has a pole outside the puncture set");
    }
  }
  refresh();
}

void AlgebraCurrent::refresh() {
  derivs_.clear();
  for (const auto& t : terms_) derivs_.push_back(t.scalar.derivative());
}

AlgebraCurrent AlgebraCurrent::constant(SurfaceModel surface, const lie::AlgebraElement& x) {
  return AlgebraCurrent(std::move(surface), {CurrentTerm{x, RationalFunction::constant(1.0)}});
}

Mat AlgebraCurrent::operator()(cplx z) const {
  Mat out = Mat::Zero(n_, n_);
  for (const auto& t : terms_) out += t.scalar(z) * t.coefficient.matrix();
  return out;
}

Mat AlgebraCurrent::derivative(cplx z) const {
  Mat out = Mat::Zero(n_, n_);
  for (size_t i = 0; i < terms_.size(); ++i) {
    if (!derivs_[i].is_zero()) out += derivs_[i](z) * terms_[i].coefficient.matrix();
  }
  return out;
}

AlgebraCurrent AlgebraCurrent::derivative() const {
  AlgebraCurrent d(surface_, n_);
  for (const auto& t : terms_) {
    RationalFunction r = t.scalar.derivative();
    if (!r.is_zero()) d.terms_.push_back({t.coefficient, std::move(r)});
  }
  d.refresh();
  return d;
}

AlgebraCurrent AlgebraCurrent::operator+(const AlgebraCurrent& o) const {
  if (o.n_ != n_) throw input_error("SizeMismatch", "currents have different matrix sizes");
  if (!(o.surface_ == surface_)) throw input_error("SurfaceMismatch", "currents live on different surfaces");
  AlgebraCurrent r = *this;
  r.terms_.insert(r.terms_.end(), o.terms_.begin(), o.terms_.end());
  r.refresh();
  return r;
}

AlgebraCurrent AlgebraCurrent::scaled(cplx s) const {
  AlgebraCurrent r = *this;
  for (auto& t : r.terms_) t.scalar = s * t.scalar;
  r.refresh();
  return r;
}

AlgebraCurrent AlgebraCurrent::operator-(const AlgebraCurrent& o) const { return *this + o.scaled(-1.0); }

MatrixField AlgebraCurrent::field() const {
  auto self = std::make_shared<const AlgebraCurrent>(*this);
  return MatrixField(n_, surface_, [self](cplx z) { return (*self)(z); });
}

AlgebraCurrent bracket(const AlgebraCurrent& x, const AlgebraCurrent& y) {
  if (x.n() != y.n()) throw input_error("SizeMismatch", "currents have different matrix sizes");
  if (!(x.surface() == y.surface())) throw input_error("SurfaceMismatch", "currents live on different surfaces");
  AlgebraCurrent out(x.surface(), x.n());
  std::vector<CurrentTerm> terms;
  for (const auto& a : x.terms()) {
    for (const auto& b : y.terms()) {
      RationalFunction r = a.scalar * b.scalar;
      if (r.is_zero()) continue;
      terms.push_back({lie::bracket(a.coefficient, b.coefficient), std::move(r)});
    }
  }
  if (terms.empty()) return out;
  return AlgebraCurrent(x.surface(), std::move(terms));
}

// ---------------------------------------------------------------------------
// GroupCurrent

GroupCurrent::GroupCurrent(SurfaceModel surface, int n) : surface_(std::move(surface)), n_(n) {
  if (n < 2 || n > kMaxRank) throw input_error("BadMatrixSize", "unsupported matrix size");
}

GroupCurrent::GroupCurrent(std::vector<AlgebraCurrent> factors)
    : surface_(factors.empty() ? throw input_error("EmptyCurrent", "use the (surface, n) constructor for the identity")
                               : factors.front().surface()),
      n_(factors.front().n()),
      factors_(std::move(factors)) {
  for (const auto& f : factors_) {
    if (f.n() != n_) throw input_error("SizeMismatch", "factors have different matrix sizes");
    if (!(f.surface() == surface_)) throw input_error("SurfaceMismatch", "factors live on different surfaces");
  }
}

GroupCurrent GroupCurrent::exp(const AlgebraCurrent& x) { return GroupCurrent(std::vector<AlgebraCurrent>{x}); }

Mat GroupCurrent::operator()(cplx z) const {
  Mat v = Mat::Identity(n_, n_);
  for (const auto& f : factors_) v = v * lie::matrix_exp(f(z));
  return v;
}

lie::GroupElement GroupCurrent::value(cplx z) const { return lie::GroupElement((*this)(z)); }

GroupCurrent GroupCurrent::operator*(const GroupCurrent& o) const {
  if (o.n_ != n_) throw input_error("SizeMismatch", "group currents have different matrix sizes");
  if (!(o.surface_ == surface_)) throw input_error("SurfaceMismatch", "group currents live on different surfaces");
  GroupCurrent r = *this;
  r.factors_.insert(r.factors_.end(), o.factors_.begin(), o.factors_.end());
  return r;
}

GroupCurrent GroupCurrent::inverse() const {
  GroupCurrent r(surface_, n_);
  for (auto it = factors_.rbegin(); it != factors_.rend(); ++it) r.factors_.push_back(it->scaled(-1.0));
  return r;
}

GroupJet jet(const GroupCurrent& f, cplx z) {
  const int n = f.n();
  GroupJet j{Mat::Identity(n, n), Mat::Zero(n, n)};
  for (const auto& factor : f.factors()) {
    const Mat x = factor(z);
    const Mat e = lie::matrix_exp(x);
    const Mat einv = lie::matrix_exp(-x);
    // delta(V E) = Ad(E)^{-1} delta(V) + delta(E)
    j.log_derivative = einv * j.log_derivative * e + lie::dexp_left(x, factor.derivative(z));
    j.value = j.value * e;
  }
  return j;
}

Mat log_derivative(const GroupCurrent& f, cplx z) { return jet(f, z).log_derivative; }

MatrixField log_derivative(const GroupCurrent& f) {
  auto self = std::make_shared<const GroupCurrent>(f);
  return MatrixField(f.n(), f.surface(), [self](cplx z) { return log_derivative(*self, z); });
}

MatrixField gauge_act(const MatrixField& alpha, const GroupCurrent& f) {
  if (alpha.n() != f.n()) throw input_error("SizeMismatch", "form and current have different matrix sizes");
  if (!(alpha.surface() == f.surface())) throw input_error("SurfaceMismatch", "form and current live on different surfaces");
  auto g = std::make_shared<const GroupCurrent>(f);
  return MatrixField(f.n(), f.surface(), [alpha, g](cplx z) -> Mat {
    const GroupJet j = jet(*g, z);
    return j.log_derivative + j.value.partialPivLu().solve(alpha(z) * j.value);
  });
}

// ---------------------------------------------------------------------------
// Loops

LoopCurrent::LoopCurrent(int n, int bandwidth)
    : n_(n), bandwidth_(bandwidth), coeffs_(static_cast<size_t>(2 * bandwidth + 1), Mat::Zero(n, n)) {
  if (bandwidth < 0) throw input_error("BadBandwidth", "bandwidth must be >= 0");
}

LoopCurrent::LoopCurrent(std::vector<Mat> coeffs) : n_(0), bandwidth_(0), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() % 2 == 0) throw input_error("BadBandwidth", "need 2M + 1 Fourier coefficients");
  bandwidth_ = static_cast<int>(coeffs_.size() / 2);
  n_ = static_cast<int>(coeffs_.front().rows());
  for (const auto& c : coeffs_) {
    if (c.rows() != n_ || c.cols() != n_) throw input_error("SizeMismatch", "Fourier coefficients differ in size");
    if (std::abs(c.trace()) > lie::kTraceTol * std::max(1.0, c.norm())) {
      throw input_error("NotTraceless", "Fourier coefficient is not traceless");
    }
  }
}

LoopCurrent LoopCurrent::constant(const lie::AlgebraElement& x) { return LoopCurrent(std::vector<Mat>{x.matrix()}); }

Mat LoopCurrent::operator()(double theta) const {
  Mat out = Mat::Zero(n_, n_);
  for (int m = -bandwidth_; m <= bandwidth_; ++m) out += std::polar(1.0, m * theta) * coefficient(m);
  return out;
}

Mat LoopCurrent::derivative(double theta) const {
  Mat out = Mat::Zero(n_, n_);
  for (int m = -bandwidth_; m <= bandwidth_; ++m) out += cplx(0.0, m) * std::polar(1.0, m * theta) * coefficient(m);
  return out;
}

const Mat& LoopCurrent::coefficient(int m) const {
  if (std::abs(m) > bandwidth_) throw input_error("BadFrequency", "frequency outside the bandwidth");
  return coeffs_[static_cast<size_t>(m + bandwidth_)];
}

Mat& LoopCurrent::coefficient(int m) {
  if (std::abs(m) > bandwidth_) throw input_error("BadFrequency", "frequency outside the bandwidth");
  return coeffs_[static_cast<size_t>(m + bandwidth_)];
}

cplx CircleChart::point(double theta) const {
  return circle.center + std::polar(circle.radius, circle.start_angle + circle.orientation * theta);
}

cplx CircleChart::tangent(double theta) const {
  return cplx(0.0, circle.orientation) * std::polar(circle.radius, circle.start_angle + circle.orientation * theta);
}

CircleChart circle_chart(const Contour& c) {
  auto circ = c.as_circle();
  if (!circ) throw input_error("NotACircle", "loop restriction needs a circle contour");
  return CircleChart{*circ};
}

namespace {

template <class Sample>
LoopRestriction fourier(int n, int bandwidth, Sample&& sample) {
  if (bandwidth < 0) throw input_error("BadBandwidth", "bandwidth must be >= 0");
  const int count = 2 * bandwidth + 2;
  std::vector<Mat> values;
  values.reserve(static_cast<size_t>(count));
  for (int k = 0; k < count; ++k) values.push_back(sample(2.0 * kPi * k / count));
  LoopCurrent loop(n, bandwidth);
  double largest = 0.0;
  for (int m = -bandwidth; m <= bandwidth; ++m) {
    Mat c = Mat::Zero(n, n);
    for (int k = 0; k < count; ++k) c += std::polar(1.0, -2.0 * kPi * m * k / count) * values[static_cast<size_t>(k)];
    c /= static_cast<double>(count);
    largest = std::max(largest, c.norm());
    loop.coefficient(m) = c;
  }
  const double top = bandwidth == 0 ? 0.0 : std::max(loop.coefficient(bandwidth).norm(), loop.coefficient(-bandwidth).norm());
  return LoopRestriction{std::move(loop), bandwidth > 0 && top > 1e-8 * largest};
}

void check_avoids_poles(const SurfaceModel& s, const Contour& c) {
  for (cplx p : s.punctures()) {
    if (c.distance_to(p) <= 1e-8) throw input_error("PoleOnContour", "contour passes through a puncture");
  }
}

}  // namespace

LoopRestriction restrict_to_loop(const MatrixField& x, const Contour& circle, int bandwidth) {
  const CircleChart chart = circle_chart(circle);
  check_avoids_poles(x.surface(), circle);
  return fourier(x.n(), bandwidth, [&](double theta) { return x(chart.point(theta)); });
}

LoopRestriction restrict_form_to_loop(const MatrixField& form, const Contour& circle, int bandwidth) {
  const CircleChart chart = circle_chart(circle);
  check_avoids_poles(form.surface(), circle);
  return fourier(form.n(), bandwidth,
                 [&](double theta) -> Mat { return form(chart.point(theta)) * chart.tangent(theta); });
}

GroupLoopRestriction restrict_to_loop(const GroupCurrent& f, const Contour& circle, int bandwidth) {
  const CircleChart chart = circle_chart(circle);
  check_avoids_poles(f.surface(), circle);
  GroupLoopRestriction out;
  const int count = 2 * bandwidth + 2;
  bool log_ok = true;
  std::vector<Mat> logs;
  for (int k = 0; k < count; ++k) {
    const double theta = 2.0 * kPi * k / count;
    out.thetas.push_back(theta);
    out.samples.push_back(f(chart.point(theta)));
    if (!log_ok) continue;
    const Eigen::MatrixXcd sample = out.samples.back();
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(sample, false);
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
      const cplx ev = es.eigenvalues()(i);
      if (std::abs(ev) < 1e-12 || std::abs(std::arg(ev)) > kPi - 1e-6) log_ok = false;
    }
    if (log_ok) {
      Eigen::MatrixXcd l = sample.log();
      logs.push_back(l);
    }
  }
  if (log_ok) {
    auto r = fourier(f.n(), bandwidth, [&](double theta) {
      const int k = static_cast<int>(std::lround(theta * count / (2.0 * kPi))) % count;
      return lie::AlgebraElement::project(logs[static_cast<size_t>(k)]).matrix();
    });
    out.log_fourier = std::move(r.loop);
    out.aliasing_warning = r.aliasing_warning;
  }
  return out;
}

double mc_residual(const OneForm& alpha, std::span<const cplx> samples) {
  double worst = 0.0;
  const cplx i(0.0, 1.0);
  for (cplx z : samples) {
    const Mat a = alpha(z);
    const Mat da = alpha.coefficient.derivative(z);
    // alpha(d/dx) = A, alpha(d/dy) = iA; holomorphy gives d/dx A = A', d/dy A = iA'.
    const Mat ax = a;
    const Mat ay = i * a;
    const Mat d_alpha = i * da - i * da;
    const Mat half_bracket = 0.5 * (lie::commutator(ax, ay) - lie::commutator(ay, ax));
    worst = std::max(worst, (d_alpha + half_bracket).norm());
  }
  return worst;
}

}  // namespace holo
