#include "holo/surface.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "holo/error.hpp"

namespace holo {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMinSeparation = 1e-6;
constexpr double kGeneratorRadiusFactor = 0.45;
constexpr double kDetourFactor = 0.3;

double wrap_angle(double a) {
  a = std::fmod(a + kPi, 2.0 * kPi);
  if (a <= 0.0) a += 2.0 * kPi;
  return a - kPi;  // (-pi, pi]
}

}  // namespace

// ---------------------------------------------------------------------------
// SurfaceModel

cplx SurfaceModel::default_basepoint(const std::vector<cplx>& punctures) {
  if (punctures.empty()) return {0.0, 0.0};
  cplx mean = 0.0;
  double diameter = 0.0;
  for (cplx p : punctures) {
    mean += p;
    for (cplx q : punctures) diameter = std::max(diameter, std::abs(p - q));
  }
  mean /= static_cast<double>(punctures.size());
  return mean - cplx(0.0, std::max(1.0, diameter));
}

SurfaceModel::SurfaceModel(std::vector<cplx> punctures)
    : SurfaceModel(punctures, default_basepoint(punctures)) {}

SurfaceModel::SurfaceModel(std::vector<cplx> punctures, cplx basepoint)
    : punctures_(std::move(punctures)), basepoint_(basepoint) {
  if (punctures_.empty()) throw input_error("NoPunctures", "at least one finite puncture is required");
  for (size_t i = 0; i < punctures_.size(); ++i) {
    if (!std::isfinite(punctures_[i].real()) || !std::isfinite(punctures_[i].imag())) {
      throw input_error("NonFinite", "puncture is not finite");
    }
    for (size_t j = i + 1; j < punctures_.size(); ++j) {
      if (std::abs(punctures_[i] - punctures_[j]) <= kMinSeparation) {
        throw input_error("PuncturesTooClose", "punctures " + std::to_string(i) + " and " + std::to_string(j) +
                                                   " are not distinct");
      }
    }
  }
  if (!std::isfinite(basepoint_.real()) || !std::isfinite(basepoint_.imag()) ||
      distance_to_punctures(basepoint_) <= kMinSeparation) {
    throw input_error("BadBasepoint", "basepoint must be finite and away from the punctures");
  }
}

double SurfaceModel::distance_to_punctures(cplx z) const {
  double d = std::numeric_limits<double>::infinity();
  for (cplx p : punctures_) d = std::min(d, std::abs(z - p));
  return d;
}

double SurfaceModel::min_puncture_distance() const {
  double d = distance_to_punctures(basepoint_);
  for (size_t i = 0; i < punctures_.size(); ++i)
    for (size_t j = i + 1; j < punctures_.size(); ++j) d = std::min(d, std::abs(punctures_[i] - punctures_[j]));
  return d;
}

// ---------------------------------------------------------------------------
// Segments and contours

cplx segment_point(const Segment& s, double u) {
  if (const auto* l = std::get_if<LineSegment>(&s)) return l->from + u * (l->to - l->from);
  const auto& a = std::get<ArcSegment>(s);
  return a.center + std::polar(a.radius, a.theta0 + u * (a.theta1 - a.theta0));
}

cplx segment_tangent(const Segment& s, double u) {
  if (const auto* l = std::get_if<LineSegment>(&s)) return l->to - l->from;
  const auto& a = std::get<ArcSegment>(s);
  const double dtheta = a.theta1 - a.theta0;
  return cplx(0.0, dtheta) * std::polar(a.radius, a.theta0 + u * dtheta);
}

double segment_distance(const Segment& s, cplx p) {
  if (const auto* l = std::get_if<LineSegment>(&s)) {
    const cplx d = l->to - l->from;
    const double len2 = std::norm(d);
    double u = len2 > 0.0 ? ((p - l->from) * std::conj(d)).real() / len2 : 0.0;
    u = std::clamp(u, 0.0, 1.0);
    return std::abs(p - (l->from + u * d));
  }
  const auto& a = std::get<ArcSegment>(s);
  const double r = std::abs(p - a.center);
  const double lo = std::min(a.theta0, a.theta1);
  const double span = std::abs(a.theta1 - a.theta0);
  if (r > 0.0) {
    // Angle of p relative to the arc start, measured in the arc's range.
    double rel = std::fmod(std::arg(p - a.center) - lo, 2.0 * kPi);
    if (rel < 0.0) rel += 2.0 * kPi;
    if (rel <= span) return std::abs(r - a.radius);
  } else {
    return a.radius;
  }
  return std::min(std::abs(p - segment_point(s, 0.0)), std::abs(p - segment_point(s, 1.0)));
}

Contour::Contour(std::vector<Segment> segments) : segments_(std::move(segments)) {
  for (size_t i = 0; i + 1 < segments_.size(); ++i) {
    const cplx a = segment_point(segments_[i], 1.0);
    const cplx b = segment_point(segments_[i + 1], 0.0);
    if (std::abs(a - b) > 1e-9 * std::max(1.0, std::abs(a))) {
      throw input_error("DisconnectedContour", "segments " + std::to_string(i) + " and " + std::to_string(i + 1) +
                                                   " do not join");
    }
  }
}

Contour Contour::circle(cplx center, double radius, int orientation, double start_angle) {
  if (!(radius > 0.0)) throw input_error("BadRadius", "circle radius must be positive");
  const double sign = orientation >= 0 ? 1.0 : -1.0;
  return Contour({ArcSegment{center, radius, start_angle, start_angle + sign * 2.0 * kPi}});
}

Contour Contour::line(cplx from, cplx to) { return Contour({LineSegment{from, to}}); }

cplx Contour::start() const {
  if (segments_.empty()) throw input_error("EmptyContour", "contour has no segments");
  return segment_point(segments_.front(), 0.0);
}

cplx Contour::end() const {
  if (segments_.empty()) throw input_error("EmptyContour", "contour has no segments");
  return segment_point(segments_.back(), 1.0);
}

bool Contour::is_closed() const {
  if (segments_.empty()) return false;
  const cplx a = start();
  return std::abs(a - end()) <= 1e-12 * std::max(1.0, std::abs(a));
}

namespace {

std::pair<size_t, double> locate(size_t count, double t) {
  const double scaled = std::clamp(t, 0.0, 1.0) * static_cast<double>(count);
  size_t idx = std::min(static_cast<size_t>(scaled), count - 1);
  return {idx, scaled - static_cast<double>(idx)};
}

}  // namespace

cplx Contour::point(double t) const {
  if (t >= 1.0 && is_closed()) return start();
  const auto [idx, u] = locate(segments_.size(), t);
  return segment_point(segments_[idx], u);
}

cplx Contour::derivative(double t) const {
  const auto [idx, u] = locate(segments_.size(), t);
  return static_cast<double>(segments_.size()) * segment_tangent(segments_[idx], u);
}

Contour Contour::reversed() const {
  std::vector<Segment> out;
  for (auto it = segments_.rbegin(); it != segments_.rend(); ++it) {
    if (const auto* l = std::get_if<LineSegment>(&*it)) {
      out.emplace_back(LineSegment{l->to, l->from});
    } else {
      const auto& a = std::get<ArcSegment>(*it);
      out.emplace_back(ArcSegment{a.center, a.radius, a.theta1, a.theta0});
    }
  }
  return Contour(std::move(out));
}

Contour Contour::then(const Contour& next) const {
  std::vector<Segment> out = segments_;
  out.insert(out.end(), next.segments_.begin(), next.segments_.end());
  return Contour(std::move(out));
}

double Contour::distance_to(cplx p) const {
  double d = std::numeric_limits<double>::infinity();
  for (const auto& s : segments_) d = std::min(d, segment_distance(s, p));
  return d;
}

std::optional<Contour::Circle> Contour::as_circle() const {
  if (segments_.size() != 1) return std::nullopt;
  const auto* a = std::get_if<ArcSegment>(&segments_.front());
  if (a == nullptr || std::abs(std::abs(a->theta1 - a->theta0) - 2.0 * kPi) > 1e-12) return std::nullopt;
  return Circle{a->center, a->radius, a->theta1 > a->theta0 ? 1 : -1, a->theta0};
}

// ---------------------------------------------------------------------------
// Generators and paths

double generator_radius(const SurfaceModel& s, int j) {
  const auto& p = s.punctures();
  if (j < 0 || j >= s.ell()) throw input_error("BadGeneratorIndex", "generator index out of range");
  double d = std::abs(s.basepoint() - p[static_cast<size_t>(j)]);
  for (size_t i = 0; i < p.size(); ++i)
    if (static_cast<int>(i) != j) d = std::min(d, std::abs(p[i] - p[static_cast<size_t>(j)]));
  return kGeneratorRadiusFactor * d;
}

std::vector<Contour> canonical_generators(const SurfaceModel& s) {
  std::vector<Contour> out;
  for (int j = 0; j < s.ell(); ++j) {
    const cplx p = s.punctures()[static_cast<size_t>(j)];
    out.push_back(Contour::circle(p, generator_radius(s, j), 1, std::arg(s.basepoint() - p)));
  }
  return out;
}

Contour standard_path(const SurfaceModel& s, cplx from, cplx to) {
  const double base_radius = kDetourFactor * s.min_puncture_distance();
  const cplx dir = to - from;
  const double len = std::abs(dir);
  if (len == 0.0) return Contour({LineSegment{from, to}});
  const cplx u = dir / len;

  struct Detour {
    double enter, exit;
    cplx center;
    double radius, side_angle;
  };
  std::vector<Detour> detours;
  for (cplx p : s.punctures()) {
    const double radius = std::min({base_radius, 0.5 * std::abs(from - p), 0.5 * std::abs(to - p)});
    const cplx local = (p - from) * std::conj(u);  // p in the frame where the path runs along +x
    const double foot = local.real();
    const double off = std::abs(local.imag());
    if (foot <= 0.0 || foot >= len || off >= radius) continue;
    const double half = std::sqrt(radius * radius - off * off);
    // Pass on the side where the segment runs; straight through a puncture passes on the right.
    const cplx foot_point = from + foot * u;
    const double side = off > 0.0 ? std::arg(foot_point - p) : std::arg(cplx(0.0, -1.0) * u);
    detours.push_back({foot - half, foot + half, p, radius, side});
  }
  std::sort(detours.begin(), detours.end(), [](const Detour& a, const Detour& b) { return a.enter < b.enter; });

  std::vector<Segment> segs;
  cplx cursor = from;
  for (const auto& d : detours) {
    const cplx enter = from + d.enter * u;
    const cplx exit = from + d.exit * u;
    if (std::abs(enter - cursor) > 0.0) segs.emplace_back(LineSegment{cursor, enter});
    const double t0 = std::arg(enter - d.center);
    double delta = wrap_angle(std::arg(exit - d.center) - t0);
    if (std::abs(wrap_angle(t0 + 0.5 * delta - d.side_angle)) > 0.5 * kPi) {
      delta -= (delta >= 0.0 ? 2.0 : -2.0) * kPi;
    }
    segs.emplace_back(ArcSegment{d.center, d.radius, t0, t0 + delta});
    cursor = segment_point(segs.back(), 1.0);
  }
  segs.emplace_back(LineSegment{cursor, to});
  return Contour(std::move(segs));
}

Contour generator_loop(const SurfaceModel& s, int j) {
  const Contour circle = canonical_generators(s).at(static_cast<size_t>(j));
  const Contour tail = standard_path(s, s.basepoint(), circle.start());
  return tail.then(circle).then(tail.reversed());
}

Contour word_loop(const SurfaceModel& s, const std::vector<int>& word) {
  std::vector<Segment> segs;
  for (int letter : word) {
    const int j = letter >= 0 ? letter : -letter - 1;
    if (j >= s.ell()) throw input_error("BadGeneratorIndex", "word letter out of range");
    const Contour loop = letter >= 0 ? generator_loop(s, j) : generator_loop(s, j).reversed();
    segs.insert(segs.end(), loop.segments().begin(), loop.segments().end());
  }
  if (segs.empty()) return Contour::line(s.basepoint(), s.basepoint());
  return Contour(std::move(segs));
}

int winding_number(const Contour& c, cplx p, const quad::Options& opt) {
  if (!c.is_closed()) throw input_error("OpenContour", "winding number needs a closed contour");
  if (c.distance_to(p) <= 1e-8) throw numerical_error("NonIntegerWinding", "contour passes through the point");
  const cplx v = integrate_along(c, [p](cplx z) { return 1.0 / (z - p); }, opt) / cplx(0.0, 2.0 * kPi);
  const double rounded = std::round(v.real());
  if (std::abs(v - cplx(rounded, 0.0)) > 1e-6) {
    throw numerical_error("NonIntegerWinding", "winding integral " + std::to_string(v.real()) + " is not an integer");
  }
  return static_cast<int>(rounded);
}

std::vector<RationalFunction> basis_one_forms(const SurfaceModel& s) {
  std::vector<RationalFunction> out;
  for (cplx p : s.punctures()) out.push_back(RationalFunction::pole(p, 1));
  return out;
}

Eigen::VectorXcd periods(const SurfaceModel& s, const RationalFunction& f, const quad::Options& opt) {
  const auto gens = canonical_generators(s);
  Eigen::VectorXcd y(s.ell());
  for (int i = 0; i < s.ell(); ++i) {
    y(i) = integrate_along(gens[static_cast<size_t>(i)], [&f](cplx z) { return f(z); }, opt) / cplx(0.0, 2.0 * kPi);
  }
  return y;
}

Eigen::MatrixXcd period_matrix(const SurfaceModel& s, const quad::Options& opt) {
  const auto forms = basis_one_forms(s);
  Eigen::MatrixXcd m(s.ell(), s.ell());
  for (int j = 0; j < s.ell(); ++j) m.col(j) = periods(s, forms[static_cast<size_t>(j)], opt);
  return m;
}

RationalFunction form_from_periods(const SurfaceModel& s, const Eigen::VectorXcd& y) {
  if (y.size() != s.ell()) throw input_error("SizeMismatch", "period vector length must equal ell");
  RationalFunction f;
  for (int j = 0; j < s.ell(); ++j) f = f + RationalFunction::pole(s.punctures()[static_cast<size_t>(j)], 1, y(j));
  return f;
}

// ---------------------------------------------------------------------------
// Charts

namespace {

bool puncture_free(const SurfaceModel& s, const Disc& d) {
  return s.distance_to_punctures(d.center) > d.radius;
}

}  // namespace

ChartCover chart_cover(const SurfaceModel& s, const Region& region, int count) {
  if (const auto* disc = std::get_if<Disc>(&region)) {
    if (!(disc->radius > 0.0) || !puncture_free(s, *disc)) {
      throw input_error("RegionNearPuncture", "disc region contains a puncture");
    }
    return ChartCover{{*disc}, false};
  }
  const auto& ann = std::get<Annulus>(region);
  if (!(ann.inner > 0.0) || !(ann.outer > ann.inner)) throw input_error("BadRegion", "annulus radii must satisfy 0 < inner < outer");
  if (count != 0 && count < 3) throw input_error("BadChartCount", "an annulus cover needs at least 3 charts");
  for (cplx p : s.punctures()) {
    const double r = std::abs(p - ann.center);
    if (r >= ann.inner && r <= ann.outer) throw input_error("RegionNearPuncture", "annulus contains a puncture");
  }
  const double mid = 0.5 * (ann.inner + ann.outer);
  const int first = count ? count : 4;
  const int last = count ? count : 256;
  for (int charts = first; charts <= last; ++charts) {
    const double phi = kPi / charts;
    // Farthest point of the annulus sector from its chart center.
    const double far = std::max(std::sqrt(ann.outer * ann.outer + mid * mid - 2.0 * ann.outer * mid * std::cos(phi)),
                                std::sqrt(ann.inner * ann.inner + mid * mid - 2.0 * ann.inner * mid * std::cos(phi)));
    // Neighbouring centers must lie in each chart so consecutive triples meet.
    const double radius = std::max(1.15 * far, 2.0 * mid * std::sin(phi) / 0.9);
    ChartCover cover;
    cover.cyclic = true;
    bool ok = true;
    for (int i = 0; i < charts && ok; ++i) {
      Disc d{ann.center + std::polar(mid, 2.0 * phi * i), radius};
      ok = s.distance_to_punctures(d.center) > radius * 1.0001;
      cover.charts.push_back(d);
    }
    if (ok) return cover;
  }
  throw input_error("RegionNearPuncture", "no puncture-free cover of the annulus was found");
}

std::vector<cplx> overlap_samples(const std::vector<Disc>& discs, int min_count, double margin_fraction) {
  if (discs.empty()) return {};
  double rmin = discs.front().radius;
  for (const auto& d : discs) rmin = std::min(rmin, d.radius);
  const double margin = margin_fraction * rmin;
  const Disc& host = discs.front();
  for (int grid = 7; grid <= 81; grid = 2 * grid + 1) {
    std::vector<cplx> out;
    for (int a = 0; a < grid; ++a) {
      for (int b = 0; b < grid; ++b) {
        const double x = -1.0 + 2.0 * (a + 0.5) / grid;
        const double y = -1.0 + 2.0 * (b + 0.5) / grid;
        const cplx z = host.center + host.radius * cplx(x, y);
        if (std::all_of(discs.begin(), discs.end(), [&](const Disc& d) { return d.contains(z, margin); })) {
          out.push_back(z);
        }
      }
    }
    if (static_cast<int>(out.size()) >= min_count) return out;
  }
  return {};
}

}  // namespace holo
