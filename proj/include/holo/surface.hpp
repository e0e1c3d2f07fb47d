#pragma once

#include <complex>
#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "holo/quadrature.hpp"
#include "holo/rational.hpp"

namespace holo {

/// Genus-0 surface: the Riemann sphere minus the finite punctures and infinity.
class SurfaceModel {
 public:
  /// Uses default_basepoint(punctures).
  explicit SurfaceModel(std::vector<cplx> punctures);
  SurfaceModel(std::vector<cplx> punctures, cplx basepoint);

  /// Below the punctures' centroid by max(1, diameter).
  static cplx default_basepoint(const std::vector<cplx>& punctures);

  const std::vector<cplx>& punctures() const noexcept { return punctures_; }
  cplx basepoint() const noexcept { return basepoint_; }
  /// First Betti number: number of finite punctures.
  int ell() const noexcept { return static_cast<int>(punctures_.size()); }
  /// Total number of punctures including infinity.
  int k() const noexcept { return ell() + 1; }

  /// Smallest distance among the finite punctures and the basepoint.
  double min_puncture_distance() const;
  double distance_to_punctures(cplx z) const;

  friend bool operator==(const SurfaceModel&, const SurfaceModel&) = default;

 private:
  std::vector<cplx> punctures_;
  cplx basepoint_;
};

struct LineSegment {
  cplx from, to;
};

/// Arc of the circle |z - center| = radius from angle theta0 to theta1
/// (counter-clockwise when theta1 > theta0).
struct ArcSegment {
  cplx center;
  double radius;
  double theta0, theta1;
};

using Segment = std::variant<LineSegment, ArcSegment>;

cplx segment_point(const Segment& s, double u);
cplx segment_tangent(const Segment& s, double u);
double segment_distance(const Segment& s, cplx p);

/// Piecewise-smooth path; each segment is parametrized on its own [0, 1] and the
/// global parameter t in [0, 1] gives every segment an equal share.
class Contour {
 public:
  Contour() = default;
  /// Consecutive segments must join within 1e-9.
  explicit Contour(std::vector<Segment> segments);

  /// Full circle starting at center + radius e^{i start_angle}.
  static Contour circle(cplx center, double radius, int orientation = 1, double start_angle = 0.0);
  static Contour line(cplx from, cplx to);

  const std::vector<Segment>& segments() const noexcept { return segments_; }
  bool empty() const noexcept { return segments_.empty(); }

  cplx start() const;
  cplx end() const;
  bool is_closed() const;
  /// z(t); returns start() exactly at t = 1 for closed contours.
  cplx point(double t) const;
  cplx derivative(double t) const;

  Contour reversed() const;
  /// This path followed by `next`.
  Contour then(const Contour& next) const;
  double distance_to(cplx p) const;

  struct Circle {
    cplx center;
    double radius;
    int orientation;
    double start_angle;
  };
  /// Set when the contour is a single full circle.
  std::optional<Circle> as_circle() const;

 private:
  std::vector<Segment> segments_;
};

/// Integral of f(z) dz along the contour.
template <class F>
auto integrate_along(const Contour& c, F&& f, const quad::Options& opt = {}) -> decltype(f(cplx{})) {
  using T = decltype(f(cplx{}));
  std::optional<T> total;
  for (const auto& seg : c.segments()) {
    T part = quad::integrate([&](double u) { return T(f(segment_point(seg, u)) * segment_tangent(seg, u)); }, 0.0, 1.0, opt);
    if (total) *total += part;
    else total = std::move(part);
  }
  if (!total) throw input_error("EmptyContour", "cannot integrate over an empty contour");
  return *total;
}

/// Radius of the j-th generator circle: 0.45 times the distance from p_j to the
/// nearest other puncture or the basepoint.
double generator_radius(const SurfaceModel& s, int j);

/// Positively oriented circles around each finite puncture, each starting at its
/// point closest to the basepoint.
std::vector<Contour> canonical_generators(const SurfaceModel& s);

/// Straight segment from `from` to `to` with circular detours of radius
/// 0.3 * min_puncture_distance around punctures it passes too close to.
Contour standard_path(const SurfaceModel& s, cplx from, cplx to);

/// Basepoint -> generator circle j -> basepoint.
Contour generator_loop(const SurfaceModel& s, int j);
/// Concatenated generator loops; index i >= 0 is alpha_i, a negative index -(i+1)
/// is alpha_i traversed backwards.
Contour word_loop(const SurfaceModel& s, const std::vector<int>& word);

/// Rounded (1/2 pi i) \oint dz/(z - p). Throws Numerical/NonIntegerWinding when the
/// value is more than 1e-6 from an integer.
int winding_number(const Contour& c, cplx p, const quad::Options& opt = {});

/// dz/(z - p_j), j = 1..ell (as coefficient functions of dz).
std::vector<RationalFunction> basis_one_forms(const SurfaceModel& s);
/// Normalized periods (1/2 pi i) \oint_{alpha_i} f dz over the canonical generators.
Eigen::VectorXcd periods(const SurfaceModel& s, const RationalFunction& f, const quad::Options& opt = {});
/// P_ij = normalized period of basis form j over generator i.
Eigen::MatrixXcd period_matrix(const SurfaceModel& s, const quad::Options& opt = {});
/// Inverse of the period map: sum_j y_j dz/(z - p_j).
RationalFunction form_from_periods(const SurfaceModel& s, const Eigen::VectorXcd& y);

struct Disc {
  cplx center;
  double radius;
  bool contains(cplx z, double margin = 0.0) const { return std::abs(z - center) < radius - margin; }
};

struct Annulus {
  cplx center;
  double inner, outer;
};

using Region = std::variant<Annulus, Disc>;

struct ChartCover {
  std::vector<Disc> charts;
  /// Charts are arranged cyclically around an annulus (chart i overlaps i+1 mod N).
  bool cyclic = false;
};

/// Overlapping puncture-free discs covering the region; for an annulus, `count`
/// charts on the mid-circle (0 picks the smallest count that works). Consecutive
/// triples of charts share a common overlap. Throws Input/RegionNearPuncture.
ChartCover chart_cover(const SurfaceModel& s, const Region& region, int count = 0);

/// Deterministic grid search for points in the common intersection of the discs,
/// at least `margin_fraction` of the smallest radius inside every disc.
std::vector<cplx> overlap_samples(const std::vector<Disc>& discs, int min_count = 4, double margin_fraction = 0.05);

}  // namespace holo
