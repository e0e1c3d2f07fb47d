#pragma once

#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "holo/currents.hpp"
#include "holo/lie.hpp"
#include "holo/quadrature.hpp"
#include "holo/surface.hpp"

namespace holo {

inline constexpr double kTransportTol = 1e-9;
/// Paths closer than this to a puncture are rejected with PoleOnPath.
inline constexpr double kPoleClearance = 1e-8;

struct TransportResult {
  lie::GroupElement endpoint;
  double estimated_error = 0.0;
  int steps = 0;
};

/// Solves g' = g xi(c(t)) c'(t), g(0) = I, along the contour.
/// Errors: Input/PoleOnPath, Numerical/ToleranceNotMet.
TransportResult evolve(const MatrixField& xi, const Contour& path, double tol = kTransportTol);
inline TransportResult evolve(const OneForm& xi, const Contour& path, double tol = kTransportTol) {
  return evolve(xi.field(), path, tol);
}

struct MonodromyTuple {
  std::vector<lie::GroupElement> entries;
  cplx basepoint;
  std::vector<TransportResult> diagnostics;
};

/// Content digest of (form, surface, tol); keys the period-map cache.
std::string form_digest(const OneForm& xi, double tol);

/// Thread-safe memo of period maps.
class TransportCache {
 public:
  std::optional<MonodromyTuple> find(const std::string& key) const;
  void insert(const std::string& key, MonodromyTuple value);
  size_t size() const;
  int hits() const;

 private:
  mutable std::mutex mu_;
  std::map<std::string, MonodromyTuple> entries_;
  mutable int hits_ = 0;
};

/// Transport along each canonical generator loop (segment, circle, segment back).
MonodromyTuple period_map(const MatrixField& xi, double tol = kTransportTol);
MonodromyTuple period_map(const OneForm& xi, double tol = kTransportTol, TransportCache* cache = nullptr);

/// Transport along word_loop(surface, word).
lie::GroupElement transport_word(const MatrixField& xi, const std::vector<int>& word, double tol = kTransportTol);
/// Product of tuple entries along the word (negative letters use inverses).
lie::GroupElement word_product(const MonodromyTuple& t, const std::vector<int>& word);

double distance_from_identity(const lie::GroupElement& g);

/// f(z) = transport of xi from the basepoint to z along standard_path.
class Primitive {
 public:
  Primitive(MatrixField xi, double tol) : xi_(std::move(xi)), tol_(tol) {}

  lie::GroupElement operator()(cplx z) const;
  /// Transport along an explicit path from the basepoint to its end.
  lie::GroupElement along(const Contour& path) const;
  /// Coefficient of dz in f^{-1} df at z, by Cauchy-integral differentiation of
  /// independent evaluations of f on a small circle.
  Mat delta(cplx z, int nodes = 16) const;

  const SurfaceModel& surface() const noexcept { return xi_.surface(); }
  double tol() const noexcept { return tol_; }

 private:
  MatrixField xi_;
  double tol_;
};

/// Monodromy entries farther than this from I (in units of tol) count as non-trivial.
inline constexpr double kTrivialMonodromyFactor = 1000.0;

/// Checks the period map first. Throws Mathematical/NonTrivialMonodromy naming the
/// generator and its distance from the identity.
Primitive integrate_form(const MatrixField& xi, double tol = kTransportTol);
inline Primitive integrate_form(const OneForm& xi, double tol = kTransportTol) {
  return integrate_form(xi.field(), tol);
}

struct FrenkelResult {
  std::vector<double> thetas;
  std::vector<Mat> path;
  lie::GroupElement monodromy;
  /// max over 8 sample angles of |z(theta + 2 pi) - z(theta) z(2 pi)|.
  double quasi_periodicity = 0.0;
  double estimated_error = 0.0;
  int steps = 0;
};

/// Solves z' = -(1/lambda) X(theta) z, z(0) = I over [0, 2 pi] and continues to
/// 4 pi for the quasi-periodicity check. Throws Input/ZeroLevel for lambda = 0.
FrenkelResult frenkel_monodromy(const std::function<Mat(double)>& x, int n, cplx lambda, double tol = kTransportTol,
                                int path_samples = 64);
FrenkelResult frenkel_monodromy(const LoopCurrent& x, cplx lambda, double tol = kTransportTol, int path_samples = 64);

struct ChartTransition {
  int i = 0, j = 0;
  /// Mean of h_i h_j^{-1} over the overlap samples.
  Mat mean;
  /// max deviation of the samples from the mean
  double deviation = 0.0;
  int samples = 0;
};

struct TransitionReport {
  cplx lambda;
  std::vector<Disc> charts;
  bool cyclic = false;
  /// psi_i at the overlap sample points, per chart: (z, psi_i(z)).
  std::vector<std::vector<std::pair<cplx, Mat>>> psi_samples;
  std::vector<ChartTransition> transitions;
  double max_deviation = 0.0;
  /// max |phi_ij phi_jk phi_ki - I| over triples with a common overlap.
  double cech_defect = 0.0;
  int triples = 0;
};

/// h_i = psi_i^{-1} solves h' = h xi/lambda from the chart center; the transition
/// functions phi_ij = psi_i^{-1} psi_j = h_i h_j^{-1} are sampled on overlaps.
TransitionReport transition_functions(cplx lambda, const MatrixField& xi, const ChartCover& cover,
                                      double tol = kTransportTol);

/// Ordered product phi_01 phi_12 ... phi_{N-1,0} around a cyclic cover: the
/// monodromy of xi/lambda around the annulus, based at the first chart center.
lie::GroupElement cech_holonomy(const TransitionReport& report);

/// \oint of a matrix- or scalar-valued integrand along the contour.
template <class F>
auto contour_integral(F&& integrand, const Contour& c, double tol = quad::kDefaultTol, int order = quad::kDefaultOrder) {
  return integrate_along(c, std::forward<F>(integrand), quad::Options{order, tol, 40});
}

}  // namespace holo
