#pragma once

#include <optional>
#include <string>
#include <vector>

#include "holo/currents.hpp"
#include "holo/lie.hpp"
#include "holo/surface.hpp"
#include "holo/transport.hpp"

namespace holo {

/// lambda d + xi in the smooth dual, paired along the cycle sigma.
struct CoadjointPoint {
  cplx level;
  MatrixField xi;  ///< coefficient of dz
  Contour sigma;

  CoadjointPoint(cplx level, MatrixField xi, Contour sigma);
  CoadjointPoint(cplx level, const OneForm& xi, Contour sigma) : CoadjointPoint(level, xi.field(), std::move(sigma)) {}

  const SurfaceModel& surface() const noexcept { return xi.surface(); }
  int n() const noexcept { return xi.n(); }
};

/// mu k + X in the central extension.
struct CentExtElement {
  cplx central;
  MatrixField x;

  CentExtElement(cplx central, MatrixField x) : central(central), x(std::move(x)) {}
  CentExtElement(cplx central, const AlgebraCurrent& x) : central(central), x(x.field()) {}
};

/// How the actions are normalized.
///   coadjoint: xi -> (lambda_on_delta ? lambda : 1) delta(f) + Ad(f)^{-1} xi
///   adjoint:   mu -> mu + central_sign \oint_sigma kappa(delta(f), X),  X -> Ad(f) X
struct ActionConvention {
  bool lambda_on_delta = true;
  int central_sign = +1;
  friend bool operator==(const ActionConvention&, const ActionConvention&) = default;
};

/// The convention under which pairing(f.D, E) = pairing(D, f.E) holds for every level.
inline constexpr ActionConvention kActionConvention{true, +1};

struct OrbitOptions {
  double transport_tol = kTransportTol;
  /// Relative tolerance for comparing invariants.
  double compare_tol = 1e-6;
  int max_word_len = lie::kDefaultWordLength;
};

/// \oint_sigma kappa(X, dY) with dY from the exact derivative of Y.
cplx cocycle_omega_sigma(const AlgebraCurrent& x, const AlgebraCurrent& y, const Contour& sigma,
                         const quad::Options& q = {});

/// lambda mu + \oint_sigma kappa(xi, X).
cplx pairing(const CoadjointPoint& d, const CentExtElement& e, const quad::Options& q = {});

CoadjointPoint coadjoint_act(const GroupCurrent& f, const CoadjointPoint& d,
                             const ActionConvention& conv = kActionConvention);
CentExtElement adjoint_act(const GroupCurrent& f, const CentExtElement& e, const Contour& sigma,
                           const ActionConvention& conv = kActionConvention, const quad::Options& q = {});

/// |pairing(f.D, E) - pairing(D, f.E)| under the given convention.
double invariance_defect(const GroupCurrent& f, const CoadjointPoint& d, const CentExtElement& e,
                         const ActionConvention& conv, const quad::Options& q = {});

struct CalibrationSample {
  GroupCurrent f;
  CoadjointPoint d;
  CentExtElement e;
};

struct CalibrationOutcome {
  ActionConvention convention;
  /// max defect for each of the four candidate conventions, in the order
  /// (lambda, +1), (lambda, -1), (1, +1), (1, -1).
  std::vector<double> defects;
  bool unique = false;
};

/// Picks the candidate convention whose max invariance defect over the samples is
/// below `accept`; `unique` when exactly one candidate passes.
CalibrationOutcome calibrate_action_convention(const std::vector<CalibrationSample>& samples, double accept = 1e-7);

enum class CompositionOrder {
  Right,    ///< (f1 f2).D = f2.(f1.D)
  Left,     ///< (f1 f2).D = f1.(f2.D)
  Neither,
};
std::string to_string(CompositionOrder o);

struct CompositionReport {
  CompositionOrder order;
  double right_defect, left_defect;
};

/// Evaluates both bracketings at the sample points.
CompositionReport detect_composition_order(const GroupCurrent& f1, const GroupCurrent& f2, const CoadjointPoint& d,
                                           const std::vector<cplx>& samples, double accept = 1e-8);

struct OrbitCertificate {
  cplx level;
  MonodromyTuple tuple;  ///< periods of xi / lambda
  lie::ConjugacyInvariants invariants;
  bool generic = false;
};

OrbitCertificate certificate_from_tuple(cplx level, MonodromyTuple tuple, int max_word_len = lie::kDefaultWordLength);
/// Throws Input/ZeroLevel.
OrbitCertificate classify_orbit(const CoadjointPoint& d, const OrbitOptions& opt = {});
lie::Verdict same_orbit(const CoadjointPoint& d1, const CoadjointPoint& d2, const OrbitOptions& opt = {});
lie::Verdict same_orbit(const OrbitCertificate& c1, const OrbitCertificate& c2, const OrbitOptions& opt = {});

struct StabilizerReport {
  /// max |(f.D).xi - D.xi| over samples on the generator circles
  double action_defect = 0.0;
  bool stabilizes_point = false;
  /// per generator: |g0^{-1} M g0 - M| for the loop monodromy M and g0 = f(start of the circle)
  std::vector<double> loop_defects;
  /// per generator: |M(f.D) - g0^{-1} M g0|, a consistency check of the loop action
  std::vector<double> loop_action_consistency;
  bool stabilizes_loops = false;
};

/// Points used by check_stabilizer: `per_circle` equally spaced points on every generator circle.
std::vector<cplx> generator_circle_samples(const SurfaceModel& s, int per_circle = 16);

StabilizerReport check_stabilizer(const GroupCurrent& f, const CoadjointPoint& d, double tol,
                                  const OrbitOptions& opt = {});

/// \oint_C kappa(xi', [X, Y]) dz by adaptive quadrature.
cplx kks_form(const CoadjointPoint& d, const MatrixField& x, const MatrixField& y, const Contour& c,
              const quad::Options& q = {});
/// Loop-group form 2 pi sum_{a+b+c=0} kappa(xi_a, [X_b, Y_c]) from Fourier coefficients of
/// the restrictions to the circle C (xi pulled back with dz/dtheta).
cplx loop_kks_form(const CoadjointPoint& d, const MatrixField& x, const MatrixField& y, const Contour& c,
                   int bandwidth = 64);

struct Probe {
  bool found = false;
  cplx value;
  int basis_index = -1;
  int power = 0;
  double magnitude = 0.0;
};

/// Searches X = d_i (z - c)^k (d_i the Killing-dual basis, c the center of sigma,
/// |k| <= max_power) with |pairing(D, (0, X))| > threshold.
Probe pairing_probe(const CoadjointPoint& d, double threshold = 1e-6, int max_power = 6);
/// Searches Y = d_i (z - c)^k with |kks_form(D, X, Y, C)| > threshold.
Probe kks_probe(const CoadjointPoint& d, const MatrixField& x, const Contour& c, double threshold = 1e-8,
                int max_power = 6);

}  // namespace holo
