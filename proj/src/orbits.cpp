#include "holo/orbits.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>

namespace holo {

namespace {

constexpr double kPi = std::numbers::pi;

double max_abs(const Mat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

void require_compatible(const SurfaceModel& a, const SurfaceModel& b, int na, int nb) {
  if (na != nb) throw input_error("SizeMismatch", "objects have different matrix sizes");
  if (!(a == b)) throw input_error("SurfaceMismatch", "objects live on different surfaces");
}

void require_level(cplx level) {
  if (level == 0.0) throw input_error("ZeroLevel", "level must be nonzero");
}

cplx integrate_scalar(const Contour& c, const std::function<cplx(cplx)>& f, const quad::Options& q) {
  return integrate_along(c, f, q);
}

/// d_i (z - c)^k as a field.
MatrixField probe_field(const SurfaceModel& s, const Mat& basis, cplx center, int power) {
  return MatrixField(static_cast<int>(basis.rows()), s,
                     [basis, center, power](cplx z) -> Mat { return basis * std::pow(z - center, power); });
}

cplx contour_center(const Contour& c) {
  if (auto circ = c.as_circle()) return circ->center;
  return c.start();
}

}  // namespace

CoadjointPoint::CoadjointPoint(cplx level, MatrixField xi, Contour sigma)
    : level(level), xi(std::move(xi)), sigma(std::move(sigma)) {
  if (!this->sigma.is_closed()) throw input_error("OpenCycle", "sigma must be a closed contour");
}

cplx cocycle_omega_sigma(const AlgebraCurrent& x, const AlgebraCurrent& y, const Contour& sigma, const quad::Options& q) {
  require_compatible(x.surface(), y.surface(), x.n(), y.n());
  return integrate_scalar(sigma, [&](cplx z) { return lie::killing_form(x(z), y.derivative(z)); }, q);
}

cplx pairing(const CoadjointPoint& d, const CentExtElement& e, const quad::Options& q) {
  require_compatible(d.surface(), e.x.surface(), d.n(), e.x.n());
  return d.level * e.central +
         integrate_scalar(d.sigma, [&](cplx z) { return lie::killing_form(d.xi(z), e.x(z)); }, q);
}

CoadjointPoint coadjoint_act(const GroupCurrent& f, const CoadjointPoint& d, const ActionConvention& conv) {
  require_compatible(f.surface(), d.surface(), f.n(), d.n());
  auto g = std::make_shared<const GroupCurrent>(f);
  const cplx weight = conv.lambda_on_delta ? d.level : cplx(1.0);
  MatrixField xi = d.xi;
  MatrixField acted(d.n(), d.surface(), [g, xi, weight](cplx z) -> Mat {
    const GroupJet j = jet(*g, z);
    return weight * j.log_derivative + j.value.partialPivLu().solve(xi(z) * j.value);
  });
  return CoadjointPoint(d.level, std::move(acted), d.sigma);
}

CentExtElement adjoint_act(const GroupCurrent& f, const CentExtElement& e, const Contour& sigma,
                           const ActionConvention& conv, const quad::Options& q) {
  require_compatible(f.surface(), e.x.surface(), f.n(), e.x.n());
  const cplx shift =
      integrate_scalar(sigma, [&](cplx z) { return lie::killing_form(log_derivative(f, z), e.x(z)); }, q);
  auto g = std::make_shared<const GroupCurrent>(f);
  MatrixField x = e.x;
  MatrixField moved(e.x.n(), e.x.surface(), [g, x](cplx z) -> Mat {
    const Mat v = (*g)(z);
    return v * x(z) * v.inverse();
  });
  return CentExtElement(e.central + static_cast<double>(conv.central_sign) * shift, std::move(moved));
}

double invariance_defect(const GroupCurrent& f, const CoadjointPoint& d, const CentExtElement& e,
                         const ActionConvention& conv, const quad::Options& q) {
  const cplx lhs = pairing(coadjoint_act(f, d, conv), e, q);
  const cplx rhs = pairing(d, adjoint_act(f, e, d.sigma, conv, q), q);
  return std::abs(lhs - rhs);
}

CalibrationOutcome calibrate_action_convention(const std::vector<CalibrationSample>& samples, double accept) {
  const std::vector<ActionConvention> candidates{{true, +1}, {true, -1}, {false, +1}, {false, -1}};
  CalibrationOutcome out{kActionConvention, {}, false};
  int passing = 0;
  double best = INFINITY;
  for (const auto& conv : candidates) {
    double worst = 0.0;
    for (const auto& s : samples) worst = std::max(worst, invariance_defect(s.f, s.d, s.e, conv));
    out.defects.push_back(worst);
    if (worst <= accept) ++passing;
    if (worst < best) {
      best = worst;
      out.convention = conv;
    }
  }
  out.unique = passing == 1;
  return out;
}

std::string to_string(CompositionOrder o) {
  switch (o) {
    case CompositionOrder::Right: return "right";
    case CompositionOrder::Left: return "left";
    case CompositionOrder::Neither: return "neither";
  }
  return "neither";
}

CompositionReport detect_composition_order(const GroupCurrent& f1, const GroupCurrent& f2, const CoadjointPoint& d,
                                           const std::vector<cplx>& samples, double accept) {
  const CoadjointPoint prod = coadjoint_act(f1 * f2, d);
  const CoadjointPoint right = coadjoint_act(f2, coadjoint_act(f1, d));
  const CoadjointPoint left = coadjoint_act(f1, coadjoint_act(f2, d));
  CompositionReport rep{CompositionOrder::Neither, 0.0, 0.0};
  for (cplx z : samples) {
    const Mat p = prod.xi(z);
    const double scale = std::max(1.0, max_abs(p));
    rep.right_defect = std::max(rep.right_defect, max_abs(p - right.xi(z)) / scale);
    rep.left_defect = std::max(rep.left_defect, max_abs(p - left.xi(z)) / scale);
  }
  if (rep.right_defect <= accept && rep.left_defect > accept) rep.order = CompositionOrder::Right;
  else if (rep.left_defect <= accept && rep.right_defect > accept) rep.order = CompositionOrder::Left;
  return rep;
}

OrbitCertificate certificate_from_tuple(cplx level, MonodromyTuple tuple, int max_word_len) {
  OrbitCertificate cert;
  cert.level = level;
  cert.tuple = std::move(tuple);
  cert.invariants = lie::trace_word_invariants(cert.tuple.entries, max_word_len);
  cert.generic = lie::is_generic_tuple(cert.tuple.entries);
  return cert;
}

OrbitCertificate classify_orbit(const CoadjointPoint& d, const OrbitOptions& opt) {
  require_level(d.level);
  return certificate_from_tuple(d.level, period_map(d.xi.scaled(1.0 / d.level), opt.transport_tol), opt.max_word_len);
}

lie::Verdict same_orbit(const OrbitCertificate& c1, const OrbitCertificate& c2, const OrbitOptions& opt) {
  if (std::abs(c1.level - c2.level) > opt.compare_tol * std::max({1.0, std::abs(c1.level), std::abs(c2.level)})) {
    return lie::Verdict::Distinct;
  }
  return lie::simultaneous_conjugacy_test(c1.tuple.entries, c2.tuple.entries, opt.compare_tol, opt.max_word_len);
}

lie::Verdict same_orbit(const CoadjointPoint& d1, const CoadjointPoint& d2, const OrbitOptions& opt) {
  require_level(d1.level);
  require_level(d2.level);
  if (std::abs(d1.level - d2.level) > opt.compare_tol * std::max({1.0, std::abs(d1.level), std::abs(d2.level)})) {
    return lie::Verdict::Distinct;
  }
  return same_orbit(classify_orbit(d1, opt), classify_orbit(d2, opt), opt);
}

std::vector<cplx> generator_circle_samples(const SurfaceModel& s, int per_circle) {
  std::vector<cplx> out;
  for (const auto& c : canonical_generators(s)) {
    for (int k = 0; k < per_circle; ++k) out.push_back(c.point(static_cast<double>(k) / per_circle));
  }
  return out;
}

StabilizerReport check_stabilizer(const GroupCurrent& f, const CoadjointPoint& d, double tol, const OrbitOptions& opt) {
  require_level(d.level);
  require_compatible(f.surface(), d.surface(), f.n(), d.n());
  StabilizerReport rep;
  const CoadjointPoint acted = coadjoint_act(f, d);
  for (cplx z : generator_circle_samples(d.surface())) {
    const Mat v = d.xi(z);
    rep.action_defect = std::max(rep.action_defect, max_abs(acted.xi(z) - v) / std::max(1.0, max_abs(v)));
  }
  rep.stabilizes_point = rep.action_defect <= tol;

  rep.stabilizes_loops = true;
  for (const auto& circle : canonical_generators(d.surface())) {
    const CircleChart chart = circle_chart(circle);
    auto pulled = [&chart](const MatrixField& xi) {
      return [&chart, xi](double th) -> Mat { return xi(chart.point(th)) * chart.tangent(th); };
    };
    const Mat m = frenkel_monodromy(pulled(d.xi), d.n(), d.level, opt.transport_tol).monodromy.matrix();
    const Mat m_acted = frenkel_monodromy(pulled(acted.xi), d.n(), d.level, opt.transport_tol).monodromy.matrix();
    const Mat g0 = f(chart.point(0.0));
    const Mat conj = g0.inverse() * m * g0;
    const double scale = std::max(1.0, max_abs(m));
    rep.loop_defects.push_back(max_abs(conj - m) / scale);
    rep.loop_action_consistency.push_back(max_abs(m_acted - conj) / scale);
    if (rep.loop_defects.back() > tol) rep.stabilizes_loops = false;
  }
  return rep;
}

cplx kks_form(const CoadjointPoint& d, const MatrixField& x, const MatrixField& y, const Contour& c, const quad::Options& q) {
  require_compatible(d.surface(), x.surface(), d.n(), x.n());
  require_compatible(d.surface(), y.surface(), d.n(), y.n());
  return integrate_scalar(c, [&](cplx z) { return lie::killing_form(d.xi(z), lie::commutator(x(z), y(z))); }, q);
}

cplx loop_kks_form(const CoadjointPoint& d, const MatrixField& x, const MatrixField& y, const Contour& c,
                   int bandwidth) {
  const LoopCurrent xi = restrict_form_to_loop(d.xi, c, bandwidth).loop;
  const LoopCurrent xl = restrict_to_loop(x, c, bandwidth).loop;
  const LoopCurrent yl = restrict_to_loop(y, c, bandwidth).loop;
  const int n = d.n();
  const int M = bandwidth;
  // W_m = sum_{b + c = m} [X_b, Y_c], only |m| <= M is needed.
  std::vector<Mat> w(static_cast<size_t>(2 * M + 1), Mat::Zero(n, n));
  for (int b = -M; b <= M; ++b) {
    for (int cc = std::max(-M, -M - b); cc <= std::min(M, M - b); ++cc) {
      w[static_cast<size_t>(b + cc + M)] += lie::commutator(xl.coefficient(b), yl.coefficient(cc));
    }
  }
  cplx total = 0.0;
  for (int a = -M; a <= M; ++a) total += lie::killing_form(xi.coefficient(a), w[static_cast<size_t>(-a + M)]);
  return 2.0 * kPi * total;
}

Probe pairing_probe(const CoadjointPoint& d, double threshold, int max_power) {
  Probe best;
  const auto dual = lie::killing_dual_basis(d.n());
  const cplx center = contour_center(d.sigma);
  for (int k = -max_power; k <= max_power; ++k) {
    for (size_t i = 0; i < dual.size(); ++i) {
      const CentExtElement e(0.0, probe_field(d.surface(), dual[i], center, k));
      const cplx v = pairing(d, e);
      if (std::abs(v) > best.magnitude) best = Probe{false, v, static_cast<int>(i), k, std::abs(v)};
      if (best.magnitude > threshold) {
        best.found = true;
        return best;
      }
    }
  }
  return best;
}

Probe kks_probe(const CoadjointPoint& d, const MatrixField& x, const Contour& c, double threshold, int max_power) {
  Probe best;
  const auto dual = lie::killing_dual_basis(d.n());
  const cplx center = contour_center(c);
  for (int k = -max_power; k <= max_power; ++k) {
    for (size_t i = 0; i < dual.size(); ++i) {
      const cplx v = kks_form(d, x, probe_field(d.surface(), dual[i], center, k), c);
      if (std::abs(v) > best.magnitude) best = Probe{false, v, static_cast<int>(i), k, std::abs(v)};
      if (best.magnitude > threshold) {
        best.found = true;
        return best;
      }
    }
  }
  return best;
}

}  // namespace holo
