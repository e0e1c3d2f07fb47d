#include <doctest.h>

#include "holo/error.hpp"
#include "holo/orbits.hpp"
#include "holo/rng.hpp"
#include "oracles.hpp"

using namespace holo;
using oracle::I;
using oracle::kPi;

namespace {

const SurfaceModel kS0({0.0});
const SurfaceModel kS01({0.0, 1.0});

AlgebraCurrent term(const SurfaceModel& s, const Mat& a, const RationalFunction& r) {
  return AlgebraCurrent(s, {{lie::AlgebraElement(a), r}});
}

MatrixField commutator_field(const MatrixField& x, const MatrixField& y) {
  return MatrixField(x.n(), x.surface(), [x, y](cplx z) { return lie::commutator(x(z), y(z)); });
}

MatrixField zero_field(const SurfaceModel& s, int n) {
  return MatrixField(n, s, [n](cplx) { return Mat(Mat::Zero(n, n)); });
}

Contour sigma0(const SurfaceModel& s) { return canonical_generators(s)[0]; }

CoadjointPoint random_point(CounterRng& rng, const SurfaceModel& s, cplx level) {
  return CoadjointPoint(level, random::fuchsian_form(rng, s, 2, 0.8), sigma0(s));
}

}  // namespace

TEST_CASE("coadjoint point requires a closed cycle") {
  CHECK_THROWS_AS(CoadjointPoint(1.0, zero_field(kS0, 2), Contour::line(1.0, 2.0)), Error);
}

TEST_CASE("cocycle examples") {
  const Contour unit = Contour::circle(0.0, 1.0);
  const auto x = term(kS0, oracle::sl2_e(), RationalFunction::monomial(1));
  const auto y = term(kS0, oracle::sl2_f(), RationalFunction::pole(0.0, 1));
  const cplx omega = cocycle_omega_sigma(x, y, unit);
  // -2 pi i kappa(E, F) with kappa(E, F) = 4
  const cplx kef = lie::killing_form_ad_trace(lie::AlgebraElement(oracle::sl2_e()), lie::AlgebraElement(oracle::sl2_f()));
  CHECK(std::abs(omega - (-2.0 * kPi * I * kef)) < 1e-9);
  CHECK(std::abs(omega - (-8.0 * kPi * I)) < 1e-9);
  CHECK(std::abs(cocycle_omega_sigma(y, x, unit) + omega) < 1e-9);

  const auto cx = AlgebraCurrent::constant(kS0, lie::AlgebraElement(oracle::sl2_h()));
  const auto cy = AlgebraCurrent::constant(kS0, lie::AlgebraElement(oracle::sl2_e()));
  CHECK(std::abs(cocycle_omega_sigma(cx, cy, unit)) == 0.0);
}

TEST_CASE("cocycle antisymmetry, bilinearity and cocycle identity") {
  CounterRng rng(101);
  const Contour sig = sigma0(kS01);
  for (int s = 0; s < 10; ++s) {
    const auto x = random::current(rng, kS01, 2, 3, 1.0), y = random::current(rng, kS01, 2, 3, 1.0),
               z = random::current(rng, kS01, 2, 3, 1.0);
    const cplx xy = cocycle_omega_sigma(x, y, sig);
    CHECK(std::abs(xy + cocycle_omega_sigma(y, x, sig)) < 1e-8 * std::max(1.0, std::abs(xy)));
    const cplx c = cocycle_omega_sigma(bracket(x, y), z, sig) + cocycle_omega_sigma(bracket(y, z), x, sig) +
                   cocycle_omega_sigma(bracket(z, x), y, sig);
    CHECK(std::abs(c) < 1e-8);
    const cplx lin = cocycle_omega_sigma(x.scaled(2.0) + z, y, sig);
    CHECK(std::abs(lin - (2.0 * xy + cocycle_omega_sigma(z, y, sig))) < 1e-9 * std::max(1.0, std::abs(lin)));
  }
}

TEST_CASE("pairing examples") {
  const Contour unit = Contour::circle(0.0, 1.0);
  const CoadjointPoint zero(2.0, zero_field(kS0, 2), unit);
  CHECK(std::abs(pairing(zero, CentExtElement(3.0, zero_field(kS0, 2))) - 6.0) == 0.0);

  const OneForm xi{term(kS0, oracle::sl2_h(), RationalFunction::pole(0.0, 1))};
  const CoadjointPoint d(2.0, xi, unit);
  const CentExtElement e(3.0, AlgebraCurrent::constant(kS0, lie::AlgebraElement(oracle::sl2_h())));
  CHECK(std::abs(pairing(d, e) - (6.0 + 16.0 * kPi * I)) < 1e-9);
}

TEST_CASE("pairing bilinearity") {
  CounterRng rng(103);
  const Contour sig = sigma0(kS01);
  for (int s = 0; s < 5; ++s) {
    const auto a = random::fuchsian_form(rng, kS01, 2, 1.0), b = random::fuchsian_form(rng, kS01, 2, 1.0);
    const auto x = random::current(rng, kS01, 2, 2, 1.0);
    const cplx la(1.2, 0.3), lb(-0.4, 0.8), mu(0.7, -0.1), c(0.5, 1.5);
    const CoadjointPoint da(la, a, sig), db(lb, b, sig);
    const CoadjointPoint sum(la + c * lb, a.field() + b.field().scaled(c), sig);
    const CentExtElement e(mu, x);
    const cplx lhs = pairing(sum, e);
    CHECK(std::abs(lhs - (pairing(da, e) + c * pairing(db, e))) < 1e-9 * std::max(1.0, std::abs(lhs)));
  }
}

TEST_CASE("coadjoint action basics") {
  CounterRng rng(107);
  const auto d = random_point(rng, kS01, cplx(1.7, -0.2));
  const GroupCurrent one(kS01, 2);
  const auto same = coadjoint_act(one, d);
  CHECK(same.level == d.level);
  const cplx z(0.4, 0.8);
  CHECK((same.xi(z) - d.xi(z)).norm() < 1e-15);

  // level 1: the gauge action
  const auto f = random::group_current(rng, kS01, 2, 2, 0.8);
  const auto d1 = random_point(rng, kS01, 1.0);
  const auto acted = coadjoint_act(f, d1);
  CHECK(acted.level == cplx(1.0));
  for (cplx w : {z, cplx(-0.6, 0.3), cplx(1.8, -0.5)}) CHECK((acted.xi(w) - gauge_act(d1.xi, f)(w)).norm() < 1e-14);

  // level is preserved exactly
  CHECK(coadjoint_act(f, d).level == d.level);
}

TEST_CASE("adjoint action basics") {
  CounterRng rng(109);
  const Contour sig = sigma0(kS01);
  const auto x = random::current(rng, kS01, 2, 2, 1.0);
  const auto c = GroupCurrent::exp(AlgebraCurrent::constant(kS01, random::algebra(rng, 2, 1.0)));
  const CentExtElement e(cplx(0.3, 0.4), x);
  const auto ce = adjoint_act(c, e, sig);
  CHECK(std::abs(ce.central - e.central) < 1e-15);
  const cplx z(0.5, 0.9);
  CHECK(oracle::rel(ce.x(z), lie::adjoint(c(z), x(z))) < 1e-14);

  const auto f = random::group_current(rng, kS01, 2, 2, 0.8);
  const auto e2 = CentExtElement(e.central + 2.0, x);
  CHECK(std::abs((adjoint_act(f, e2, sig).central - adjoint_act(f, e, sig).central) - 2.0) < 1e-12);
}

TEST_CASE("pairing invariance under the calibrated convention") {
  CounterRng rng(113);
  double worst = 0.0;
  for (int s = 0; s < 10; ++s) {
    const auto f = random::group_current(rng, kS01, 2, 2, 0.8);
    const auto d = random_point(rng, kS01, cplx(rng.uniform(0.5, 2.5), rng.uniform(-1, 1)));
    const CentExtElement e(cplx(rng.normal(), rng.normal()), random::current(rng, kS01, 2, 2, 1.0));
    worst = std::max(worst, invariance_defect(f, d, e, kActionConvention));
  }
  CHECK(worst < 1e-7);
}

TEST_CASE("calibration outcome is pinned") {
  CounterRng rng(127);
  std::vector<CalibrationSample> samples;
  for (int s = 0; s < 6; ++s) {
    auto f = random::group_current(rng, kS01, 2, 2, 0.8);
    auto d = random_point(rng, kS01, cplx(rng.uniform(1.5, 2.5), rng.uniform(-1, 1)));
    CentExtElement e(cplx(rng.normal(), rng.normal()), random::current(rng, kS01, 2, 2, 1.0));
    samples.push_back({std::move(f), std::move(d), std::move(e)});
  }
  const auto out = calibrate_action_convention(samples);
  REQUIRE(out.defects.size() == 4);
  MESSAGE("calibration defects (lambda,+1) (lambda,-1) (1,+1) (1,-1): " << out.defects[0] << " " << out.defects[1] << " "
                                                                          << out.defects[2] << " " << out.defects[3]);
  CHECK(out.unique);
  CHECK(out.convention.lambda_on_delta);
  CHECK(out.convention.central_sign == 1);
  CHECK(out.convention == kActionConvention);
  CHECK(out.defects[0] < 1e-7);
  for (int k = 1; k < 4; ++k) CHECK(out.defects[k] > 1e-3);
}

TEST_CASE("composition order is pinned to a right action") {
  CounterRng rng(131);
  const auto f1 = random::group_current(rng, kS01, 2, 2, 0.8), f2 = random::group_current(rng, kS01, 2, 2, 0.8);
  const auto d = random_point(rng, kS01, cplx(1.8, 0.4));
  const auto rep = detect_composition_order(f1, f2, d, {cplx(0.5, 0.7), cplx(-0.7, -0.2), cplx(1.6, 0.9)});
  CHECK(rep.order == CompositionOrder::Right);
  CHECK(rep.right_defect < 1e-8);
  CHECK(rep.left_defect > 1e-3);
  CHECK(to_string(CompositionOrder::Right) == "right");
}

TEST_CASE("classify examples") {
  const auto zero = classify_orbit(CoadjointPoint(2.0, zero_field(kS01, 2), sigma0(kS01)));
  for (const auto& g : zero.tuple.entries) CHECK((g.matrix() - Mat::Identity(2, 2)).norm() < 1e-14);
  CHECK(!zero.generic);

  CounterRng rng(137);
  const Mat a = random::algebra(rng, 2, 0.7).matrix();
  const cplx lambda(1.5, 0.5);
  const OneForm xi{term(kS01, lambda * a, RationalFunction::pole(0.0, 1))};
  const auto cert = classify_orbit(CoadjointPoint(lambda, xi, sigma0(kS01)));
  CHECK(std::abs(cert.tuple.entries[0].matrix().trace() - oracle::expm(2.0 * kPi * I * a).trace()) < 1e-8);
  CHECK(oracle::rel(cert.tuple.entries[1].matrix(), Mat::Identity(2, 2)) < 1e-8);
  CHECK(cert.level == lambda);
  CHECK_THROWS_AS(classify_orbit(CoadjointPoint(0.0, xi, sigma0(kS01))), Error);
}

TEST_CASE("classification is invariant along orbits") {
  CounterRng rng(139);
  const auto d = random_point(rng, kS01, cplx(1.4, 0.3));
  const auto base = classify_orbit(d);
  CHECK(base.generic);
  for (int s = 0; s < 3; ++s) {
    const auto f = random::group_current(rng, kS01, 2, 2, 0.7);
    const auto moved = coadjoint_act(f, d);
    CHECK(lie::to_string(same_orbit(base, classify_orbit(moved))) == "equivalent");
    CHECK(same_orbit(d, moved) == lie::Verdict::Equivalent);
  }
}

TEST_CASE("same orbit distinct cases") {
  CounterRng rng(149);
  const auto d = random_point(rng, kS01, 1.0);
  const CoadjointPoint other_level(2.0, d.xi, d.sigma);
  CHECK(same_orbit(d, other_level) == lie::Verdict::Distinct);

  const Mat a = 0.2 * oracle::sl2_h(), b = 0.35 * oracle::sl2_h();
  const CoadjointPoint da(1.0, OneForm{term(kS01, a, RationalFunction::pole(0.0, 1))}, sigma0(kS01));
  const CoadjointPoint db(1.0, OneForm{term(kS01, b, RationalFunction::pole(0.0, 1))}, sigma0(kS01));
  CHECK(same_orbit(da, db) == lie::Verdict::Distinct);
  CHECK(same_orbit(da, da) == lie::Verdict::Indeterminate);
}

TEST_CASE("stabilizer examples") {
  const cplx lambda(1.3, 0.0);
  const OneForm xi{term(kS0, lambda * oracle::sl2_h(), RationalFunction::pole(0.0, 1))};
  const CoadjointPoint d(lambda, xi, sigma0(kS0));

  const auto id = check_stabilizer(GroupCurrent(kS0, 2), d, 1e-8);
  CHECK(id.stabilizes_point);
  CHECK(id.stabilizes_loops);

  const auto th = GroupCurrent::exp(AlgebraCurrent::constant(kS0, lie::AlgebraElement(Mat(0.4 * oracle::sl2_h()))));
  const auto comm = check_stabilizer(th, d, 1e-8);
  CHECK(comm.stabilizes_point);
  CHECK(comm.stabilizes_loops);
  CHECK(comm.action_defect < 1e-12);

  const auto ef = GroupCurrent::exp(
      AlgebraCurrent::constant(kS0, lie::AlgebraElement(Mat(0.6 * oracle::sl2_e() + 0.3 * oracle::sl2_f()))));
  const auto nc = check_stabilizer(ef, d, 1e-8);
  CHECK(!nc.stabilizes_point);
  CHECK(nc.action_defect > 1e-3);
  for (double c : nc.loop_action_consistency) CHECK(c < 1e-6);
}

TEST_CASE("stabilizer: point stabilizers fix the loop monodromy") {
  CounterRng rng(151);
  for (int s = 0; s < 3; ++s) {
    const auto d = random_point(rng, kS01, cplx(1.1, 0.2));
    const auto f = random::group_current(rng, kS01, 2, 1, 0.5);
    const auto rep = check_stabilizer(f, d, 1e-8);
    if (rep.stabilizes_point) CHECK(rep.stabilizes_loops);
    for (double c : rep.loop_action_consistency) CHECK(c < 1e-6);
  }
}

TEST_CASE("weak non-degeneracy probes") {
  CounterRng rng(157);
  for (int s = 0; s < 5; ++s) {
    const auto d = random_point(rng, kS01, 1.0);
    const auto p = pairing_probe(d);
    CHECK(p.found);
    CHECK(p.magnitude > 1e-6);
  }
  const auto x = random::current(rng, kS01, 2, 2, 1.0);
  const auto d = random_point(rng, kS01, 1.0);
  const auto q = kks_probe(d, x.field(), sigma0(kS01));
  CHECK(q.found);
  CHECK(q.magnitude > 1e-8);
  CHECK(!pairing_probe(CoadjointPoint(1.0, zero_field(kS01, 2), sigma0(kS01))).found);
}

TEST_CASE("kks form") {
  CounterRng rng(163);
  const Contour c = sigma0(kS01);
  for (int s = 0; s < 5; ++s) {
    const auto d = random_point(rng, kS01, 1.0);
    const auto x = random::current(rng, kS01, 2, 2, 1.0).field(), y = random::current(rng, kS01, 2, 2, 1.0).field(),
               z = random::current(rng, kS01, 2, 2, 1.0).field();
    CHECK(std::abs(kks_form(d, x, x, c)) < 1e-12);
    const cplx h = kks_form(d, x, y, c);
    const cplx sloop = loop_kks_form(d, x, y, c);
    CHECK(std::abs(h - sloop) < 1e-7 * std::max(1.0, std::abs(h)));
    CHECK(std::abs(h + kks_form(d, y, x, c)) < 1e-8 * std::max(1.0, std::abs(h)));
    const cplx cyc = kks_form(d, commutator_field(x, y), z, c) + kks_form(d, commutator_field(y, z), x, c) +
                     kks_form(d, commutator_field(z, x), y, c);
    CHECK(std::abs(cyc) < 1e-8);
    for (cplx w : {cplx(0.3, 0.2), cplx(-0.2, 0.3)}) {
      const Mat xw = x(w), yw = y(w), dw = d.xi(w);
      CHECK(std::abs(lie::killing_form(dw, lie::commutator(xw, yw)) - lie::killing_form(lie::commutator(dw, xw), yw)) < 1e-10);
    }
  }
}
