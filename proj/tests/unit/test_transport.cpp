#include <doctest.h>

#include "holo/error.hpp"
#include "holo/rng.hpp"
#include "holo/transport.hpp"
#include "oracles.hpp"

using namespace holo;
using oracle::I;
using oracle::kPi;

namespace {

OneForm simple_pole(const SurfaceModel& s, const Mat& a, int j) {
  return OneForm{AlgebraCurrent(s, {{lie::AlgebraElement(a), RationalFunction::pole(s.punctures()[j], 1)}})};
}

OneForm constant_form(const SurfaceModel& s, const Mat& a) {
  return OneForm{AlgebraCurrent::constant(s, lie::AlgebraElement(a))};
}

double rel(const lie::GroupElement& a, const Mat& b) { return oracle::rel(a.matrix(), b); }

}  // namespace

TEST_CASE("evolve zero form") {
  const SurfaceModel s({0.0});
  const auto r = evolve(OneForm{AlgebraCurrent(s, 2)}, Contour::circle(0.0, 1.0));
  CHECK((r.endpoint.matrix() - Mat::Identity(2, 2)).norm() == 0.0);
}

TEST_CASE("evolve around a simple pole matches exp(2 pi i A)") {
  CounterRng rng(41);
  for (int s = 0; s < 10; ++s) {
    const cplx p(rng.uniform(-1, 1), rng.uniform(-1, 1));
    const SurfaceModel surf({p});
    const Mat a = random::algebra_upto(rng, 2, 2.0).matrix();
    const auto r = evolve(simple_pole(surf, a, 0), Contour::circle(p, 0.5));
    CHECK(rel(r.endpoint, oracle::expm(2.0 * kPi * I * a)) < 1e-7);
    CHECK(r.steps > 0);
    CHECK(r.estimated_error <= kTransportTol);
  }
}

TEST_CASE("evolve concatenation and reversal") {
  CounterRng rng(43);
  const SurfaceModel s({0.0, 1.0});
  const auto xi = random::fuchsian_form(rng, s, 2, 1.0);
  const Contour g1 = Contour::line(cplx(0.5, -1.0), cplx(-0.5, 0.5));
  const Contour g2 = Contour::line(cplx(-0.5, 0.5), cplx(1.5, 0.8));
  const auto a = evolve(xi, g1), b = evolve(xi, g2), ab = evolve(xi, g1.then(g2));
  CHECK(rel(ab.endpoint, a.endpoint.matrix() * b.endpoint.matrix()) < 1e-8);
  const auto back = evolve(xi, g1.reversed());
  CHECK(rel(a.endpoint * back.endpoint, Mat::Identity(2, 2)) < 1e-8);
}

TEST_CASE("evolve errors") {
  const SurfaceModel s({0.0});
  const auto xi = simple_pole(s, oracle::sl2_h(), 0);
  try {
    evolve(xi, Contour::line(-1.0, 1.0));
    FAIL("expected PoleOnPath");
  } catch (const Error& e) {
    CHECK(e.code() == "PoleOnPath");
    CHECK(e.error_class() == ErrorClass::Input);
  }
  // a tolerance below what the step-size floor allows
  const MatrixField stiff(2, s, [](cplx z) { return Mat(1e6 * std::exp(z) * oracle::sl2_e() + 1e6 * oracle::sl2_h()); });
  try {
    evolve(stiff, Contour::line(1.0, 3.0), 1e-14);
    FAIL("expected ToleranceNotMet");
  } catch (const Error& e) {
    CHECK(e.code() == "ToleranceNotMet");
    CHECK(e.error_class() == ErrorClass::Numerical);
  }
}

TEST_CASE("period map examples") {
  const SurfaceModel s({0.0, 1.0});
  const auto zero = period_map(OneForm{AlgebraCurrent(s, 3)});
  REQUIRE(zero.entries.size() == 2);
  for (const auto& g : zero.entries) CHECK((g.matrix() - Mat::Identity(3, 3)).norm() < 1e-14);
  CHECK(zero.basepoint == s.basepoint());

  CounterRng rng(47);
  const Mat a = random::algebra(rng, 2, 0.8).matrix();
  const auto xi = simple_pole(s, a, 0);
  const auto t = period_map(xi);
  // conjugation by the transport along the connecting segment
  const Contour gen = canonical_generators(s)[0];
  const auto seg = evolve(xi, Contour::line(s.basepoint(), gen.start()));
  const Mat expect = seg.endpoint.matrix() * oracle::expm(2.0 * kPi * I * a) * seg.endpoint.inverse().matrix();
  CHECK(rel(t.entries[0], expect) < 1e-8);
  CHECK(rel(t.entries[1], Mat::Identity(2, 2)) < 1e-8);
  CHECK(std::abs(t.entries[0].matrix().trace() - oracle::expm(2.0 * kPi * I * a).trace()) < 1e-8);
}

TEST_CASE("period map homomorphism") {
  CounterRng rng(53);
  const SurfaceModel s({0.0, 1.0, cplx(0.3, 1.4)});
  const auto xi = random::fuchsian_form(rng, s, 2, 1.0);
  const auto t = period_map(xi);
  const std::vector<std::vector<int>> words{{0, 1}, {1, 0}, {2, -1}, {0, 2, -3}, {-2, -2, 1}};
  for (const auto& w : words) {
    const auto direct = transport_word(xi.field(), w);
    CHECK(oracle::rel(direct.matrix(), word_product(t, w).matrix()) < 1e-7);
  }
}

TEST_CASE("period map cache") {
  CounterRng rng(59);
  const SurfaceModel s({0.0, 1.0});
  const auto xi = random::fuchsian_form(rng, s, 2, 1.0);
  TransportCache cache;
  const auto a = period_map(xi, 1e-9, &cache);
  CHECK(cache.size() == 1);
  CHECK(cache.hits() == 0);
  const auto b = period_map(xi, 1e-9, &cache);
  CHECK(cache.hits() == 1);
  CHECK(a.entries[0].matrix() == b.entries[0].matrix());
  period_map(xi, 1e-8, &cache);
  CHECK(cache.size() == 2);
  CHECK(form_digest(xi, 1e-9) != form_digest(xi, 1e-8));
  CHECK(form_digest(xi, 1e-9) == form_digest(xi, 1e-9));
  CHECK(form_digest(xi, 1e-9).size() == 64);
}

TEST_CASE("integrate_form on a constant form") {
  const SurfaceModel s({0.0, 1.0});
  const Mat a = oracle::sl2_e() + 0.5 * oracle::sl2_h();
  const auto f = integrate_form(constant_form(s, a));
  for (cplx z : {cplx(2.0, 0.5), cplx(-1.0, -0.5), cplx(0.5, 0.2)}) {
    CHECK(rel(f(z), oracle::expm((z - s.basepoint()) * a)) < 1e-8);
    CHECK(oracle::rel(f.delta(z), a) < 1e-8);
  }
  CHECK((f(s.basepoint()).matrix() - Mat::Identity(2, 2)).norm() < 1e-14);
}

TEST_CASE("integrate_form rejects nontrivial monodromy") {
  const SurfaceModel s({0.0, 1.0});
  const Mat a = 0.25 * oracle::sl2_h();
  try {
    integrate_form(simple_pole(s, a, 1));
    FAIL("expected NonTrivialMonodromy");
  } catch (const Error& e) {
    CHECK(e.code() == "NonTrivialMonodromy");
    CHECK(e.error_class() == ErrorClass::Mathematical);
    CHECK(std::string(e.what()).find("generator 1") != std::string::npos);
  }
  // exp(2 pi i H) = I: trivial monodromy despite the pole
  CHECK_NOTHROW(integrate_form(simple_pole(s, oracle::sl2_h(), 0)));
}

TEST_CASE("integrate_form round trip and path independence") {
  CounterRng rng(61);
  const SurfaceModel s({0.0, 1.0});
  for (int k = 0; k < 3; ++k) {
    const auto f0 = random::group_current(rng, s, 2, 2, 0.8);
    const auto xi = log_derivative(f0);
    const auto f = integrate_form(xi);
    for (cplx z : {cplx(1.7, 0.4), cplx(-0.8, 0.9), cplx(0.5, 0.6)}) {
      CHECK(oracle::rel(f.delta(z), xi(z)) < 1e-7);
      // f equals f0(basepoint)^{-1} f0
      CHECK(oracle::rel(f(z).matrix(), f0(s.basepoint()).inverse() * f0(z)) < 1e-7);
      // around the other side of puncture 1
      const Contour alt = Contour::line(s.basepoint(), cplx(2.5, -1.0)).then(Contour::line(cplx(2.5, -1.0), cplx(2.5, 1.5)))
                              .then(Contour::line(cplx(2.5, 1.5), z));
      CHECK(oracle::rel(f.along(alt).matrix(), f(z).matrix()) < 1e-7);
    }
  }
}

TEST_CASE("frenkel monodromy closed forms") {
  const auto zero = frenkel_monodromy(LoopCurrent(2, 2), 1.0);
  CHECK((zero.monodromy.matrix() - Mat::Identity(2, 2)).norm() < 1e-14);
  CounterRng rng(67);
  for (cplx lambda : {cplx(1.0), cplx(2.0, 0.5)}) {
    const auto a = random::algebra(rng, 2, 1.0);
    const auto r = frenkel_monodromy(LoopCurrent::constant(a), lambda);
    CHECK(rel(r.monodromy, oracle::expm(-2.0 * kPi / lambda * a.matrix())) < 1e-8);
    CHECK(r.quasi_periodicity < 1e-7);
    CHECK(r.path.size() == r.thetas.size());
  }
  CHECK_THROWS_AS(frenkel_monodromy(LoopCurrent(2, 1), 0.0), Error);
}

TEST_CASE("frenkel gauge conjugation") {
  CounterRng rng(71);
  const int m = 2;
  std::vector<Mat> cx(2 * m + 1), cg(2 * m + 1);
  for (auto& c : cx) c = random::algebra(rng, 2, 0.4).matrix();
  for (auto& c : cg) c = random::algebra(rng, 2, 0.3).matrix();
  const LoopCurrent x(cx), y(cg);
  const cplx lambda(1.5, 0.2);
  // g = exp(Y(theta)), Z = g X g^{-1} - lambda g' g^{-1}
  auto g = [&](double th) { return lie::matrix_exp(y(th)); };
  auto dg = [&](double th) {
    return Mat(oracle::derivative([&](cplx t) { return lie::matrix_exp(y(t.real())); }, th, 1e-5));
  };
  auto z = [&](double th) {
    const Mat gv = g(th);
    const Mat gi = gv.inverse();
    return Mat(gv * x(th) * gi - lambda * dg(th) * gi);
  };
  const auto rx = frenkel_monodromy(x, lambda);
  const auto rz = frenkel_monodromy(z, 2, lambda, 1e-10);
  const Mat g0 = g(0.0);
  CHECK(oracle::rel(rz.monodromy.matrix(), g0 * rx.monodromy.matrix() * g0.inverse()) < 1e-6);
  CHECK(std::abs(rz.monodromy.matrix().trace() - rx.monodromy.matrix().trace()) < 1e-6);
}

TEST_CASE("transition functions for a constant form") {
  const SurfaceModel s({0.0, 1.0});
  const auto cover = chart_cover(s, Annulus{cplx(0.5, 1.2), 0.2, 0.5}, 4);
  const Mat a = oracle::sl2_e() + 0.3 * oracle::sl2_h();
  const auto rep = transition_functions(1.0, constant_form(s, a).field(), cover);
  CHECK(rep.cyclic);
  CHECK(rep.triples > 0);
  for (const auto& t : rep.transitions) {
    const cplx ci = cover.charts[t.i].center, cj = cover.charts[t.j].center;
    CHECK(oracle::rel(t.mean, oracle::expm((cj - ci) * a)) < 1e-8);
    CHECK(t.deviation < 1e-8);
  }
  CHECK(rep.cech_defect < 1e-8);
  // psi_i(z) = exp(-(z - c_i) A)
  for (size_t i = 0; i < rep.psi_samples.size(); ++i)
    for (const auto& [zz, psi] : rep.psi_samples[i])
      CHECK(oracle::rel(psi, oracle::expm(-(zz - cover.charts[i].center) * a)) < 1e-8);

  const auto zero = transition_functions(2.0, OneForm{AlgebraCurrent(s, 2)}.field(), cover);
  for (const auto& t : zero.transitions) CHECK((t.mean - Mat::Identity(2, 2)).norm() < 1e-14);
  CHECK_THROWS_AS(transition_functions(0.0, constant_form(s, a).field(), cover), Error);
}

TEST_CASE("transition functions: holonomy of the cover equals the monodromy class") {
  CounterRng rng(73);
  const SurfaceModel s({0.0, 1.0});
  const auto xi = random::fuchsian_form(rng, s, 2, 0.6);
  const cplx lambda(1.3, -0.4);
  const auto cover = chart_cover(s, Annulus{0.0, 0.1, 0.3});
  const auto rep = transition_functions(lambda, xi.field(), cover, 1e-10);
  CHECK(rep.max_deviation < 1e-8);
  CHECK(rep.cech_defect < 1e-8);
  const auto hol = cech_holonomy(rep);
  const auto t = period_map(xi.field().scaled(1.0 / lambda), 1e-10);
  const auto cp = lie::characteristic_polynomial(hol.matrix());
  const auto cq = lie::characteristic_polynomial(t.entries[0].matrix());
  for (size_t k = 0; k < cp.size(); ++k) CHECK(std::abs(cp[k] - cq[k]) < 1e-7);
}

TEST_CASE("transition functions reject charts containing punctures") {
  const SurfaceModel s({0.0, 1.0});
  ChartCover bad;
  bad.charts = {Disc{0.0, 0.5}, Disc{0.4, 0.5}};
  CHECK_THROWS_AS(transition_functions(1.0, constant_form(s, oracle::sl2_h()).field(), bad), Error);
}
