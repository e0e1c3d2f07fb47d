#include <doctest.h>

#include <cmath>
#include <set>

#include "holo/digest.hpp"
#include "holo/error.hpp"
#include "holo/quadrature.hpp"
#include "holo/rational.hpp"
#include "holo/rng.hpp"
#include "holo/surface.hpp"
#include "holo/transport.hpp"
#include "oracles.hpp"

using namespace holo;
using oracle::I;
using oracle::kPi;

TEST_CASE("gauss legendre rule") {
  for (int order : {2, 5, 16, 32}) {
    const auto& r = quad::gauss_legendre(order);
    REQUIRE(r.nodes.size() == static_cast<size_t>(order));
    double w = 0.0, x2 = 0.0;
    for (int i = 0; i < order; ++i) {
      w += r.weights[i];
      x2 += r.weights[i] * r.nodes[i] * r.nodes[i];
    }
    CHECK(w == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(x2 == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  }
  // order n integrates degree 2n - 1 exactly
  const auto& r = quad::gauss_legendre(4);
  double s = 0.0;
  for (int i = 0; i < 4; ++i) s += r.weights[i] * std::pow(r.nodes[i], 6);
  CHECK(s == doctest::Approx(2.0 / 7.0).epsilon(1e-14));
}

TEST_CASE("adaptive quadrature") {
  CHECK(quad::integrate([](double x) { return std::exp(x); }, 0.0, 1.0) == doctest::Approx(std::exp(1.0) - 1.0).epsilon(1e-13));
  const double peaked = quad::integrate([](double x) { return 1.0 / (1e-4 + x * x); }, -1.0, 1.0);
  CHECK(peaked == doctest::Approx(2.0 * std::atan(100.0) * 100.0).epsilon(1e-10));
  CHECK_THROWS_AS(quad::integrate([](double x) { return 1.0 / std::sqrt(std::abs(x - 0.3)); }, 0.0, 1.0,
                                  quad::Options{8, 1e-15, 6}),
                  Error);
}

TEST_CASE("rational evaluation, derivative and residue") {
  const auto inv = RationalFunction::pole(0.0, 1);
  CHECK(inv.residue(0.0) == cplx(1.0));
  const auto inv2 = RationalFunction::pole(0.0, 2);
  CHECK(inv2.residue(0.0) == cplx(0.0));
  const auto d = inv2.derivative();
  const cplx z(0.7, -0.4);
  CHECK(std::abs(d(z) - (-2.0 / (z * z * z))) < 1e-14);
  CHECK_THROWS_AS(inv(0.0), Error);

  const auto poly = RationalFunction::monomial(3, 2.0) + RationalFunction::constant(1.0);
  CHECK(std::abs(poly.derivative()(z) - 6.0 * z * z) < 1e-14);
  CHECK(poly.polynomial_degree() == 3);
  CHECK(RationalFunction::monomial(0, 3.0).is_constant());
  CHECK((inv - inv).is_zero());
}

TEST_CASE("rational arithmetic closure") {
  CounterRng rng(9);
  const std::vector<cplx> ps{0.0, 1.0, cplx(0.5, 2.0)};
  for (int s = 0; s < 20; ++s) {
    const auto f = random::rational(rng, ps, 3, 2, 1.0);
    const auto g = random::rational(rng, ps, 3, 2, 1.0);
    const cplx z(rng.uniform(-2, 2), rng.uniform(-2, 2));
    if (std::abs(z) < 0.2 || std::abs(z - 1.0) < 0.2 || std::abs(z - ps[2]) < 0.2) continue;
    CHECK((f + g).poles_within(ps));
    CHECK((f * g).poles_within(ps));
    CHECK(f.derivative().poles_within(ps));
    CHECK(std::abs((f * g)(z) - f(z) * g(z)) < 1e-10 * std::max(1.0, std::abs(f(z) * g(z))));
    CHECK(std::abs((f - g)(z) - (f(z) - g(z))) < 1e-12 * std::max(1.0, std::abs(f(z)) + std::abs(g(z))));
    auto fz = [&](cplx w) {
      Mat m(1, 1);
      m(0, 0) = f(w);
      return m;
    };
    CHECK(std::abs(f.derivative()(z) - oracle::derivative(fz, z)(0, 0)) < 1e-6 * std::max(1.0, std::abs(f.derivative()(z))));
  }
}

TEST_CASE("residue theorem on random rational functions") {
  CounterRng rng(13);
  const std::vector<cplx> ps{cplx(0.2, 0.1), cplx(-0.4, 0.3), cplx(2.0, 0.0)};
  const Contour unit = Contour::circle(0.0, 1.0);
  for (int s = 0; s < 20; ++s) {
    const auto f = random::rational(rng, ps, 3, 3, 1.0);
    const cplx lhs = contour_integral([&](cplx z) { return f(z); }, unit);
    const cplx rhs = 2.0 * kPi * I * (f.residue(ps[0]) + f.residue(ps[1]));
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, std::abs(rhs)));
  }
}

TEST_CASE("contour integral examples") {
  const Contour unit = Contour::circle(0.0, 1.0);
  CHECK(std::abs(contour_integral([](cplx z) { return 1.0 / z; }, unit) - 2.0 * kPi * I) < 1e-12);
  CHECK(std::abs(contour_integral([](cplx z) { return 3.0 * z * z - z + 2.0; }, unit)) < 1e-12);
  CHECK(std::abs(contour_integral([](cplx z) { return 1.0 / (z * z); }, unit)) < 1e-12);
  const Mat a = oracle::sl2_h();
  const Mat m = contour_integral([&](cplx z) { return Mat(a / z); }, unit);
  CHECK((m - 2.0 * kPi * I * a).norm() < 1e-12);
}

TEST_CASE("counter rng frozen stream") {
  CounterRng r(42, 0);
  CHECK(r.next_u64() == 0x25887c73cb00502dULL);
  CHECK(r.next_u64() == 0x13782feb7c2a67a8ULL);
  CHECK(r.next_u64() == 0xe2bd7489db1701f4ULL);
  CHECK(r.counter() == 3);
  CounterRng s(42, 1);
  CHECK(s.next_u64() == 0xbc55bd264260b5f1ULL);
  CHECK(s.next_u64() == 0x3b933a89cd7ca924ULL);
  CounterRng u(7, 3);
  CHECK(u.uniform() == 0x1.624fbe06ff6e8p-3);
  CHECK(u.uniform() == 0x1.8b61328ad7a90p-1);
  CHECK(u.uniform() == 0x1.4a63a9b5e912ap-2);
  CounterRng v(7, 3);
  CHECK(std::abs(v.normal() - 0x1.5f6bc3e161f08p-4) < 1e-16);
  CHECK(std::string(CounterRng::kAlgorithm) == "splitmix64-ctr-v1");
}

TEST_CASE("counter rng statistics and ranges") {
  CounterRng r(1234);
  double mean = 0.0, var = 0.0;
  const int n = 20000;
  std::set<int> seen;
  for (int i = 0; i < n; ++i) {
    const double x = r.normal();
    mean += x;
    var += x * x;
    const int k = r.integer(-2, 3);
    CHECK(k >= -2);
    CHECK(k <= 3);
    seen.insert(k);
    const double u = r.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
  CHECK(std::abs(mean / n) < 0.03);
  CHECK(std::abs(var / n - 1.0) < 0.05);
  CHECK(seen.size() == 6);
}

TEST_CASE("random algebra elements") {
  CounterRng r(2);
  for (int n : {2, 3, 4}) {
    const auto x = random::algebra(r, n, 1.7);
    CHECK(x.matrix().norm() == doctest::Approx(1.7).epsilon(1e-14));
    CHECK(std::abs(x.matrix().trace()) < 1e-14);
    CHECK(random::algebra_upto(r, n, 2.0).matrix().norm() <= 2.0 + 1e-14);
  }
}

TEST_CASE("sha256 and hexfloat") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(hexfloat(1.0) == "0x1p+0");
  CHECK(hexfloat(0.1) != hexfloat(std::nextafter(0.1, 1.0)));
}
