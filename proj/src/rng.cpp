#include "holo/rng.hpp"

#include <cmath>
#include <numbers>

namespace holo {

std::uint64_t CounterRng::mix(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ULL;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBULL;
  z ^= z >> 31;
  return z;
}

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t stream) : key_(mix(seed ^ mix(stream + 0x632BE59BD9B4E019ULL))) {}

std::uint64_t CounterRng::next_u64() {
  ++counter_;
  return mix(key_ + counter_ * 0x9E3779B97F4A7C15ULL);
}

double CounterRng::uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

double CounterRng::normal() {
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

cplx CounterRng::complex_normal() {
  const double re = normal();
  return {re, normal()};
}

int CounterRng::integer(int lo, int hi) {
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<int>(next_u64() % span);
}

namespace random {

lie::AlgebraElement algebra(CounterRng& rng, int n, double norm) {
  Mat m(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) m(i, j) = rng.complex_normal();
  Mat x = lie::AlgebraElement::project(m).matrix();
  const double f = x.norm();
  return lie::AlgebraElement::project(f > 0.0 ? Mat(x * (norm / f)) : x);
}

lie::AlgebraElement algebra_upto(CounterRng& rng, int n, double max_norm) {
  const double norm = rng.uniform(0.0, max_norm);
  return algebra(rng, n, norm);
}

RationalFunction rational(CounterRng& rng, const std::vector<cplx>& punctures, int max_order, int max_degree,
                          double scale) {
  RationalFunction f;
  for (cplx p : punctures) {
    const int order = rng.integer(0, max_order);
    for (int m = 1; m <= order; ++m) f = f + RationalFunction::pole(p, m, scale * rng.complex_normal());
  }
  const int degree = rng.integer(0, max_degree);
  for (int d = 0; d <= degree; ++d) f = f + RationalFunction::monomial(d, scale * rng.complex_normal());
  return f;
}

AlgebraCurrent current(CounterRng& rng, const SurfaceModel& s, int n, int terms, double scale) {
  std::vector<CurrentTerm> out;
  for (int t = 0; t < terms; ++t) {
    lie::AlgebraElement a = algebra(rng, n, 1.0);
    out.push_back({a, rational(rng, s.punctures(), 2, 2, scale)});
  }
  return AlgebraCurrent(s, std::move(out));
}

OneForm fuchsian_form(CounterRng& rng, const SurfaceModel& s, int n, double scale) {
  std::vector<CurrentTerm> out;
  for (cplx p : s.punctures()) out.push_back({algebra(rng, n, scale), RationalFunction::pole(p, 1)});
  out.push_back({algebra(rng, n, 0.25 * scale), RationalFunction::constant(1.0)});
  return OneForm{AlgebraCurrent(s, std::move(out))};
}

GroupCurrent group_current(CounterRng& rng, const SurfaceModel& s, int n, int factors, double scale) {
  std::vector<AlgebraCurrent> out;
  for (int k = 0; k < factors; ++k) {
    std::vector<CurrentTerm> terms;
    terms.push_back({algebra(rng, n, scale), RationalFunction::constant(1.0)});
    terms.push_back({algebra(rng, n, scale), RationalFunction::monomial(1)});
    const int j = rng.integer(0, s.ell() - 1);
    const double d = generator_radius(s, j);
    terms.push_back({algebra(rng, n, scale * d), RationalFunction::pole(s.punctures()[j], 1)});
    out.emplace_back(s, std::move(terms));
  }
  return GroupCurrent(std::move(out));
}

}  // namespace random

}  // namespace holo
