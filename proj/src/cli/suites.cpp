#include "suites.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numbers>

#include "holo/error.hpp"
#include "holo/orbits.hpp"
#include "holo/rng.hpp"
#include "holo/transport.hpp"

namespace holo::cli {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

double rel(const Mat& a, const Mat& b) { return (a - b).norm() / std::max(1.0, b.norm()); }
double rel(cplx a, cplx b) { return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)}); }

class Recorder {
 public:
  Recorder(SuiteReport& r, std::uint64_t seed) : r_(r), seed_(seed) {}

  CounterRng rng(int index) const { return CounterRng(seed_ ^ fnv1a(r_.suite), static_cast<std::uint64_t>(index)); }

  /// Passes when value <= threshold.
  void below(const std::string& prop, int index, double value, double threshold) {
    r_.verdicts.push_back({prop, index, value, threshold, std::isfinite(value) && value <= threshold});
  }
  /// Passes when value >= threshold.
  void above(const std::string& prop, int index, double value, double threshold) {
    r_.verdicts.push_back({prop, index, value, threshold, std::isfinite(value) && value >= threshold});
  }
  void check(const std::string& prop, int index, bool ok) {
    r_.verdicts.push_back({prop, index, ok ? 1.0 : 0.0, 1.0, ok});
  }
  /// Runs one sample; a library error fails the named property instead of aborting the suite.
  void sample(const std::string& prop, int index, const std::function<void()>& body) {
    try {
      body();
    } catch (const Error&) {
      r_.verdicts.push_back({prop, index, kNaN, 0.0, false});
    }
  }

 private:
  SuiteReport& r_;
  std::uint64_t seed_;
};

SurfaceModel two_punctures() { return SurfaceModel({0.0, 1.0}); }

std::vector<cplx> char_poly(const Mat& m) { return lie::characteristic_polynomial(m); }

double char_poly_distance(const Mat& a, const Mat& b) {
  const auto pa = char_poly(a), pb = char_poly(b);
  double worst = 0.0;
  for (size_t i = 0; i < pa.size(); ++i) worst = std::max(worst, rel(pa[i], pb[i]));
  return worst;
}

double invariants_distance(const lie::ConjugacyInvariants& a, const lie::ConjugacyInvariants& b) {
  double worst = 0.0;
  for (const auto& [word, value] : a.word_traces) worst = std::max(worst, rel(value, b.word_traces.at(word)));
  return worst;
}

LoopCurrent random_loop(CounterRng& rng, int n, int bandwidth, double scale) {
  std::vector<Mat> coeffs;
  for (int m = -bandwidth; m <= bandwidth; ++m) {
    coeffs.push_back(random::algebra(rng, n, scale / (1.0 + std::abs(m))).matrix());
  }
  return LoopCurrent(std::move(coeffs));
}

// ---------------------------------------------------------------------------

void monodromy_oracle(Recorder& rec) {
  const SurfaceModel s = two_punctures();
  for (int i = 0; i < 20; ++i) {
    rec.sample("circle-period", i, [&] {
      CounterRng rng = rec.rng(i);
      const lie::AlgebraElement a = random::algebra_upto(rng, 2, 2.0);
      const OneForm xi{AlgebraCurrent(s, {{a, RationalFunction::pole(0.0, 1)}})};
      const Mat expected = lie::matrix_exp(cplx(0.0, 2.0 * kPi) * a.matrix());
      const Contour circle = canonical_generators(s)[0];
      rec.below("circle-period", i, rel(evolve(xi, circle).endpoint.matrix(), expected), 1e-7);
      const Mat tail = evolve(xi, standard_path(s, s.basepoint(), circle.start())).endpoint.matrix();
      const MonodromyTuple t = period_map(xi);
      rec.below("based-period", i, rel(t.entries[0].matrix(), tail * expected * tail.inverse()), 1e-7);
      rec.below("other-entries-identity", i, distance_from_identity(t.entries[1]), 1e-7);
    });
  }
}

void residues(Recorder& rec) {
  const Contour circle = Contour::circle(0.0, 1.0);
  for (int i = 0; i < 20; ++i) {
    rec.sample("residue-theorem", i, [&] {
      CounterRng rng = rec.rng(i);
      RationalFunction f;
      cplx expected = 0.0;
      const int poles = rng.integer(1, 4);
      for (int k = 0; k < poles; ++k) {
        const bool inside = rng.uniform() < 0.6;
        const double radius = inside ? rng.uniform(0.0, 0.6) : rng.uniform(1.5, 2.5);
        const cplx p = std::polar(radius, rng.uniform(0.0, 2.0 * kPi));
        const int order = rng.integer(1, 3);
        for (int m = 1; m <= order; ++m) {
          const cplx c = rng.complex_normal();
          f = f + RationalFunction::pole(p, m, c);
          if (inside && m == 1) expected += c;
        }
      }
      const int degree = rng.integer(0, 3);
      for (int d = 0; d <= degree; ++d) f = f + RationalFunction::monomial(d, rng.complex_normal());
      expected *= cplx(0.0, 2.0 * kPi);
      const cplx value = contour_integral([&f](cplx z) { return f(z); }, circle);
      rec.below("residue-theorem", i, rel(value, expected), 1e-10);
    });
  }
}

void gauge_invariance(Recorder& rec) {
  const SurfaceModel s = two_punctures();
  for (int i = 0; i < 50; ++i) {
    rec.sample("trace-word-invariants", i, [&] {
      CounterRng rng = rec.rng(i);
      const OneForm xi = random::fuchsian_form(rng, s, 2, 0.4);
      const GroupCurrent f = random::group_current(rng, s, 2, 2, 0.3);
      const MonodromyTuple before = period_map(xi);
      const MonodromyTuple after = period_map(gauge_act(xi.field(), f));
      const auto inv_before = lie::trace_word_invariants(before.entries, lie::kDefaultWordLength);
      const auto inv_after = lie::trace_word_invariants(after.entries, lie::kDefaultWordLength);
      rec.below("trace-word-invariants", i, invariants_distance(inv_after, inv_before), 1e-6);
      const Mat g = f(s.basepoint());
      const Mat ginv = g.inverse();
      double worst = 0.0;
      for (size_t j = 0; j < before.entries.size(); ++j) {
        worst = std::max(worst, rel(after.entries[j].matrix(), ginv * before.entries[j].matrix() * g));
      }
      rec.below("entrywise-conjugation", i, worst, 1e-6);
    });
  }
}

void homomorphism(Recorder& rec) {
  const SurfaceModel s = two_punctures();
  CounterRng form_rng = rec.rng(1000);
  const OneForm xi = random::fuchsian_form(form_rng, s, 2, 0.5);
  MonodromyTuple t;
  rec.sample("word-transport", -1, [&] { t = period_map(xi); });
  if (t.entries.empty()) return;
  for (int i = 0; i < 10; ++i) {
    rec.sample("word-transport", i, [&] {
      CounterRng rng = rec.rng(i);
      std::vector<int> word;
      const int len = rng.integer(1, 3);
      for (int k = 0; k < len; ++k) word.push_back(rng.integer(-s.ell(), s.ell() - 1));
      const Mat direct = transport_word(xi.field(), word).matrix();
      rec.below("word-transport", i, rel(direct, word_product(t, word).matrix()), 1e-6);
    });
  }
}

void integrability(Recorder& rec) {
  const SurfaceModel s = two_punctures();
  for (int i = 0; i < 20; ++i) {
    rec.sample("round-trip", i, [&] {
      CounterRng rng = rec.rng(i);
      const GroupCurrent f0 = random::group_current(rng, s, 2, 2, 0.3);
      const MatrixField xi = log_derivative(f0);
      const Primitive prim = integrate_form(xi);
      double worst = 0.0;
      for (int k = 0; k < 20;) {
        const cplx z(rng.uniform(-1.0, 2.0), rng.uniform(-1.0, 1.0));
        if (s.distance_to_punctures(z) < 0.25 || std::abs(z - s.basepoint()) < 0.01) continue;
        const Mat expected = xi(z);
        worst = std::max(worst, (prim.delta(z) - expected).norm() / std::max(1.0, expected.norm()));
        ++k;
      }
      rec.below("round-trip", i, worst, 1e-7);
    });
  }
  rec.sample("rejects-nontrivial", 0, [&] {
    CounterRng rng = rec.rng(100);
    const lie::AlgebraElement a = random::algebra(rng, 2, 0.5);
    const OneForm xi{AlgebraCurrent(s, {{a, RationalFunction::pole(0.0, 1)}})};
    const double distance = distance_from_identity(period_map(xi).entries[0]);
    bool rejected = false;
    try {
      (void)integrate_form(xi);
    } catch (const Error& e) {
      rejected = e.code() == "NonTrivialMonodromy";
    }
    rec.above("rejected-monodromy-distance", 0, distance, 1e-3);
    rec.check("rejects-nontrivial", 0, rejected);
  });
}

void cocycle(Recorder& rec) {
  const SurfaceModel s = two_punctures();
  const Contour sigma = canonical_generators(s)[0];
  for (int i = 0; i < 20; ++i) {
    rec.sample("antisymmetry", i, [&] {
      CounterRng rng = rec.rng(i);
      const AlgebraCurrent x = random::current(rng, s, 2, 2, 0.3);
      const AlgebraCurrent y = random::current(rng, s, 2, 2, 0.3);
      const AlgebraCurrent z = random::current(rng, s, 2, 2, 0.3);
      const cplx xy = cocycle_omega_sigma(x, y, sigma), yx = cocycle_omega_sigma(y, x, sigma);
      rec.below("antisymmetry", i, std::abs(xy + yx) / std::max({1.0, std::abs(xy), std::abs(yx)}), 1e-8);
      const cplx a = cocycle_omega_sigma(bracket(x, y), z, sigma);
      const cplx b = cocycle_omega_sigma(bracket(y, z), x, sigma);
      const cplx c = cocycle_omega_sigma(bracket(z, x), y, sigma);
      rec.below("cocycle-identity", i, std::abs(a + b + c) / std::max({1.0, std::abs(a), std::abs(b), std::abs(c)}),
                1e-8);
    });
  }
  rec.sample("closed-form", 0, [&] {
    const SurfaceModel s0({0.0});
    Mat e = Mat::Zero(2, 2), f = Mat::Zero(2, 2);
    e(0, 1) = 1.0;
    f(1, 0) = 1.0;
    const lie::AlgebraElement E(e), F(f);
    const cplx kappa = lie::killing_form_ad_trace(E, F);
    const AlgebraCurrent x(s0, {{E, RationalFunction::monomial(1)}});
    const AlgebraCurrent y(s0, {{F, RationalFunction::pole(0.0, 1)}});
    const cplx value = cocycle_omega_sigma(x, y, Contour::circle(0.0, 1.0));
    rec.below("closed-form", 0, std::abs(value - cplx(0.0, -2.0 * kPi) * kappa), 1e-9);
  });
}

CalibrationSample pairing_sample(CounterRng& rng, const SurfaceModel& s, const Contour& sigma) {
  const cplx level = std::polar(rng.uniform(0.5, 2.0), rng.uniform(0.0, 2.0 * kPi));
  const OneForm xi = random::fuchsian_form(rng, s, 2, 0.5);
  const AlgebraCurrent x = random::current(rng, s, 2, 2, 0.3);
  const cplx mu = rng.complex_normal();
  const GroupCurrent f = random::group_current(rng, s, 2, 2, 0.3);
  return CalibrationSample{f, CoadjointPoint(level, xi, sigma), CentExtElement(mu, x)};
}

void pairing_invariance(Recorder& rec) {
  const SurfaceModel s = two_punctures();
  const Contour sigma = canonical_generators(s)[0];
  for (int i = 0; i < 20; ++i) {
    rec.sample("invariance", i, [&] {
      CounterRng rng = rec.rng(i);
      const CalibrationSample c = pairing_sample(rng, s, sigma);
      const cplx scale = pairing(c.d, c.e);
      rec.below("invariance", i, invariance_defect(c.f, c.d, c.e, kActionConvention) / std::max(1.0, std::abs(scale)),
                1e-7);
      rec.check("level-preserved", i, coadjoint_act(c.f, c.d).level == c.d.level);
    });
  }
  rec.sample("calibration", 0, [&] {
    std::vector<CalibrationSample> samples;
    for (int i = 0; i < 4; ++i) {
      CounterRng rng = rec.rng(100 + i);
      samples.push_back(pairing_sample(rng, s, sigma));
    }
    const CalibrationOutcome out = calibrate_action_convention(samples);
    rec.check("calibration", 0, out.unique && out.convention == kActionConvention);
  });
  rec.sample("composition-order", 0, [&] {
    CounterRng rng = rec.rng(200);
    const CalibrationSample c = pairing_sample(rng, s, sigma);
    const GroupCurrent f2 = random::group_current(rng, s, 2, 1, 0.3);
    const CompositionReport r = detect_composition_order(c.f, f2, c.d, generator_circle_samples(s, 8));
    rec.check("composition-order", 0, r.order == CompositionOrder::Right);
  });
}

void transitions(Recorder& rec) {
  const SurfaceModel s = two_punctures();
  const Annulus annulus{cplx(0.5, 1.2), 0.2, 0.5};
  const ChartCover cover = chart_cover(s, annulus, 4);
  for (int i = 0; i < 10; ++i) {
    rec.sample("constancy", i, [&] {
      CounterRng rng = rec.rng(i);
      const OneForm xi = random::fuchsian_form(rng, s, 2, 0.5);
      const cplx level = std::polar(rng.uniform(0.5, 2.0), rng.uniform(0.0, 2.0 * kPi));
      const TransitionReport rep = transition_functions(level, xi.field(), cover);
      rec.below("constancy", i, rep.max_deviation, 1e-6);
      rec.below("cech-identity", i, rep.cech_defect, 1e-8);
      rec.check("has-triple-overlaps", i, rep.triples > 0);
      const double coarse = transition_functions(level, xi.field(), cover, 1e-6).max_deviation;
      const double fine = transition_functions(level, xi.field(), cover, 1e-8).max_deviation;
      rec.above("constancy-tightening", i, coarse / std::max(fine, 1e-300), 10.0);
    });
  }
  rec.sample("orbit-bundle", 0, [&] {
    CounterRng rng = rec.rng(100);
    const OneForm xi = random::fuchsian_form(rng, s, 2, 0.5);
    const ChartCover around = chart_cover(s, Annulus{0.0, 0.1, 0.3});
    const lie::GroupElement h = cech_holonomy(transition_functions(1.0, xi.field(), around));
    const MonodromyTuple t = period_map(xi);
    rec.below("orbit-bundle", 0, char_poly_distance(h.matrix(), t.entries[0].matrix()), 1e-6);
  });
}

void frenkel(Recorder& rec) {
  for (int i = 0; i < 10; ++i) {
    rec.sample("quasi-periodicity", i, [&] {
      CounterRng rng = rec.rng(i);
      const int n = 2;
      const cplx level = std::polar(rng.uniform(0.5, 1.5), rng.uniform(0.0, 2.0 * kPi));
      const LoopCurrent x = random_loop(rng, n, 3, 0.5);
      const LoopCurrent gen = random_loop(rng, n, 2, 0.3);
      const FrenkelResult fx = frenkel_monodromy(x, level);
      rec.below("quasi-periodicity", i, fx.quasi_periodicity, 1e-7);
      auto y = [&](double th) -> Mat {
        const Mat gl = gen(th);
        const Mat g = lie::matrix_exp(gl);
        const Mat dg = g * lie::dexp_left(gl, gen.derivative(th));
        const Mat ginv = g.inverse();
        return g * x(th) * ginv - level * dg * ginv;
      };
      const FrenkelResult fy = frenkel_monodromy(y, n, level);
      rec.below("gauge-conjugacy-class", i, char_poly_distance(fy.monodromy.matrix(), fx.monodromy.matrix()), 1e-6);
      const Mat g0 = lie::matrix_exp(gen(0.0));
      rec.below("gauge-conjugation", i, rel(fy.monodromy.matrix(), g0 * fx.monodromy.matrix() * g0.inverse()), 1e-6);
      const lie::AlgebraElement a = random::algebra(rng, n, 1.0);
      const FrenkelResult fa = frenkel_monodromy(LoopCurrent::constant(a), level);
      rec.below("constant-closed-form", i, rel(fa.monodromy.matrix(), lie::matrix_exp(-2.0 * kPi / level * a.matrix())),
                1e-8);
    });
  }
}

void kks(Recorder& rec) {
  const SurfaceModel s = two_punctures();
  const Contour c = canonical_generators(s)[0];
  for (int i = 0; i < 20; ++i) {
    rec.sample("restriction", i, [&] {
      CounterRng rng = rec.rng(i);
      const OneForm xi = random::fuchsian_form(rng, s, 2, 0.5);
      const CoadjointPoint d(1.0, xi, c);
      const AlgebraCurrent x = random::current(rng, s, 2, 2, 0.3);
      const AlgebraCurrent y = random::current(rng, s, 2, 2, 0.3);
      const AlgebraCurrent z = random::current(rng, s, 2, 2, 0.3);
      const cplx wh = kks_form(d, x.field(), y.field(), c);
      const cplx ws = loop_kks_form(d, x.field(), y.field(), c);
      rec.below("restriction", i, rel(wh, ws), 1e-7);
      const cplx wyx = kks_form(d, y.field(), x.field(), c);
      rec.below("antisymmetry", i, std::abs(wh + wyx) / std::max({1.0, std::abs(wh), std::abs(wyx)}), 1e-8);
      const cplx a = kks_form(d, bracket(x, y).field(), z.field(), c);
      const cplx b = kks_form(d, bracket(y, z).field(), x.field(), c);
      const cplx e = kks_form(d, bracket(z, x).field(), y.field(), c);
      rec.below("cyclic-identity", i, std::abs(a + b + e) / std::max({1.0, std::abs(a), std::abs(b), std::abs(e)}), 1e-8);
    });
  }
}

void periods_suite(Recorder& rec) {
  const SurfaceModel s({0.0, 1.0, 5.0});
  for (int i = 0; i < 20; ++i) {
    rec.sample("period-round-trip", i, [&] {
      CounterRng rng = rec.rng(i);
      Eigen::VectorXcd y(3);
      for (int k = 0; k < 3; ++k) y(k) = rng.complex_normal();
      const Eigen::VectorXcd back = periods(s, form_from_periods(s, y));
      rec.below("period-round-trip", i, (back - y).norm() / std::max(1.0, y.norm()), 1e-9);
    });
  }
}

/// Projectors from an eigen-decomposition of ad(h), grouped like the library's eigenvalues.
AlgebraOperator oracle_projector(const AlgebraOperator& ad, cplx eigenvalue, double tol) {
  Eigen::ComplexEigenSolver<AlgebraOperator> es(ad);
  const AlgebraOperator v = es.eigenvectors();
  const AlgebraOperator w = v.inverse();
  AlgebraOperator p = AlgebraOperator::Zero(ad.rows(), ad.cols());
  for (Eigen::Index k = 0; k < ad.rows(); ++k) {
    if (std::abs(es.eigenvalues()(k) - eigenvalue) <= tol) p += v.col(k) * w.row(k);
  }
  return p;
}

void cartan(Recorder& rec) {
  std::vector<Mat> hs;
  auto diag = [](std::initializer_list<cplx> d) {
    Mat m = Mat::Zero(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()));
    int i = 0;
    for (cplx v : d) m(i, i) = v, ++i;
    return m;
  };
  hs.push_back(diag({1.0, -1.0}));
  {
    Mat g(2, 2);
    g << 1.0, 0.5, cplx(0.0, 0.3), 1.2;
    hs.push_back(g * diag({cplx(0.3, 0.2), cplx(-0.3, -0.2)}) * g.inverse());
  }
  hs.push_back(diag({1.0, 0.0, -1.0}));
  {
    Mat g(3, 3);
    g << 1.0, 0.2, 0.0, cplx(0.0, 0.4), 1.0, 0.3, 0.1, 0.0, 1.0;
    hs.push_back(g * diag({1.0, 1.0, -2.0}) * g.inverse());
  }
  for (int i = 0; i < static_cast<int>(hs.size()); ++i) {
    rec.sample("idempotence", i, [&] {
      const lie::AlgebraElement h = lie::AlgebraElement::project(hs[static_cast<size_t>(i)]);
      const auto projs = lie::cartan_projectors(h);
      const AlgebraOperator ad = lie::ad_matrix(h.matrix());
      const auto dim = ad.rows();
      const AlgebraOperator id = AlgebraOperator::Identity(dim, dim);
      double idem = 0.0, orth = 0.0, oracle = 0.0;
      AlgebraOperator sum = AlgebraOperator::Zero(dim, dim);
      for (size_t a = 0; a < projs.size(); ++a) {
        const AlgebraOperator& p = projs[a].projector;
        idem = std::max(idem, (p * p - p).norm());
        for (size_t b = 0; b < projs.size(); ++b) {
          if (a != b) orth = std::max(orth, (p * projs[b].projector).norm());
        }
        sum += p;
        oracle = std::max(oracle, (p - oracle_projector(ad, projs[a].eigenvalue, 1e-6 * std::max(1.0, ad.norm()))).norm());
      }
      rec.below("idempotence", i, idem, 1e-10);
      rec.below("orthogonality", i, orth, 1e-10);
      rec.below("completeness", i, (sum - id).norm(), 1e-10);
      rec.below("eigen-oracle", i, oracle, 1e-10);
    });
  }
}

const std::map<std::string, std::function<void(Recorder&)>>& registry() {
  static const std::map<std::string, std::function<void(Recorder&)>> r{
      {"cartan", cartan},
      {"cocycle", cocycle},
      {"frenkel", frenkel},
      {"gauge-invariance", gauge_invariance},
      {"homomorphism", homomorphism},
      {"integrability", integrability},
      {"kks", kks},
      {"monodromy-oracle", monodromy_oracle},
      {"pairing-invariance", pairing_invariance},
      {"periods", periods_suite},
      {"residues", residues},
      {"transitions", transitions},
  };
  return r;
}

}  // namespace

bool SuiteReport::passed() const {
  return !verdicts.empty() && std::all_of(verdicts.begin(), verdicts.end(), [](const SuiteVerdict& v) { return v.pass; });
}

double SuiteReport::worst(const std::string& property) const {
  double w = 0.0;
  for (const auto& v : verdicts) {
    if (v.property != property) continue;
    if (!std::isfinite(v.value)) return v.value;
    w = std::max(w, v.value);
  }
  return w;
}

bool SuiteReport::property_passed(const std::string& property) const {
  bool any = false;
  for (const auto& v : verdicts) {
    if (v.property != property) continue;
    any = true;
    if (!v.pass) return false;
  }
  return any;
}

std::vector<std::string> suite_names() {
  std::vector<std::string> out;
  for (const auto& [name, fn] : registry()) out.push_back(name);
  return out;
}

SuiteReport run_suite(const std::string& name, std::uint64_t seed) {
  const auto it = registry().find(name);
  if (it == registry().end()) throw input_error("UnknownSuite", "no verification suite named '" + name + "'");
  SuiteReport report;
  report.suite = name;
  report.seed = seed;
  Recorder rec(report, seed);
  it->second(rec);
  return report;
}

nlohmann::json to_json(const SuiteReport& r) {
  nlohmann::json verdicts = nlohmann::json::array();
  for (const auto& v : r.verdicts) {
    nlohmann::json j;
    j["property"] = v.property;
    j["index"] = v.index;
    j["value"] = std::isfinite(v.value) ? nlohmann::json(v.value) : nlohmann::json(nullptr);
    j["threshold"] = v.threshold;
    j["pass"] = v.pass;
    verdicts.push_back(std::move(j));
  }
  return {{"suite", r.suite},
          {"seed", r.seed},
          {"rng", CounterRng::kAlgorithm},
          {"verdicts", std::move(verdicts)},
          {"passed", r.passed()}};
}

}  // namespace holo::cli
