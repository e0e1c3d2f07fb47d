#include "holo/transport.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "holo/digest.hpp"
#include "holo/ode.hpp"

namespace holo {

namespace {

constexpr double kPi = std::numbers::pi;

void check_clearance(const SurfaceModel& s, const Contour& path) {
  for (cplx p : s.punctures()) {
    if (path.distance_to(p) < kPoleClearance) {
      std::ostringstream msg;
      msg << "path passes within " << kPoleClearance << " of the puncture " << p;
      throw input_error("PoleOnPath", msg.str());
    }
  }
}

double max_abs(const Mat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace

TransportResult evolve(const MatrixField& xi, const Contour& path, double tol) {
  if (!(tol > 0.0)) throw input_error("BadTolerance", "transport tolerance must be positive");
  check_clearance(xi.surface(), path);
  const int n = xi.n();
  const auto& segs = path.segments();
  ode::Options opt;
  opt.tol = tol / static_cast<double>(std::max<size_t>(segs.size(), 1));

  TransportResult res{lie::GroupElement::identity(n), 0.0, 0};
  Mat g = Mat::Identity(n, n);
  try {
    for (const auto& seg : segs) {
      auto rhs = [&](double u, const Mat& y) -> Mat { return y * (xi(segment_point(seg, u)) * segment_tangent(seg, u)); };
      ode::Result r = ode::dopri5(rhs, g, 0.0, 1.0, opt);
      g = std::move(r.y);
      res.estimated_error += r.error_estimate;
      res.steps += r.steps;
    }
  } catch (const Error& e) {
    if (e.code() == "EvaluationAtPole") throw input_error("PoleOnPath", e.what());
    throw;
  }
  if (!g.allFinite()) throw numerical_error("ToleranceNotMet", "transport diverged");
  if (res.estimated_error > tol) throw numerical_error("ToleranceNotMet", "error estimate exceeds the tolerance");
  const cplx det = g.determinant();
  if (std::abs(det - 1.0) > 10.0 * tol * std::max(1.0, std::pow(max_abs(g), n))) {
    throw numerical_error("ToleranceNotMet", "determinant drift exceeds 10 tol");
  }
  res.endpoint = lie::GroupElement(std::move(g));
  return res;
}

std::string form_digest(const OneForm& xi, double tol) {
  std::ostringstream s;
  auto put = [&](cplx z) { s << hexfloat(z.real()) << ',' << hexfloat(z.imag()) << ';'; };
  s << "holo-form-v1|n=" << xi.n() << "|tol=" << hexfloat(tol) << "|punctures=";
  for (cplx p : xi.surface().punctures()) put(p);
  s << "|base=";
  put(xi.surface().basepoint());
  for (const auto& term : xi.coefficient.terms()) {
    s << "|m=";
    const Mat& m = term.coefficient.matrix();
    for (int i = 0; i < m.rows(); ++i)
      for (int j = 0; j < m.cols(); ++j) put(m(i, j));
    s << "poly=";
    for (cplx c : term.scalar.polynomial()) put(c);
    for (const auto& pp : term.scalar.principal_parts()) {
      s << "pole@";
      put(pp.location);
      for (cplx c : pp.coeffs) put(c);
    }
  }
  return sha256_hex(s.str());
}

std::optional<MonodromyTuple> TransportCache::find(const std::string& key) const {
  std::lock_guard lock(mu_);
  auto it = entries_.find(key);
  if (it == entries_.end()) return std::nullopt;
  ++hits_;
  return it->second;
}

void TransportCache::insert(const std::string& key, MonodromyTuple value) {
  std::lock_guard lock(mu_);
  entries_.insert_or_assign(key, std::move(value));
}

size_t TransportCache::size() const {
  std::lock_guard lock(mu_);
  return entries_.size();
}

int TransportCache::hits() const {
  std::lock_guard lock(mu_);
  return hits_;
}

MonodromyTuple period_map(const MatrixField& xi, double tol) {
  const SurfaceModel& s = xi.surface();
  MonodromyTuple out{{}, s.basepoint(), {}};
  for (int j = 0; j < s.ell(); ++j) {
    TransportResult r = evolve(xi, generator_loop(s, j), tol);
    out.entries.push_back(r.endpoint);
    out.diagnostics.push_back(std::move(r));
  }
  return out;
}

MonodromyTuple period_map(const OneForm& xi, double tol, TransportCache* cache) {
  if (!cache) return period_map(xi.field(), tol);
  const std::string key = form_digest(xi, tol);
  if (auto hit = cache->find(key)) return *hit;
  MonodromyTuple t = period_map(xi.field(), tol);
  cache->insert(key, t);
  return t;
}

lie::GroupElement transport_word(const MatrixField& xi, const std::vector<int>& word, double tol) {
  if (word.empty()) return lie::GroupElement::identity(xi.n());
  return evolve(xi, word_loop(xi.surface(), word), tol).endpoint;
}

lie::GroupElement word_product(const MonodromyTuple& t, const std::vector<int>& word) {
  if (t.entries.empty()) throw input_error("EmptyTuple", "monodromy tuple has no entries");
  lie::GroupElement g = lie::GroupElement::identity(t.entries.front().n());
  for (int letter : word) {
    const int j = letter >= 0 ? letter : -letter - 1;
    if (j >= static_cast<int>(t.entries.size())) throw input_error("BadGeneratorIndex", "word letter out of range");
    g = g * (letter >= 0 ? t.entries[j] : t.entries[j].inverse());
  }
  return g;
}

double distance_from_identity(const lie::GroupElement& g) {
  const Mat& m = g.matrix();
  return (m - Mat::Identity(m.rows(), m.cols())).norm();
}

lie::GroupElement Primitive::operator()(cplx z) const {
  const cplx b = surface().basepoint();
  if (z == b) return lie::GroupElement::identity(xi_.n());
  return along(standard_path(surface(), b, z));
}

lie::GroupElement Primitive::along(const Contour& path) const { return evolve(xi_, path, tol_).endpoint; }

Mat Primitive::delta(cplx z, int nodes) const {
  const double d = surface().distance_to_punctures(z);
  if (d < kPoleClearance) throw input_error("PoleOnPath", "derivative requested at a puncture");
  const double r = std::min(0.05, 0.25 * d);
  const int n = xi_.n();
  Mat deriv = Mat::Zero(n, n);
  for (int k = 0; k < nodes; ++k) {
    const cplx w = std::polar(1.0, 2.0 * kPi * k / nodes);
    deriv += (*this)(z + r * w).matrix() * (std::conj(w) / (r * nodes));
  }
  return (*this)(z).inverse().matrix() * deriv;
}

Primitive integrate_form(const MatrixField& xi, double tol) {
  const MonodromyTuple t = period_map(xi, tol);
  for (size_t j = 0; j < t.entries.size(); ++j) {
    const double dist = distance_from_identity(t.entries[j]);
    if (dist > kTrivialMonodromyFactor * tol) {
      std::ostringstream msg;
      msg << "generator " << j << " has monodromy at distance " << dist << " from the identity";
      throw math_error("NonTrivialMonodromy", msg.str());
    }
  }
  return Primitive(xi, tol);
}

FrenkelResult frenkel_monodromy(const std::function<Mat(double)>& x, int n, cplx lambda, double tol, int path_samples) {
  if (lambda == 0.0) throw input_error("ZeroLevel", "level must be nonzero");
  if (path_samples < 1) throw input_error("BadSampleCount", "need at least one path sample");
  const cplx inv = -1.0 / lambda;
  auto rhs = [&](double theta, const Mat& z) -> Mat { return (inv * x(theta)) * z; };

  // Knots: path samples on [0, 2 pi], check angles on [0, 2 pi) and their shifts by 2 pi.
  constexpr int kChecks = 8;
  std::vector<double> knots;
  for (int k = 0; k <= path_samples; ++k) knots.push_back(2.0 * kPi * k / path_samples);
  for (int k = 0; k < kChecks; ++k) {
    const double th = 2.0 * kPi * (k + 0.5) / kChecks;
    knots.push_back(th);
    knots.push_back(th + 2.0 * kPi);
  }
  knots.push_back(4.0 * kPi);
  std::sort(knots.begin(), knots.end());
  knots.erase(std::unique(knots.begin(), knots.end()), knots.end());

  ode::Options opt;
  opt.tol = tol / (4.0 * kPi);
  FrenkelResult out;
  std::map<double, Mat> at;
  Mat z = Mat::Identity(n, n);
  at.emplace(0.0, z);
  for (size_t k = 1; k < knots.size(); ++k) {
    ode::Result r = ode::dopri5(rhs, z, knots[k - 1], knots[k], opt);
    z = std::move(r.y);
    out.estimated_error += r.error_estimate;
    out.steps += r.steps;
    at.emplace(knots[k], z);
  }
  for (int k = 0; k <= path_samples; ++k) {
    const double th = 2.0 * kPi * k / path_samples;
    out.thetas.push_back(th);
    out.path.push_back(at.at(th));
  }
  const Mat mono = at.at(2.0 * kPi);
  for (int k = 0; k < kChecks; ++k) {
    const double th = 2.0 * kPi * (k + 0.5) / kChecks;
    out.quasi_periodicity = std::max(out.quasi_periodicity, max_abs(at.at(th + 2.0 * kPi) - at.at(th) * mono));
  }
  out.monodromy = lie::GroupElement(mono);
  return out;
}

FrenkelResult frenkel_monodromy(const LoopCurrent& x, cplx lambda, double tol, int path_samples) {
  return frenkel_monodromy([&x](double th) { return x(th); }, x.n(), lambda, tol, path_samples);
}

TransitionReport transition_functions(cplx lambda, const MatrixField& xi, const ChartCover& cover, double tol) {
  if (lambda == 0.0) throw input_error("ZeroLevel", "level must be nonzero");
  const SurfaceModel& s = xi.surface();
  for (const auto& d : cover.charts) {
    if (!(d.radius > 0.0) || s.distance_to_punctures(d.center) <= d.radius) {
      throw input_error("ChartNotSimplyConnected", "a chart contains a puncture");
    }
  }
  const MatrixField scaled = xi.scaled(1.0 / lambda);
  const int n = xi.n();
  const int N = static_cast<int>(cover.charts.size());
  auto h = [&](int i, cplx z) -> Mat {
    const cplx c = cover.charts[i].center;
    if (z == c) return Mat::Identity(n, n);
    return evolve(scaled, Contour::line(c, z), tol).endpoint.matrix();
  };

  TransitionReport rep;
  rep.lambda = lambda;
  rep.charts = cover.charts;
  rep.cyclic = cover.cyclic;
  rep.psi_samples.resize(N);

  std::map<std::pair<int, int>, Mat> means;
  for (int i = 0; i < N; ++i) {
    for (int j = i + 1; j < N; ++j) {
      const auto pts = overlap_samples({cover.charts[i], cover.charts[j]});
      if (pts.empty()) continue;
      std::vector<Mat> vals;
      Mat mean = Mat::Zero(n, n);
      for (cplx z : pts) {
        const Mat hi = h(i, z);
        const Mat hj = h(j, z);
        rep.psi_samples[i].emplace_back(z, hi.inverse());
        rep.psi_samples[j].emplace_back(z, hj.inverse());
        vals.push_back(hi * hj.inverse());
        mean += vals.back();
      }
      mean /= static_cast<double>(vals.size());
      ChartTransition t{i, j, mean, 0.0, static_cast<int>(vals.size())};
      for (const Mat& v : vals) t.deviation = std::max(t.deviation, max_abs(v - mean));
      rep.max_deviation = std::max(rep.max_deviation, t.deviation);
      means.emplace(std::make_pair(i, j), mean);
      rep.transitions.push_back(std::move(t));
    }
  }
  auto phi = [&](int i, int j) -> Mat {
    if (i < j) return means.at({i, j});
    return means.at({j, i}).inverse();
  };
  const Mat id = Mat::Identity(n, n);
  for (int i = 0; i < N; ++i) {
    for (int j = i + 1; j < N; ++j) {
      for (int k = j + 1; k < N; ++k) {
        if (!means.count({i, j}) || !means.count({j, k}) || !means.count({i, k})) continue;
        if (overlap_samples({cover.charts[i], cover.charts[j], cover.charts[k]}, 1).empty()) continue;
        rep.cech_defect = std::max(rep.cech_defect, max_abs(phi(i, j) * phi(j, k) * phi(k, i) - id));
        ++rep.triples;
      }
    }
  }
  return rep;
}

lie::GroupElement cech_holonomy(const TransitionReport& report) {
  if (!report.cyclic) throw input_error("NotCyclic", "holonomy needs a cyclic chart cover");
  const int N = static_cast<int>(report.charts.size());
  const int n = report.transitions.empty() ? 0 : static_cast<int>(report.transitions.front().mean.rows());
  if (n == 0) throw input_error("NoOverlaps", "chart cover has no overlaps");
  Mat prod = Mat::Identity(n, n);
  for (int i = 0; i < N; ++i) {
    const int j = (i + 1) % N;
    const auto it = std::find_if(report.transitions.begin(), report.transitions.end(), [&](const ChartTransition& t) {
      return (t.i == i && t.j == j) || (t.i == j && t.j == i);
    });
    if (it == report.transitions.end()) throw input_error("NoOverlaps", "consecutive charts do not overlap");
    prod = prod * (it->i == i ? it->mean : Mat(it->mean.inverse()));
  }
  return lie::GroupElement(prod);
}

}  // namespace holo
