#include "problem.hpp"

#include <algorithm>
#include <cmath>

#include "holo/error.hpp"

namespace holo::cli {

namespace {

[[noreturn]] void schema(const std::string& where, const std::string& what) {
  throw input_error("SchemaError", where + ": " + what);
}

const std::vector<std::string> kKnownKeys{"algebra", "surface", "form",    "level",   "sigma_index", "current", "x",
                                          "y",       "central", "loop",    "samples", "annulus",     "options"};

double number(const json& j, const std::string& where) {
  if (!j.is_number()) schema(where, "expected a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) schema(where, "expected a finite number");
  return v;
}

int integer(const json& j, const std::string& where) {
  if (!j.is_number_integer()) schema(where, "expected an integer");
  return j.get<int>();
}

std::vector<TermSpec> parse_terms(const json& j, int n, const std::string& where) {
  if (!j.is_array()) schema(where, "expected a list of terms");
  std::vector<TermSpec> out;
  for (size_t i = 0; i < j.size(); ++i) {
    const std::string at = where + "[" + std::to_string(i) + "]";
    const json& t = j[i];
    if (!t.is_object()) schema(at, "expected an object");
    for (auto it = t.begin(); it != t.end(); ++it) {
      if (it.key() != "matrix" && it.key() != "pole" && it.key() != "order") schema(at, "unknown key '" + it.key() + "'");
    }
    if (!t.contains("matrix")) schema(at, "missing 'matrix'");
    TermSpec spec;
    spec.matrix = decode_matrix(t["matrix"], n, at + ".matrix");
    if (std::abs(spec.matrix.trace()) > lie::kTraceTol * std::max(1.0, spec.matrix.norm())) {
      schema(at + ".matrix", "matrix is not traceless");
    }
    const json pole = t.value("pole", json("polynomial"));
    if (pole.is_string()) {
      if (pole.get<std::string>() != "polynomial") schema(at + ".pole", "expected a puncture index or \"polynomial\"");
      spec.pole = std::string("polynomial");
    } else {
      spec.pole = integer(pole, at + ".pole");
    }
    spec.order = t.contains("order") ? integer(t["order"], at + ".order") : 0;
    if (spec.order < 0) schema(at + ".order", "order must be >= 0");
    out.push_back(std::move(spec));
  }
  return out;
}

json terms_json(const std::vector<TermSpec>& terms) {
  json out = json::array();
  for (const auto& t : terms) {
    json o;
    o["matrix"] = encode(t.matrix);
    if (const int* idx = std::get_if<int>(&t.pole)) o["pole"] = *idx;
    else o["pole"] = "polynomial";
    o["order"] = t.order;
    out.push_back(std::move(o));
  }
  return out;
}

}  // namespace

json encode(cplx z) { return json::array({z.real(), z.imag()}); }

json encode(const Mat& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int j = 0; j < m.cols(); ++j) row.push_back(encode(m(i, j)));
    rows.push_back(std::move(row));
  }
  return rows;
}

cplx decode_complex(const json& j, const std::string& where) {
  if (j.is_number()) return {number(j, where), 0.0};
  if (!j.is_array() || j.size() != 2) schema(where, "expected a complex number [re, im]");
  return {number(j[0], where + "[0]"), number(j[1], where + "[1]")};
}

Mat decode_matrix(const json& j, int n, const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != n) schema(where, "expected " + std::to_string(n) + " rows");
  Mat m(n, n);
  for (int r = 0; r < n; ++r) {
    const json& row = j[static_cast<size_t>(r)];
    if (!row.is_array() || static_cast<int>(row.size()) != n) {
      schema(where + "[" + std::to_string(r) + "]", "expected " + std::to_string(n) + " entries");
    }
    for (int c = 0; c < n; ++c) {
      m(r, c) = decode_complex(row[static_cast<size_t>(c)], where + "[" + std::to_string(r) + "][" + std::to_string(c) + "]");
    }
  }
  return m;
}

ProblemDocument parse_problem(const json& j) {
  if (!j.is_object()) schema("$", "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (std::find(kKnownKeys.begin(), kKnownKeys.end(), it.key()) == kKnownKeys.end()) {
      schema("$", "unknown key '" + it.key() + "'");
    }
  }
  ProblemDocument d;
  if (!j.contains("algebra")) schema("$", "missing 'algebra'");
  const json& alg = j["algebra"];
  if (!alg.is_object()) schema("$.algebra", "expected an object");
  if (alg.value("family", std::string()) != "sl") schema("$.algebra.family", "only \"sl\" is supported");
  if (!alg.contains("n")) schema("$.algebra", "missing 'n'");
  d.n = integer(alg["n"], "$.algebra.n");
  if (d.n < 2 || d.n > kMaxRank) schema("$.algebra.n", "n must be between 2 and " + std::to_string(kMaxRank));

  if (!j.contains("surface")) schema("$", "missing 'surface'");
  const json& surf = j["surface"];
  if (!surf.is_object() || !surf.contains("punctures") || !surf["punctures"].is_array()) {
    schema("$.surface", "expected an object with a 'punctures' list");
  }
  for (size_t i = 0; i < surf["punctures"].size(); ++i) {
    d.punctures.push_back(decode_complex(surf["punctures"][i], "$.surface.punctures[" + std::to_string(i) + "]"));
  }
  if (surf.contains("basepoint")) d.basepoint = decode_complex(surf["basepoint"], "$.surface.basepoint");

  if (j.contains("form")) d.form = parse_terms(j["form"], d.n, "$.form");
  if (j.contains("level")) d.level = decode_complex(j["level"], "$.level");
  if (j.contains("sigma_index")) d.sigma_index = integer(j["sigma_index"], "$.sigma_index");
  if (j.contains("current")) {
    const json& c = j["current"];
    if (!c.is_array()) schema("$.current", "expected a list of factors");
    for (size_t i = 0; i < c.size(); ++i) d.current.push_back(parse_terms(c[i], d.n, "$.current[" + std::to_string(i) + "]"));
  }
  if (j.contains("x")) d.x = parse_terms(j["x"], d.n, "$.x");
  if (j.contains("y")) d.y = parse_terms(j["y"], d.n, "$.y");
  if (j.contains("central")) d.central = decode_complex(j["central"], "$.central");
  if (j.contains("loop")) {
    const json& l = j["loop"];
    if (!l.is_array() || l.size() % 2 == 0) schema("$.loop", "expected 2M+1 Fourier coefficients");
    for (size_t i = 0; i < l.size(); ++i) {
      Mat m = decode_matrix(l[i], d.n, "$.loop[" + std::to_string(i) + "]");
      if (std::abs(m.trace()) > lie::kTraceTol * std::max(1.0, m.norm())) {
        schema("$.loop[" + std::to_string(i) + "]", "matrix is not traceless");
      }
      d.loop.push_back(std::move(m));
    }
  }
  if (j.contains("samples")) {
    const json& s = j["samples"];
    if (!s.is_array()) schema("$.samples", "expected a list of points");
    for (size_t i = 0; i < s.size(); ++i) d.samples.push_back(decode_complex(s[i], "$.samples[" + std::to_string(i) + "]"));
  }
  if (j.contains("annulus")) {
    const json& a = j["annulus"];
    if (!a.is_object()) schema("$.annulus", "expected an object");
    AnnulusSpec spec;
    spec.center = decode_complex(a.value("center", json::array({0.0, 0.0})), "$.annulus.center");
    if (!a.contains("inner") || !a.contains("outer")) schema("$.annulus", "missing 'inner' or 'outer'");
    spec.inner = number(a["inner"], "$.annulus.inner");
    spec.outer = number(a["outer"], "$.annulus.outer");
    if (a.contains("charts")) spec.charts = integer(a["charts"], "$.annulus.charts");
    d.annulus = spec;
  }
  if (j.contains("options")) {
    const json& o = j["options"];
    if (!o.is_object()) schema("$.options", "expected an object");
    for (auto it = o.begin(); it != o.end(); ++it) {
      const std::string& k = it.key();
      if (k == "tol") {
        d.options.tol = number(*it, "$.options.tol");
        if (!(*d.options.tol > 0.0)) schema("$.options.tol", "must be positive");
      } else if (k == "seed") {
        if (!it->is_number_unsigned() && !(it->is_number_integer() && it->get<std::int64_t>() >= 0)) {
          schema("$.options.seed", "expected a non-negative integer");
        }
        d.options.seed = it->get<std::uint64_t>();
      } else if (k == "max_word_len") {
        d.options.max_word_len = integer(*it, "$.options.max_word_len");
        if (*d.options.max_word_len < 1) schema("$.options.max_word_len", "must be >= 1");
      } else if (k == "quadrature_order") {
        d.options.quadrature_order = integer(*it, "$.options.quadrature_order");
        if (*d.options.quadrature_order < 2 || *d.options.quadrature_order > 256) {
          schema("$.options.quadrature_order", "must be between 2 and 256");
        }
      } else {
        schema("$.options", "unknown key '" + k + "'");
      }
    }
  }

  const int ell = static_cast<int>(d.punctures.size());
  auto check_poles = [ell](const std::vector<TermSpec>& terms, const std::string& where) {
    for (size_t i = 0; i < terms.size(); ++i) {
      const int* idx = std::get_if<int>(&terms[i].pole);
      if (idx && (*idx < 0 || *idx >= ell)) {
        schema(where + "[" + std::to_string(i) + "].pole", "no puncture with index " + std::to_string(*idx));
      }
    }
  };
  check_poles(d.form, "$.form");
  check_poles(d.x, "$.x");
  check_poles(d.y, "$.y");
  for (size_t i = 0; i < d.current.size(); ++i) check_poles(d.current[i], "$.current[" + std::to_string(i) + "]");
  if (d.sigma_index && (*d.sigma_index < 0 || *d.sigma_index >= ell)) {
    schema("$.sigma_index", "no generator with index " + std::to_string(*d.sigma_index));
  }
  return d;
}

json to_json(const ProblemDocument& d) {
  json j;
  j["algebra"] = {{"family", "sl"}, {"n", d.n}};
  json surf;
  surf["punctures"] = json::array();
  for (cplx p : d.punctures) surf["punctures"].push_back(encode(p));
  if (d.basepoint) surf["basepoint"] = encode(*d.basepoint);
  j["surface"] = std::move(surf);
  if (!d.form.empty()) j["form"] = terms_json(d.form);
  if (d.level) j["level"] = encode(*d.level);
  if (d.sigma_index) j["sigma_index"] = *d.sigma_index;
  if (!d.current.empty()) {
    j["current"] = json::array();
    for (const auto& f : d.current) j["current"].push_back(terms_json(f));
  }
  if (!d.x.empty()) j["x"] = terms_json(d.x);
  if (!d.y.empty()) j["y"] = terms_json(d.y);
  if (d.central) j["central"] = encode(*d.central);
  if (!d.loop.empty()) {
    j["loop"] = json::array();
    for (const auto& m : d.loop) j["loop"].push_back(encode(m));
  }
  if (!d.samples.empty()) {
    j["samples"] = json::array();
    for (cplx z : d.samples) j["samples"].push_back(encode(z));
  }
  if (d.annulus) {
    j["annulus"] = {{"center", encode(d.annulus->center)}, {"inner", d.annulus->inner}, {"outer", d.annulus->outer}};
    if (d.annulus->charts) j["annulus"]["charts"] = d.annulus->charts;
  }
  json o = json::object();
  if (d.options.tol) o["tol"] = *d.options.tol;
  if (d.options.seed) o["seed"] = *d.options.seed;
  if (d.options.max_word_len) o["max_word_len"] = *d.options.max_word_len;
  if (d.options.quadrature_order) o["quadrature_order"] = *d.options.quadrature_order;
  if (!o.empty()) j["options"] = std::move(o);
  return j;
}

SurfaceModel build_surface(const ProblemDocument& d) {
  return d.basepoint ? SurfaceModel(d.punctures, *d.basepoint) : SurfaceModel(d.punctures);
}

AlgebraCurrent build_current(const ProblemDocument& d, const SurfaceModel& s, const std::vector<TermSpec>& terms,
                             const std::string& where) {
  std::vector<CurrentTerm> out;
  for (size_t i = 0; i < terms.size(); ++i) {
    const auto& t = terms[i];
    RationalFunction r;
    if (const int* idx = std::get_if<int>(&t.pole)) {
      if (*idx < 0 || *idx >= s.ell()) schema(where + "[" + std::to_string(i) + "].pole", "puncture index out of range");
      r = RationalFunction::pole(s.punctures()[static_cast<size_t>(*idx)], t.order);
    } else {
      r = RationalFunction::monomial(t.order);
    }
    out.push_back({lie::AlgebraElement::project(t.matrix), std::move(r)});
  }
  if (out.empty()) return AlgebraCurrent(s, d.n);
  return AlgebraCurrent(s, std::move(out));
}

GroupCurrent build_group_current(const ProblemDocument& d, const SurfaceModel& s) {
  if (d.current.empty()) return GroupCurrent(s, d.n);
  std::vector<AlgebraCurrent> factors;
  for (size_t i = 0; i < d.current.size(); ++i) {
    factors.push_back(build_current(d, s, d.current[i], "$.current[" + std::to_string(i) + "]"));
  }
  return GroupCurrent(std::move(factors));
}

}  // namespace holo::cli
