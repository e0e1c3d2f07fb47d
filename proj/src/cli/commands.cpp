#include "commands.hpp"

#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "holo/digest.hpp"
#include "holo/error.hpp"
#include "holo/orbits.hpp"
#include "holo/transport.hpp"
#include "problem.hpp"
#include "store.hpp"
#include "suites.hpp"

namespace holo::cli {

namespace {

struct Flags {
  std::optional<double> tol;
  std::optional<std::uint64_t> seed;
  std::optional<int> max_word_len;
  std::optional<int> quadrature_order;
  std::string out_dir;
  bool pretty = false;
};

struct Effective {
  double tol = kTransportTol;
  std::uint64_t seed = 0;
  int max_word_len = lie::kDefaultWordLength;
  int quadrature_order = quad::kDefaultOrder;

  quad::Options quad() const { return quad::Options{quadrature_order, quad::kDefaultTol, 40}; }
  json to_json() const {
    return {{"tol", tol}, {"seed", seed}, {"max_word_len", max_word_len}, {"quadrature_order", quadrature_order}};
  }
};

Effective resolve(const Flags& f, const Options& doc) {
  Effective e;
  if (doc.tol) e.tol = *doc.tol;
  if (doc.seed) e.seed = *doc.seed;
  if (doc.max_word_len) e.max_word_len = *doc.max_word_len;
  if (doc.quadrature_order) e.quadrature_order = *doc.quadrature_order;
  if (f.tol) e.tol = *f.tol;
  if (f.seed) e.seed = *f.seed;
  if (f.max_word_len) e.max_word_len = *f.max_word_len;
  if (f.quadrature_order) e.quadrature_order = *f.quadrature_order;
  if (!(e.tol > 0.0)) throw input_error("BadTolerance", "tolerance must be positive");
  if (e.max_word_len < 1) throw input_error("BadWordLength", "max word length must be >= 1");
  if (e.quadrature_order < 2 || e.quadrature_order > 256) throw input_error("BadQuadratureOrder", "order must be in [2, 256]");
  return e;
}

json read_json(const std::string& path, std::istream& in) {
  std::stringstream buf;
  if (path == "-") {
    buf << in.rdbuf();
  } else {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw input_error("IoError", "cannot open " + path);
    buf << file.rdbuf();
  }
  json j = json::parse(buf.str(), nullptr, false);
  if (j.is_discarded()) throw input_error("ParseError", path + ": not a valid JSON document");
  return j;
}

/// Shared state for one invocation.
struct Session {
  Flags flags;
  std::unique_ptr<ResultStore> store;
  TransportCache memory;
  json diagnostics = json::object();
  std::vector<std::string> warnings;
  int cache_hits = 0, cache_misses = 0;

  /// Period map with the persistent cache when --out-dir is set.
  MonodromyTuple periods(const OneForm& xi, double tol) {
    const std::string key = form_digest(xi, tol);
    if (auto hit = memory.find(key)) {
      ++cache_hits;
      return *hit;
    }
    if (store) {
      if (auto hit = store->load_tuple(key, warnings)) {
        ++cache_hits;
        memory.insert(key, *hit);
        return *hit;
      }
    }
    ++cache_misses;
    MonodromyTuple t = period_map(xi, tol);
    json steps = json::array(), errors = json::array();
    for (const auto& d : t.diagnostics) {
      steps.push_back(d.steps);
      errors.push_back(d.estimated_error);
    }
    diagnostics["transport_steps"] = steps;
    diagnostics["transport_error_estimates"] = errors;
    memory.insert(key, t);
    if (store) store->store_tuple(key, t);
    return t;
  }
};

struct Loaded {
  ProblemDocument doc;
  json canonical_input;
  Effective eff;
  SurfaceModel surface;
};

Loaded load(Session& s, const std::string& path, std::istream& in) {
  ProblemDocument doc = parse_problem(read_json(path, in));
  Effective eff = resolve(s.flags, doc.options);
  SurfaceModel surface = build_surface(doc);
  json canon = to_json(doc);
  return Loaded{std::move(doc), std::move(canon), eff, std::move(surface)};
}

OneForm form_of(const Loaded& l) { return OneForm{build_current(l.doc, l.surface, l.doc.form, "$.form")}; }

cplx level_of(const Loaded& l) {
  if (!l.doc.level) throw input_error("SchemaError", "$: missing 'level'");
  return *l.doc.level;
}

Contour sigma_of(const Loaded& l) {
  const int idx = l.doc.sigma_index.value_or(0);
  if (idx < 0 || idx >= l.surface.ell()) throw input_error("SchemaError", "$.sigma_index: generator index out of range");
  return canonical_generators(l.surface)[static_cast<size_t>(idx)];
}

json encode_tuple(const MonodromyTuple& t) {
  json entries = json::array();
  for (const auto& g : t.entries) entries.push_back(encode(g.matrix()));
  return {{"basepoint", encode(t.basepoint)}, {"entries", std::move(entries)}};
}

json encode_invariants(const lie::ConjugacyInvariants& inv) {
  json traces = json::object();
  for (const auto& [word, value] : inv.word_traces) {
    std::string key;
    for (size_t i = 0; i < word.size(); ++i) key += (i ? "," : "") + std::to_string(word[i]);
    traces[key] = encode(value);
  }
  json polys = json::array();
  for (const auto& p : inv.char_polys) {
    json coeffs = json::array();
    for (cplx c : p) coeffs.push_back(encode(c));
    polys.push_back(std::move(coeffs));
  }
  return {{"max_word_len", inv.max_word_len}, {"word_traces", std::move(traces)}, {"char_polys", std::move(polys)}};
}

json encode_certificate(const OrbitCertificate& c) {
  return {{"level", encode(c.level)},
          {"tuple", encode_tuple(c.tuple)},
          {"invariants", encode_invariants(c.invariants)},
          {"genericity", c.generic ? "generic" : "non-generic"}};
}

OrbitCertificate certificate(Session& s, const Loaded& l) {
  const cplx level = level_of(l);
  if (level == 0.0) throw input_error("ZeroLevel", "level must be nonzero");
  const OneForm scaled{form_of(l).coefficient.scaled(1.0 / level)};
  return certificate_from_tuple(level, s.periods(scaled, l.eff.tol), l.eff.max_word_len);
}

struct Outcome {
  json outputs = json::object();
  json input = json::object();
  json effective = json::object();
  int exit_code = 0;
};

Outcome cmd_monodromy(Session& s, const Loaded& l) {
  Outcome o;
  const MonodromyTuple t = s.periods(form_of(l), l.eff.tol);
  o.outputs["tuple"] = encode_tuple(t);
  o.outputs["invariants"] = encode_invariants(lie::trace_word_invariants(t.entries, l.eff.max_word_len));
  o.outputs["genericity"] = lie::is_generic_tuple(t.entries) ? "generic" : "non-generic";
  return o;
}

Outcome cmd_classify(Session& s, const Loaded& l) {
  Outcome o;
  o.outputs["certificate"] = encode_certificate(certificate(s, l));
  return o;
}

Outcome cmd_same_orbit(Session& s, const Loaded& a, const Loaded& b) {
  Outcome o;
  const OrbitCertificate ca = certificate(s, a);
  const OrbitCertificate cb = certificate(s, b);
  OrbitOptions opt;
  opt.transport_tol = a.eff.tol;
  opt.max_word_len = a.eff.max_word_len;
  o.outputs["verdict"] = lie::to_string(same_orbit(ca, cb, opt));
  o.outputs["certificates"] = json::array({encode_certificate(ca), encode_certificate(cb)});
  return o;
}

Outcome cmd_cocycle(Session&, const Loaded& l) {
  Outcome o;
  const AlgebraCurrent x = build_current(l.doc, l.surface, l.doc.x, "$.x");
  const AlgebraCurrent y = build_current(l.doc, l.surface, l.doc.y, "$.y");
  o.outputs["value"] = encode(cocycle_omega_sigma(x, y, sigma_of(l), l.eff.quad()));
  return o;
}

Outcome cmd_pairing(Session&, const Loaded& l) {
  Outcome o;
  const CoadjointPoint d(level_of(l), form_of(l), sigma_of(l));
  const CentExtElement e(l.doc.central.value_or(0.0), build_current(l.doc, l.surface, l.doc.x, "$.x"));
  o.outputs["value"] = encode(pairing(d, e, l.eff.quad()));
  return o;
}

Outcome cmd_kks(Session&, const Loaded& l) {
  Outcome o;
  const Contour c = sigma_of(l);
  const CoadjointPoint d(level_of(l), form_of(l), c);
  const MatrixField x = build_current(l.doc, l.surface, l.doc.x, "$.x").field();
  const MatrixField y = build_current(l.doc, l.surface, l.doc.y, "$.y").field();
  o.outputs["omega_h"] = encode(kks_form(d, x, y, c, l.eff.quad()));
  o.outputs["omega_s"] = encode(loop_kks_form(d, x, y, c));
  return o;
}

Outcome cmd_integrate(Session& s, const Loaded& l) {
  Outcome o;
  const OneForm xi = form_of(l);
  const MonodromyTuple t = s.periods(xi, l.eff.tol);
  json dist = json::array();
  int offending = -1;
  double worst = 0.0;
  for (size_t j = 0; j < t.entries.size(); ++j) {
    const double d = distance_from_identity(t.entries[j]);
    dist.push_back(d);
    if (d > kTrivialMonodromyFactor * l.eff.tol && d > worst) {
      worst = d;
      offending = static_cast<int>(j);
    }
  }
  o.outputs["monodromy_distance"] = dist;
  if (offending >= 0) {
    o.outputs["error"] = {{"code", "NonTrivialMonodromy"}, {"generator", offending}, {"distance", worst}};
    o.exit_code = 1;
    return o;
  }
  const Primitive prim(xi.field(), l.eff.tol);
  json samples = json::array();
  for (cplx z : l.doc.samples) {
    samples.push_back({{"z", encode(z)}, {"value", encode(prim(z).matrix())}});
  }
  o.outputs["samples"] = std::move(samples);
  return o;
}

Outcome cmd_frenkel(Session&, const Loaded& l) {
  Outcome o;
  if (l.doc.loop.empty()) throw input_error("SchemaError", "$: missing 'loop'");
  const LoopCurrent x(l.doc.loop);
  const FrenkelResult r = frenkel_monodromy(x, level_of(l), l.eff.tol, 16);
  json path = json::array();
  for (size_t k = 0; k < r.thetas.size(); ++k) path.push_back({{"theta", r.thetas[k]}, {"z", encode(r.path[k])}});
  o.outputs["monodromy"] = encode(r.monodromy.matrix());
  o.outputs["path"] = std::move(path);
  o.outputs["quasi_periodicity"] = r.quasi_periodicity;
  return o;
}

Outcome cmd_transitions(Session& s, const Loaded& l) {
  Outcome o;
  const cplx level = level_of(l);
  Annulus region{0.0, 0.0, 0.0};
  int charts = 0;
  if (l.doc.annulus) {
    region = Annulus{l.doc.annulus->center, l.doc.annulus->inner, l.doc.annulus->outer};
    charts = l.doc.annulus->charts;
  } else {
    const auto circ = *sigma_of(l).as_circle();
    region = Annulus{circ.center, 0.5 * circ.radius, 1.5 * circ.radius};
  }
  const ChartCover cover = chart_cover(l.surface, region, charts);
  const TransitionReport rep = transition_functions(level, form_of(l).field(), cover, l.eff.tol);
  json tr = json::array();
  for (const auto& t : rep.transitions) {
    tr.push_back({{"i", t.i}, {"j", t.j}, {"mean", encode(t.mean)}, {"deviation", t.deviation}, {"samples", t.samples}});
  }
  json centers = json::array();
  for (const auto& d : rep.charts) centers.push_back({{"center", encode(d.center)}, {"radius", d.radius}});
  o.outputs["charts"] = std::move(centers);
  o.outputs["transitions"] = std::move(tr);
  o.outputs["max_deviation"] = rep.max_deviation;
  o.outputs["cech_defect"] = rep.cech_defect;
  o.outputs["triple_overlaps"] = rep.triples;
  if (rep.cyclic) o.outputs["holonomy"] = encode(cech_holonomy(rep).matrix());
  (void)s;
  return o;
}

std::string verdict_digest_input(const std::string& suite, std::uint64_t seed) {
  return canonical({{"command", "verify"}, {"suite", suite}, {"seed", seed}, {"rng", "splitmix64-ctr-v1"}});
}

json error_json(const std::string& cls, const std::string& code, const std::string& message) {
  return {{"class", cls}, {"code", code}, {"message", message}};
}

std::string class_name(ErrorClass c) {
  switch (c) {
    case ErrorClass::Mathematical: return "mathematical";
    case ErrorClass::Input: return "input";
    case ErrorClass::Numerical: return "numerical";
  }
  return "input";
}

void render_value(std::ostringstream& os, const json& v, const std::string& indent);

bool is_complex(const json& v) { return v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number(); }

std::string complex_text(const json& v) {
  std::ostringstream os;
  os << std::setprecision(10) << v[0].get<double>() << (v[1].get<double>() < 0 ? " - " : " + ")
     << std::abs(v[1].get<double>()) << "i";
  return os.str();
}

bool is_matrix(const json& v) {
  if (!v.is_array() || v.empty()) return false;
  for (const auto& row : v) {
    if (!row.is_array() || row.size() != v.size()) return false;
    for (const auto& e : row)
      if (!is_complex(e)) return false;
  }
  return true;
}

void render_value(std::ostringstream& os, const json& v, const std::string& indent) {
  if (is_complex(v)) {
    os << complex_text(v) << "\n";
  } else if (is_matrix(v)) {
    os << "\n";
    for (const auto& row : v) {
      os << indent << "  |";
      for (const auto& e : row) os << " " << std::setw(28) << complex_text(e);
      os << " |\n";
    }
  } else if (v.is_object()) {
    os << "\n";
    for (auto it = v.begin(); it != v.end(); ++it) {
      os << indent << "  " << it.key() << ": ";
      render_value(os, *it, indent + "  ");
    }
  } else if (v.is_array() && !v.empty() && (v[0].is_object() || v[0].is_array())) {
    os << "\n";
    for (size_t i = 0; i < v.size(); ++i) {
      os << indent << "  [" << i << "]: ";
      render_value(os, v[i], indent + "  ");
    }
  } else {
    os << v.dump() << "\n";
  }
}

}  // namespace

std::string pretty(const json& result) {
  std::ostringstream os;
  os << result.value("command", std::string("?")) << " (" << result.value("tool_version", std::string()) << ")\n";
  for (const char* section : {"outputs", "error", "diagnostics"}) {
    if (!result.contains(section)) continue;
    os << section << ":";
    render_value(os, result[section], "");
  }
  return os.str();
}

int run_command(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err, std::istream& in) {
  Session session;
  Flags& flags = session.flags;
  CLI::App app{"Numerical toolkit for flat connections, current algebras and coadjoint orbits on punctured spheres",
               "holocurrent"};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);
  app.add_option("--tol", flags.tol, "transport tolerance (default 1e-9)");
  app.add_option("--seed", flags.seed, "seed for randomized suites");
  app.add_option("--max-word-len", flags.max_word_len, "word length for trace invariants (default 4)");
  app.add_option("--quadrature-order", flags.quadrature_order, "Gauss-Legendre nodes per panel (default 32)");
  app.add_option("--out-dir", flags.out_dir, "persist results and transport cache here");
  app.add_flag("--pretty", flags.pretty, "human-readable output");

  std::string file, file2, suite;
  auto add = [&](const char* name, const char* help, bool two = false) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->fallthrough();
    sub->add_option("problem", file, "problem document path, or - for standard input")->required();
    if (two) sub->add_option("other", file2, "second problem document")->required();
    return sub;
  };
  add("monodromy", "period map and conjugacy invariants");
  add("classify", "orbit certificate of lambda d + xi");
  add("same-orbit", "compare the orbits of two problems", true);
  add("cocycle", "central cocycle of x and y along sigma");
  add("pairing", "pairing of (level, form) with (central, x)");
  add("kks", "KKS form on tangent generators x and y, with the loop-group value");
  add("integrate", "primitive of an integrable form at the sample points");
  add("frenkel", "monodromy of z' = -(1/lambda) X z for a Fourier loop");
  add("transitions", "transition functions on an annulus chart cover");
  CLI::App* verify = app.add_subcommand("verify", "run a seeded property suite");
  verify->fallthrough();
  verify->add_option("--suite", suite, "suite name")->required()->check(CLI::IsMember(suite_names()));

  std::vector<std::string> args(argv.rbegin(), argv.rend() - 1);
  try {
    app.parse(args);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForVersion&) {
    out << kToolVersion << "\n";
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  json result;
  result["command"] = command;
  result["tool_version"] = kToolVersion;
  int code = 0;
  try {
    if (!flags.out_dir.empty()) session.store = std::make_unique<ResultStore>(flags.out_dir);
    Outcome o;
    json input;
    if (command == "verify") {
      const Effective eff = resolve(flags, Options{});
      const SuiteReport rep = run_suite(suite, eff.seed);
      o.outputs = to_json(rep);
      o.exit_code = rep.passed() ? 0 : 1;
      result["input_digest"] = sha256_hex(verdict_digest_input(suite, eff.seed));
    } else {
      const Loaded l = load(session, file, in);
      if (command == "monodromy") o = cmd_monodromy(session, l);
      else if (command == "classify") o = cmd_classify(session, l);
      else if (command == "same-orbit") o = cmd_same_orbit(session, l, load(session, file2, in));
      else if (command == "cocycle") o = cmd_cocycle(session, l);
      else if (command == "pairing") o = cmd_pairing(session, l);
      else if (command == "kks") o = cmd_kks(session, l);
      else if (command == "integrate") o = cmd_integrate(session, l);
      else if (command == "frenkel") o = cmd_frenkel(session, l);
      else if (command == "transitions") o = cmd_transitions(session, l);
      json digest_input = {{"command", command}, {"input", l.canonical_input}, {"effective", l.eff.to_json()}};
      if (command == "same-orbit") digest_input["other"] = to_json(parse_problem(read_json(file2, in)));
      result["input_digest"] = sha256_hex(canonical(digest_input));
      result["effective_options"] = l.eff.to_json();
    }
    result["outputs"] = std::move(o.outputs);
    code = o.exit_code;
  } catch (const Error& e) {
    result["error"] = error_json(class_name(e.error_class()), e.code(), e.what());
    code = e.exit_code();
  } catch (const json::exception& e) {
    result["error"] = error_json("input", "SchemaError", e.what());
    code = 2;
  } catch (const std::exception& e) {
    result["error"] = error_json("numerical", "InternalError", e.what());
    code = 3;
  }

  if (session.cache_hits || session.cache_misses) {
    session.diagnostics["cache"] = session.cache_hits > 0 && session.cache_misses == 0 ? "hit" : "miss";
    session.diagnostics["cache_hits"] = session.cache_hits;
    session.diagnostics["cache_misses"] = session.cache_misses;
  }
  if (!session.warnings.empty()) session.diagnostics["warnings"] = session.warnings;
  result["diagnostics"] = session.diagnostics;
  for (const auto& w : session.warnings) err << "warning: " << w << "\n";
  if (result.contains("error")) err << "error: " << result["error"]["message"].get<std::string>() << "\n";

  if (session.store && result.contains("input_digest")) {
    try {
      const auto path = session.store->persist(result["input_digest"].get<std::string>(), command, result);
      result["diagnostics"]["persisted"] = path.filename().string();
    } catch (const Error& e) {
      err << "error: " << e.what() << "\n";
      if (code == 0) code = 2;
    }
  }
  if (flags.pretty) out << pretty(result);
  else out << canonical(result) << "\n";
  return code;
}

}  // namespace holo::cli
