#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "holo/error.hpp"
#include "problem.hpp"
#include "store.hpp"
#include "suites.hpp"

using namespace holo;
using namespace holo::cli;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  json result;
  std::string err;
};

Run run(std::vector<std::string> args, const std::string& stdin_text = "") {
  args.insert(args.begin(), "holocurrent");
  std::ostringstream out, err;
  std::istringstream in(stdin_text);
  const int code = run_command(args, out, err, in);
  json j = json::parse(out.str(), nullptr, false);
  return {code, j, err.str()};
}

fs::path scratch(const std::string& name) {
  const char* env = std::getenv("HOLO_TEST_TMP");
  fs::path root = env ? fs::path(env) : fs::temp_directory_path() / "holo_cli_tests";
  fs::path p = root / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string write(const fs::path& dir, const std::string& name, const json& j) {
  const fs::path p = dir / name;
  std::ofstream(p) << j.dump(2);
  return p.string();
}

json mat(std::initializer_list<std::initializer_list<double>> rows) {
  json m = json::array();
  for (const auto& r : rows) {
    json row = json::array();
    for (double v : r) row.push_back({v, 0.0});
    m.push_back(row);
  }
  return m;
}

json base_problem() {
  return {{"algebra", {{"family", "sl"}, {"n", 2}}}, {"surface", {{"punctures", {{0.0, 0.0}, {1.0, 0.0}}}}}};
}

json cocycle_problem() {
  json p = {{"algebra", {{"family", "sl"}, {"n", 2}}}, {"surface", {{"punctures", {{0.0, 0.0}}}}}, {"sigma_index", 0}};
  p["x"] = json::array({{{"matrix", mat({{0, 1}, {0, 0}})}, {"pole", "polynomial"}, {"order", 1}}});
  p["y"] = json::array({{{"matrix", mat({{0, 0}, {1, 0}})}, {"pole", 0}, {"order", 1}}});
  return p;
}

json fuchsian_problem() {
  json p = base_problem();
  p["form"] = json::array({{{"matrix", mat({{0.1, 0.3}, {0.2, -0.1}})}, {"pole", 0}, {"order", 1}},
                           {{"matrix", mat({{-0.2, 0.1}, {0.4, 0.2}})}, {"pole", 1}, {"order", 1}}});
  p["level"] = {1.0, 0.0};
  return p;
}

}  // namespace

TEST_CASE("problem schema round trip") {
  json p = fuchsian_problem();
  p["surface"]["basepoint"] = {0.5, -2.0};
  p["sigma_index"] = 1;
  p["current"] = json::array({json::array({{{"matrix", mat({{0, 1}, {0, 0}})}, {"pole", "polynomial"}, {"order", 2}}})});
  p["x"] = json::array({{{"matrix", mat({{1, 0}, {0, -1}})}, {"pole", 1}, {"order", 2}}});
  p["central"] = {0.5, 0.25};
  p["loop"] = json::array({mat({{0, 0}, {1, 0}}), mat({{1, 0}, {0, -1}}), mat({{0, 1}, {0, 0}})});
  p["samples"] = json::array({{2.0, 1.0}});
  p["annulus"] = {{"center", {0.5, 1.2}}, {"inner", 0.2}, {"outer", 0.5}, {"charts", 4}};
  p["options"] = {{"tol", 1e-8}, {"seed", 3}, {"max_word_len", 3}, {"quadrature_order", 24}};
  const ProblemDocument d = parse_problem(p);
  const json again = to_json(d);
  CHECK(canonical(again) == canonical(to_json(parse_problem(again))));
  CHECK(canonical(again) == canonical(p));
}

TEST_CASE("schema violations name the location") {
  auto expect_schema = [](const json& p, const std::string& where) {
    try {
      parse_problem(p);
      FAIL("expected SchemaError");
    } catch (const Error& e) {
      CHECK(e.code() == "SchemaError");
      CHECK(e.error_class() == ErrorClass::Input);
      CHECK(std::string(e.what()).find(where) != std::string::npos);
    }
  };
  json p = fuchsian_problem();
  p["bogus"] = 1;
  expect_schema(p, "bogus");
  p = fuchsian_problem();
  p["form"][0]["matrix"] = mat({{1, 0}, {0, 0}});
  expect_schema(p, "$.form[0]");
  p = fuchsian_problem();
  p["algebra"]["n"] = 7;
  expect_schema(p, "$.algebra.n");
  p = fuchsian_problem();
  p["loop"] = json::array({mat({{0, 0}, {0, 0}}), mat({{0, 0}, {0, 0}})});
  expect_schema(p, "$.loop");
  p = fuchsian_problem();
  p["form"][0]["pole"] = 5;
  expect_schema(p, "$.form[0]");
}

TEST_CASE("cocycle command reproduces -8 pi i") {
  const fs::path dir = scratch("cocycle");
  const Run r = run({"cocycle", write(dir, "p.json", cocycle_problem())});
  CHECK(r.code == 0);
  const auto v = r.result["outputs"]["value"];
  CHECK(std::abs(v[0].get<double>()) < 1e-9);
  CHECK(std::abs(v[1].get<double>() + 8.0 * std::numbers::pi) < 1e-9);
  CHECK(r.result["tool_version"] == kToolVersion);
  CHECK(r.result["input_digest"].get<std::string>().size() == 64);
}

TEST_CASE("classify on the zero form gives the identity tuple") {
  json p = base_problem();
  p["level"] = {1.0, 0.0};
  const Run r = run({"classify", "-"}, p.dump());
  CHECK(r.code == 0);
  for (const auto& m : r.result["outputs"]["certificate"]["tuple"]["entries"]) {
    CHECK(m[0][0][0].get<double>() == 1.0);
    CHECK(m[0][1][0].get<double>() == 0.0);
    CHECK(m[1][1][0].get<double>() == 1.0);
  }
}

TEST_CASE("exit codes") {
  const fs::path dir = scratch("exit");
  // 1: integrability asserted on a form with monodromy
  const Run r1 = run({"integrate", write(dir, "f.json", fuchsian_problem())});
  CHECK(r1.code == 1);
  CHECK(r1.result["outputs"]["error"]["code"] == "NonTrivialMonodromy");
  // 2: schema and I/O
  json bad = fuchsian_problem();
  bad["surface"]["punctures"] = "nope";
  CHECK(run({"monodromy", write(dir, "bad.json", bad)}).code == 2);
  CHECK(run({"monodromy", (dir / "missing.json").string()}).code == 2);
  CHECK(run({"monodromy", "-"}, "{not json").code == 2);
  CHECK(run({"no-such-command"}).code == 2);
  const Run pole = run({"monodromy", "-"}, [] {
    json p = fuchsian_problem();
    p["surface"]["basepoint"] = {0.0, 0.0};
    return p.dump();
  }());
  CHECK(pole.code == 2);
  // 3: tolerance not attainable
  json stiff = fuchsian_problem();
  stiff["form"][0]["matrix"] = mat({{400.0, 900.0}, {700.0, -400.0}});
  const Run r3 = run({"--tol", "1e-15", "monodromy", write(dir, "stiff.json", stiff)});
  CHECK(r3.code == 3);
  CHECK(r3.result["error"]["class"] == "numerical");
  // 0
  CHECK(run({"monodromy", write(dir, "ok.json", fuchsian_problem())}).code == 0);
}

TEST_CASE("verify is deterministic") {
  const Run a = run({"verify", "--suite", "gauge-invariance", "--seed", "7"});
  const Run b = run({"verify", "--suite", "gauge-invariance", "--seed", "7"});
  CHECK(a.code == 0);
  CHECK(canonical(a.result) == canonical(b.result));
  CHECK(canonical(a.result["outputs"]["verdicts"]) == canonical(b.result["outputs"]["verdicts"]));
  const Run c = run({"verify", "--suite", "gauge-invariance", "--seed", "8"});
  CHECK(canonical(a.result["outputs"]["verdicts"]) != canonical(c.result["outputs"]["verdicts"]));
  CHECK(a.result["outputs"]["rng"] == "splitmix64-ctr-v1");
  CHECK(run({"verify", "--suite", "nope"}).code == 2);
  CHECK_THROWS_AS(run_suite("nope", 1), Error);
}

TEST_CASE("suite reports") {
  const SuiteReport r = run_suite("cartan", 1);
  CHECK(r.passed());
  CHECK(r.property_passed("idempotence"));
  CHECK(r.worst("idempotence") < 1e-10);
  CHECK(suite_names().size() == 12);
}

TEST_CASE("persistence, cache reuse and corruption") {
  const fs::path dir = scratch("store");
  const fs::path out = dir / "out";
  const std::string prob = write(dir, "p.json", fuchsian_problem());
  const Run first = run({"--out-dir", out.string(), "monodromy", prob});
  CHECK(first.code == 0);
  CHECK(first.result["diagnostics"]["cache"] == "miss");
  const std::string digest = first.result["input_digest"];
  CHECK(fs::exists(out / (digest + ".result")));
  json index = json::parse(std::ifstream(out / "index.json"));
  CHECK(index[digest] == "monodromy");

  const Run second = run({"--out-dir", out.string(), "monodromy", prob});
  CHECK(second.result["diagnostics"]["cache"] == "hit");
  CHECK(canonical(second.result["outputs"]) == canonical(first.result["outputs"]));

  const Run looser = run({"--out-dir", out.string(), "--tol", "1e-8", "monodromy", prob});
  CHECK(looser.result["diagnostics"]["cache"] == "miss");
  CHECK(looser.result["input_digest"] != first.result["input_digest"]);

  // corrupt every cache entry
  for (const auto& e : fs::directory_iterator(out / "cache")) {
    std::ofstream(e.path(), std::ios::trunc) << "{\"key\": \"x\", \"payload\": [], \"checksum\": \"0\"}";
  }
  const Run third = run({"--out-dir", out.string(), "monodromy", prob});
  CHECK(third.code == 0);
  CHECK(third.result["diagnostics"]["cache"] == "miss");
  CHECK(third.result["diagnostics"]["warnings"].size() == 1);
  CHECK(third.err.find("ignored corrupt cache entry") != std::string::npos);
  CHECK(canonical(third.result["outputs"]) == canonical(first.result["outputs"]));
  // recomputed entry is valid again
  CHECK(run({"--out-dir", out.string(), "monodromy", prob}).result["diagnostics"]["cache"] == "hit");

  // the persisted file is the canonical result
  std::ifstream f(out / (digest + ".result"));
  std::stringstream buf;
  buf << f.rdbuf();
  CHECK(json::parse(buf.str())["outputs"] == third.result["outputs"]);
}

TEST_CASE("other commands run") {
  const fs::path dir = scratch("commands");
  json p = fuchsian_problem();
  p["x"] = json::array({{{"matrix", mat({{0, 1}, {0, 0}})}, {"pole", "polynomial"}, {"order", 1}}});
  p["y"] = json::array({{{"matrix", mat({{1, 0}, {0, -1}})}, {"pole", 0}, {"order", 1}}});
  p["central"] = {2.0, 0.0};
  p["current"] = json::array({json::array({{{"matrix", mat({{0, 0.3}, {0, 0}})}, {"pole", "polynomial"}, {"order", 1}}})});
  p["loop"] = json::array({mat({{0, 0}, {0.2, 0}}), mat({{0.3, 0}, {0, -0.3}}), mat({{0, 0.1}, {0, 0}})});
  p["annulus"] = {{"center", {0.5, 1.2}}, {"inner", 0.2}, {"outer", 0.5}, {"charts", 4}};
  const std::string path = write(dir, "p.json", p);
  for (const char* cmd : {"monodromy", "classify", "pairing", "kks", "frenkel", "transitions"}) {
    const Run r = run({cmd, path});
    CHECK_MESSAGE(r.code == 0, cmd << ": " << r.err);
    CHECK(r.result["command"] == cmd);
  }
  const Run same = run({"same-orbit", path, path});
  CHECK(same.code == 0);
  CHECK(same.result["outputs"]["verdict"] == "equivalent");

  json q = p;
  q["form"] = json::array({{{"matrix", mat({{0.3, 0.0}, {0.0, -0.3}})}, {"pole", "polynomial"}, {"order", 0}}});
  q["samples"] = json::array({{2.0, 1.0}, {-1.0, 0.5}});
  const Run integ = run({"integrate", write(dir, "q.json", q)});
  CHECK(integ.code == 0);
  CHECK(integ.result["outputs"]["samples"].size() == 2);

  const Run pretty_run = [&] {
    std::ostringstream out, err;
    std::istringstream in;
    const int code = run_command({"holocurrent", "--pretty", "cocycle", write(dir, "c.json", cocycle_problem())}, out, err, in);
    return Run{code, json(out.str()), err.str()};
  }();
  CHECK(pretty_run.code == 0);
  CHECK(pretty_run.result.get<std::string>().find("cocycle") == 0);
}
