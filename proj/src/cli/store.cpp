#include "store.hpp"

#include <fstream>
#include <sstream>

#include "holo/digest.hpp"
#include "holo/error.hpp"
#include "problem.hpp"

namespace holo::cli {

namespace fs = std::filesystem;

namespace {

void write_file(const fs::path& p, const std::string& text) {
  const fs::path tmp = p.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw input_error("IoError", "cannot write " + tmp.string());
    out << text;
    if (!out) throw input_error("IoError", "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, p, ec);
  if (ec) throw input_error("IoError", "cannot rename " + tmp.string() + ": " + ec.message());
}

nlohmann::json tuple_payload(const MonodromyTuple& t) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& g : t.entries) entries.push_back(encode(g.matrix()));
  return {{"basepoint", encode(t.basepoint)}, {"entries", std::move(entries)}};
}

}  // namespace

std::string canonical(const nlohmann::json& j) { return j.dump(); }

ResultStore::ResultStore(fs::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(dir_ / "cache", ec);
  if (ec) throw input_error("IoError", "cannot create " + (dir_ / "cache").string() + ": " + ec.message());
}

fs::path ResultStore::persist(const std::string& digest, const std::string& command, const nlohmann::json& result) {
  const fs::path file = dir_ / (digest + ".result");
  write_file(file, canonical(result) + "\n");
  const fs::path index_file = dir_ / "index.json";
  nlohmann::json index = nlohmann::json::object();
  if (fs::exists(index_file)) {
    std::ifstream in(index_file);
    index = nlohmann::json::parse(in, nullptr, false);
    if (index.is_discarded() || !index.is_object()) index = nlohmann::json::object();
  }
  index[digest] = command;
  write_file(index_file, canonical(index) + "\n");
  return file;
}

fs::path ResultStore::cache_path(const std::string& key) const { return dir_ / "cache" / (key + ".json"); }

std::optional<MonodromyTuple> ResultStore::load_tuple(const std::string& key, std::vector<std::string>& warnings) const {
  const fs::path p = cache_path(key);
  if (!fs::exists(p)) return std::nullopt;
  auto corrupt = [&](const std::string& why) {
    warnings.push_back("ignored corrupt cache entry " + p.filename().string() + " (" + why + ")");
    return std::nullopt;
  };
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  const nlohmann::json j = nlohmann::json::parse(buf.str(), nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("payload") || !j.contains("checksum") || !j["checksum"].is_string()) {
    return corrupt("unparseable");
  }
  if (sha256_hex(canonical(j["payload"])) != j["checksum"].get<std::string>() || j.value("key", std::string()) != key) {
    return corrupt("checksum mismatch");
  }
  try {
    const nlohmann::json& payload = j["payload"];
    MonodromyTuple t;
    t.basepoint = decode_complex(payload.at("basepoint"), "cache.basepoint");
    for (const auto& e : payload.at("entries")) {
      const int n = static_cast<int>(e.size());
      t.entries.emplace_back(decode_matrix(e, n, "cache.entries"));
    }
    return t;
  } catch (const std::exception& e) {
    return corrupt(e.what());
  }
}

void ResultStore::store_tuple(const std::string& key, const MonodromyTuple& t) {
  nlohmann::json payload = tuple_payload(t);
  const std::string checksum = sha256_hex(canonical(payload));
  write_file(cache_path(key), canonical({{"key", key}, {"payload", std::move(payload)}, {"checksum", checksum}}) + "\n");
}

}  // namespace holo::cli
