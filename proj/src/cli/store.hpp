#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "holo/transport.hpp"

namespace holo::cli {

/// Canonical text: key-sorted, compact, shortest round-trip doubles.
std::string canonical(const nlohmann::json& j);

/// On-disk layout under the output directory:
///   <digest>.result      canonical ResultDocument
///   index.json           digest -> command
///   cache/<key>.json     period-map entries with a checksum
class ResultStore {
 public:
  explicit ResultStore(std::filesystem::path dir);

  /// Throws Input/IoError.
  std::filesystem::path persist(const std::string& digest, const std::string& command, const nlohmann::json& result);

  /// Missing entries return nullopt; unreadable or corrupt entries add a warning and return nullopt.
  std::optional<MonodromyTuple> load_tuple(const std::string& key, std::vector<std::string>& warnings) const;
  void store_tuple(const std::string& key, const MonodromyTuple& t);

  const std::filesystem::path& dir() const noexcept { return dir_; }
  std::filesystem::path cache_path(const std::string& key) const;

 private:
  std::filesystem::path dir_;
};

}  // namespace holo::cli
