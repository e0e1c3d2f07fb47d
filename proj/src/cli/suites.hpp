#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

namespace holo::cli {

struct SuiteVerdict {
  std::string property;
  int index = 0;
  double value = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

struct SuiteReport {
  std::string suite;
  std::uint64_t seed = 0;
  std::vector<SuiteVerdict> verdicts;

  bool passed() const;
  /// Largest value seen for a property, and whether all its samples passed.
  double worst(const std::string& property) const;
  bool property_passed(const std::string& property) const;
};

std::vector<std::string> suite_names();

/// Samples use CounterRng(seed ^ fnv1a(suite), sample index), so each sample's
/// stream is independent of evaluation order. Throws Input/UnknownSuite.
SuiteReport run_suite(const std::string& name, std::uint64_t seed);

nlohmann::json to_json(const SuiteReport& r);

}  // namespace holo::cli
