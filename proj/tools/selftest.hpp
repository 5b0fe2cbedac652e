#pragma once

// Acceptance suite shared by `hypbdry selftest` and the ctest acceptance binary.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace hypbdry::selftest {

struct Options {
  int threads = 0;  // 0 = hardware concurrency
  std::uint64_t seed = 1;
  std::filesystem::path cache_dir;  // empty = in-memory orbit caches only
};

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;  // deterministic: never contains timings
  double wall_ms = 0.0;
};

constexpr int kCriteria = 10;

CriterionResult run_criterion(int id, const Options& opt);
/// Runs the listed criteria (all when empty) in order.
std::vector<CriterionResult> run(const Options& opt, const std::vector<int>& ids = {});
/// One line per criterion; wall times only when `timing` is set.
std::string format_report(const std::vector<CriterionResult>& results, bool timing);

}  // namespace hypbdry::selftest
