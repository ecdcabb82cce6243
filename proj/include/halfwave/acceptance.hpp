#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "halfwave/report.hpp"

namespace halfwave {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;

  // "[PASS] 3 knapp_growth: ..." style, one line.
  std::string line() const;
};

struct AcceptanceOptions {
  std::filesystem::path output_dir;
  std::uint64_t seed = 20240917;
  int ensemble_size = 20;
  // Criterion 10 reruns 1..9 into a second directory and compares artifacts byte by byte.
  bool check_determinism = true;
  // Empty runs every criterion.
  std::vector<int> only;
};

struct AcceptanceResult {
  std::vector<CriterionResult> criteria;

  bool all_passed() const;
  Json to_json() const;
};

// Artifacts of criterion n go to output_dir/run1/cNN_<name>/; the per-run manifest
// (wall times) is kept out of the byte comparison.
AcceptanceResult run_acceptance(const AcceptanceOptions& options,
                                const std::function<void(const CriterionResult&)>& on_result = {});

// Files under `a` and `b` (recursively, manifest.json excluded) with identical names and bytes.
// Differences are appended to `mismatches`.
bool identical_artifacts(const std::filesystem::path& a, const std::filesystem::path& b,
                         std::vector<std::string>& mismatches);

}  // namespace halfwave
