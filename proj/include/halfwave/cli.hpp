#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "halfwave/datagen.hpp"
#include "halfwave/report.hpp"

namespace halfwave {

struct RunConfig {
  static constexpr int kSchemaVersion = 1;

  std::string command;
  // Grid.
  int n = 128;
  double length = 12.0;
  // Data shell and the plan's shell range.
  int k = 3;
  int k_lo = 2;
  int k_hi = 3;
  // Exponents.
  double s = 0.0;
  double p = 4.0;
  double q = 2.0;
  double r = 2.0;
  double epsilon = 0.1;
  std::vector<double> times;
  // Ensemble.
  EnsembleKind kind = EnsembleKind::random_annulus;
  int count = 4;
  std::uint64_t seed = 1;
  double width = 1.0;
  // random_annulus: physical envelope width (gives the data a support radius).
  std::optional<double> envelope;
  double amplitude = 1.0;
  std::optional<std::filesystem::path> input;
  // Solver.
  int alpha = 3;
  int sign = -1;
  double dt = 1.0 / 1024.0;
  double final_time = 1.0;
  bool dealias = true;
  int order = 7;
  // Output.
  std::filesystem::path output_dir;
  std::string format = "both";
  // suite
  int ensemble_size = 20;
  bool determinism = true;

  // Per-command defaults (grid, times, exponents) before any file or flag is applied.
  static RunConfig defaults_for(const std::string& command);
  // Sets one key from its text form; ConfigError on unknown keys or bad values.
  void set(const std::string& key, const std::string& value);
  // ConfigError on anything a module precondition would reject.
  void validate() const;
  Json to_json() const;

  bool wants_csv() const { return format == "csv" || format == "both"; }
  bool wants_json() const { return format == "json" || format == "both"; }
};

// key = value lines; '#' starts a comment; blank lines are skipped.
std::map<std::string, std::string> parse_config_text(const std::string& text);
std::map<std::string, std::string> read_config_file(const std::filesystem::path& path);

// Default output root: $HALFWAVE_OUTPUT_DIR, else ./halfwave_out.
std::filesystem::path default_output_dir();

// Runs one validated configuration. Exit status: 0 ok, 1 suite criteria failed,
// 3 numerical validation failure (partial artifacts flagged in the manifest).
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

// Full command line entry: 0 ok, 2 usage or configuration error, otherwise as run().
int main_entry(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace halfwave
