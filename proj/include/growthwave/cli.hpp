#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "growthwave/weight.hpp"

namespace growthwave::cli {

inline constexpr const char* kSchemaVersion = "1.0";

struct RunConfig {
  nlohmann::json raw;  // as read, echoed into every JSON artifact
  Weight weight = Weight::power(1.0);
  double A = 0.0;      // <= 0 selects the default band base
  int J = 12;
  int l_max = 8;
  int order = 0;       // 0 selects the smallest order with enough regularity
  int tab_depth = 12;
  int j0 = 3;
  std::uint64_t seed = 1;
  int trials = 100;
  std::vector<double> scales;
  unsigned threads = 1;
  nlohmann::json boundary;  // {"kind": "constant" | "cosine" | "step" | "random", ...}
  nlohmann::json options;   // command-specific
  std::filesystem::path out = "growthwave_out";
};

// Throws ValidationError on malformed or out-of-range fields.
RunConfig parse_config(const nlohmann::json& raw);
RunConfig load_config(const std::filesystem::path& path);

struct RunResult {
  int exit_code = 0;
  std::vector<std::filesystem::path> artifacts;
};

const std::vector<std::string>& commands();

// Runs one command; on failure writes a single-line JSON diagnostic to `diag` and returns 1 or 2.
RunResult run(const std::string& command, const RunConfig& config, std::ostream& diag);

// Loads, applies overrides and runs; every failure (including config parsing) maps to an exit code.
RunResult run_from_file(const std::string& command, const std::filesystem::path& config_path,
                        std::optional<std::uint64_t> seed, std::optional<std::filesystem::path> out, std::ostream& diag);

// RFC-4180 CSV with a header row; numbers in shortest round-trip form.
class CsvWriter {
 public:
  CsvWriter(std::filesystem::path path, const std::vector<std::string>& header);
  CsvWriter& cell(double x);
  CsvWriter& cell(long long x);
  CsvWriter& cell(const std::string& s);
  void end_row();
  // Writes the file; throws ValidationError when it cannot be written.
  std::filesystem::path close();

 private:
  std::filesystem::path path_;
  std::string buffer_;
  bool row_start_ = true;
};

std::string format_number(double x);

}  // namespace growthwave::cli
