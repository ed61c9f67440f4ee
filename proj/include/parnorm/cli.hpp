#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "parnorm/io.hpp"

namespace parnorm::cli {

using io::json;

inline constexpr const char* kConfigSchema = "parnorm/config/v1";
inline constexpr const char* kReportSchema = "parnorm/report/v1";

enum ExitCode : int { kOk = 0, kReplayMismatch = 1, kValidation = 2, kNumerical = 3 };

struct Overrides {
  std::optional<std::string> subcommand;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> max_r;
  std::optional<double> threshold;
  std::optional<std::string> format;  // json | csv
};

// Parses a config file; {"file": path} entries are inlined, paths relative to
// the config's directory.
json load_config(const std::string& path);

// Applies overrides and defaults and validates. The result is the effective
// config embedded in reports; normalizing it again is a no-op.
json normalize_config(json config, const Overrides& overrides = {});

// Output directory: explicit value, else $PARNORM_OUT_DIR, else ./parnorm_out.
std::string resolve_out_dir(const std::optional<std::string>& out);

struct RunResult {
  int exit_code = kOk;
  json report;
  std::vector<std::string> written;
};

// Executes an effective config, writes report.json and traces into out_dir.
// Errors are written to `err` as one JSON object.
RunResult run(const json& config, const std::string& out_dir, std::ostream& err);

// Loads, normalizes and runs; returns the exit code.
int run_file(const std::string& config_path, const Overrides& overrides,
             const std::optional<std::string>& out, std::ostream& err);

// Re-executes the config embedded in a report and compares traces byte for
// byte. `config_override` replaces the embedded config; it must use the same
// subcommand and ordering policies.
int replay(const std::string& report_path, const std::optional<std::string>& out_dir,
           const std::optional<std::string>& config_override, std::ostream& out,
           std::ostream& err);

// Schema problems of a report (empty when valid).
std::vector<std::string> validate_report(const json& report);

// 64-bit FNV-1a, hex encoded.
std::string fnv1a64(const std::string& bytes);

}  // namespace parnorm::cli
