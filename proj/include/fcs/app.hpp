#pragma once

// Pipelines behind the command-line subcommands, callable in-process.

#include <cstdint>
#include <iosfwd>
#include <string>

#include "fcs/config.hpp"
#include "json.hpp"

namespace fcs::app {

enum ExitCode : int { kSuccess = 0, kContractError = 2, kIntegrityError = 3 };

struct RunOptions {
  unsigned threads = 1;
  std::uint64_t seed = 0;
};

/// The full result document. Everything except the "timing" object is a
/// deterministic function of the config and the tool version.
nlohmann::json run(const ScenarioConfig& config, const RunOptions& options);

/// The document with "timing" removed.
nlohmann::json numeric_payload(const nlohmann::json& document);

inline constexpr double kOracleGate = 1e-9;
inline constexpr Index kOracleGridPoints = 33;

struct OracleReport {
  Index dimension = 0;
  Index grid_size = 0;
  double chi_deviation = 0.0;           // max over grid and both engine kernels
  double distribution_deviation = 0.0;  // max per-entry |p_engine - p_oracle|
  double trdet_deviation = 0.0;         // seeded random identity checks
  double omega_gamma_deviation = 0.0;
  std::uint64_t seed = 0;

  bool passed() const;
  nlohmann::json to_json() const;
};

/// Engine vs brute force. Dimension above 14 is a ContractError.
OracleReport oracle_check(const ScenarioConfig& config, const RunOptions& options);

/// CSV table for the named scan. Unknown names are a ContractError.
std::string scan_csv(const ScenarioConfig& config, const std::string& scan_name,
                     const RunOptions& options);

/// Fixed 17-significant-digit decimal formatting.
std::string format_number(double x);

/// Command-line entry point: parses argv, dispatches, maps errors to exit
/// codes. Output goes to the --out file or `out`; diagnostics to `err`.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace fcs::app
