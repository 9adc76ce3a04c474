#pragma once
// Command dispatch behind the tvcert executable.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace tvcert {

enum class ReportFormat { json, csv, text };

struct RunConfig {
  std::string command;  // denoise | certify | flow | calibrate | mollify | oracle
  std::string input;
  std::string output;   // artifact prefix; empty writes nothing
  double lambda = 1.0;
  std::optional<double> tau;
  int steps = 10;
  int height = 256;
  int width = 256;
  double h = 0.0;       // 0: 1 / max(height, width)
  double tol_gap = 1e-8;
  double tol_trace = 1e-4;
  double eps0 = 0.0;    // 0: 8 h
  std::uint64_t seed = 0;
  std::string shape;    // kind name, inline JSON or path to a JSON file
  double radius = 0.3;
  std::size_t samples = 1000;
  ReportFormat report = ReportFormat::text;

  /// Throws std::invalid_argument on non-positive tolerances or sizes.
  void validate() const;
};

inline constexpr int kExitCertified = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitRefuted = 2;
inline constexpr int kExitInconclusive = 3;

/// Runs one command; the report goes to `out`, diagnostics to `err`.
int run(const RunConfig& config, std::ostream& out, std::ostream& err);

}  // namespace tvcert
