#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "selinf/io.hpp"
#include "selinf/jdc.hpp"
#include "selinf/selectivity.hpp"

namespace selinf::cli {

inline constexpr int kExitPass = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitNegative = 2;

enum class OutputFormat { Human, Json };

struct RunConfig {
  std::string system_file;
  /// Each entry is a file path or inline JSON; empty means the order-distance
  /// with outputs ranked by listing order.
  std::vector<std::string> metric_configs;
  std::size_t max_len = kDefaultMaxLength;
  double tol_sum = kDefaultSumTolerance;
  double tol_test = kDefaultTestTolerance;
  double tol_lp = kDefaultLpTolerance;
  OutputFormat format = OutputFormat::Human;
  io::ArithmeticMode arithmetic = io::ArithmeticMode::Auto;
  /// Sequence count bound for `check`, hidden-space bound for `jdc`.
  std::size_t cap = kDefaultHiddenCap;
  bool rho_grid = false;
};

struct CommandResult {
  int exit_code = kExitPass;
  io::json report;
};

CommandResult cmd_check(const RunConfig& config);
CommandResult cmd_jdc(const RunConfig& config);
CommandResult cmd_demo_normal(const RunConfig& config = {});

/// Canonical JSON text: two-space indent, sorted keys, trailing newline.
std::string render_json(const io::json& report);
/// Human-readable text rendered from the JSON report.
std::string render_human(const io::json& report);

/// Full command-line entry point; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace selinf::cli
