#pragma once

#include "run_config.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace compham::cli {

enum ExitCode : int { kOk = 0, kVerificationFailed = 1, kConfigError = 2, kIntegrationFailed = 3 };

/// Runs one invocation; args[0] is the program name. Reports go to out,
/// diagnostics to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

struct CheckResult {
  std::string name;
  std::string status;  // pass | fail | skipped
  double worst = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

/// The checks behind `verify`, in report order.
std::vector<CheckResult> verify_checks(const ModelSpec& spec, unsigned seed);

struct SweepCell {
  double lambda = 0.0;
  double epsilon = 0.0;
  std::string status;  // ok | n/a | failed
  double rate = 0.0;        // least-squares slope of log|pbar_1| against t; nan unless ok
  double expected = 0.0;    // 1/lambda for the two-oscillator family, else nan
  double max_pbar = 0.0;
  std::string message;
};

/// One integration per (lambda, epsilon) in cfg.sweep, run concurrently,
/// returned in lambda-major order.
std::vector<SweepCell> run_sweep(const RunConfig& cfg);

}  // namespace compham::cli
