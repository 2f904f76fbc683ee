#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace stokpp {

enum class CheckStatus { pass, fail, warn, skipped };

std::string to_string(CheckStatus s);

struct CheckResult {
  int id = 0;
  std::string name;
  CheckStatus status = CheckStatus::skipped;
  std::string detail;  ///< measured values against the target
  double seconds = 0.0;
  bool full_only = false;  ///< long-running; executed only with `full`
};

struct AcceptanceOptions {
  std::uint64_t seed = 0;
  bool full = false;
  unsigned jobs = 0;
  std::vector<int> only;  ///< empty: every criterion
  std::function<void(const CheckResult&)> on_result;
};

/// Ids, names and tags of the criteria without running them.
std::vector<CheckResult> acceptance_catalog();

/// Runs the selected criteria in id order. A criterion that throws is
/// reported as failed with the error text.
std::vector<CheckResult> run_acceptance(const AcceptanceOptions& options);

/// "[PASS] 3 speed ..." style line.
std::string format_check(const CheckResult& r);

}  // namespace stokpp
