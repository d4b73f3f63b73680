// The acceptance suite: ten end-to-end checks with fixed tolerances. Shared by
// the acceptance test binary and `hyperksh accept`.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace hyperksh::acceptance {

struct Options {
  std::uint64_t seed = 20240611;
  /// Mutation mode: flip the sign of the closed-form width b_tau.
  bool flip_width_sign = false;
};

struct CriterionResult {
  std::string id;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

/// Criterion ids in execution order.
std::vector<std::string> criterion_ids();
std::string criterion_title(const std::string& id);

/// Runs one criterion; throws std::invalid_argument for an unknown id.
/// Exceptions raised inside a check count as a failure.
CriterionResult run_criterion(const std::string& id, const Options& options = {});
std::vector<CriterionResult> run_all(const Options& options = {});

/// "PASS <id> ..." / "FAIL <id> ..." one-line summary.
std::string format_line(const CriterionResult& r);

}  // namespace hyperksh::acceptance
