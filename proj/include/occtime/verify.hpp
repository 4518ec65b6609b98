#pragma once

// The cross-validation matrix: eleven numbered criteria, each made of named
// checks with a measured value and the tolerance it is held to.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace occtime {

enum class VerifyScale { quick, full };

std::string to_string(VerifyScale s);
/// Accepts "quick" and "full"; throws ParameterError otherwise.
VerifyScale parse_verify_scale(const std::string& text);

struct VerifyCheck {
  std::string name;
  bool pass = false;
  double value = 0.0;      // measured error, statistic or ratio
  double tolerance = 0.0;  // bound that value is compared with
  std::string detail;
};

struct VerifyCriterion {
  unsigned id = 0;
  std::string title;
  std::vector<VerifyCheck> checks;
  double seconds = 0.0;
  /// Wall-clock budget for the criterion; 0 when it has none.
  double budget_seconds = 0.0;
  bool pass() const;
};

struct VerifyOptions {
  VerifyScale scale = VerifyScale::quick;
  unsigned workers = 0;
  std::uint64_t seed = 20240601;
  /// Criterion ids to run; empty runs all.
  std::vector<unsigned> only;
};

struct VerifyReport {
  VerifyOptions options;
  std::vector<VerifyCriterion> criteria;
  double seconds = 0.0;
  bool pass() const;
  std::string to_json(int indent = 2) const;
};

inline constexpr unsigned kCriterionCount = 11;

/// Runs the selected criteria in order; `progress` (if set) is called after
/// each one finishes.
VerifyReport run_verification(const VerifyOptions& opts,
                              const std::function<void(const VerifyCriterion&)>& progress = {});

}  // namespace occtime
