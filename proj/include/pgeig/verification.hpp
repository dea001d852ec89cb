#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "pgeig/types.hpp"

namespace pgeig {

struct VerificationOptions {
  int trials = 1000;
  Index dim_min = 2;
  Index dim_max = 12;
  std::vector<double> gammas{0.1, 0.5, 0.9};
  std::uint64_t seed = 1;
  int steps_per_trial = 8;
  // Mutation self-test: audit against 0.9 sigma instead of sigma.
  bool inject_bug = false;
};

/// Outcome of one property over all of its checks. A check passes when its
/// margin is non-negative; worst_margin is the smallest margin seen.
struct PropertyResult {
  std::string name;
  long checks = 0;
  long failures = 0;
  double worst_margin = std::numeric_limits<double>::infinity();
  std::vector<std::uint64_t> failing_seeds;

  void record(double margin, std::uint64_t seed);
  bool pass() const { return failures == 0; }
};

struct VerificationSummary {
  std::vector<PropertyResult> properties;

  bool overall_pass() const;
  const PropertyResult* find(const std::string& name) const;
};

/// Per-trial generator seed, independent of evaluation order.
std::uint64_t trial_seed(std::uint64_t base, std::uint64_t suite, std::uint64_t trial);

/// Runs the property suites of the iteration, precond, theory, and flow
/// modules. Deterministic for a given set of options.
VerificationSummary run_verification(const VerificationOptions& options);

}  // namespace pgeig
