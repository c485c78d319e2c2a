#pragma once

// Deterministic reductions for ensemble output. Sums run pairwise in index
// order so results do not depend on how the samples were produced.

#include <cstdint>
#include <span>

namespace fdh {

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::int64_t n = 0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  /// Paths dropped because the state stopped being finite.
  std::int64_t blowups = 0;

  /// Sample mean, standard error sqrt(var/n), and ci = mean +- 1.96 std_error.
  static Estimate from_samples(std::span<const double> values);

  bool operator==(const Estimate&) const = default;
};

/// Estimate of log E exp(V) from samples of V, computed by log-sum-exp.
struct LogMeanEstimate {
  double log_mean = 0.0;
  /// log(mean -+ 3 std_error) of the rescaled exponentials; lo is -inf when mean - 3 se <= 0.
  double log_lo = 0.0;
  double log_hi = 0.0;
  std::int64_t n = 0;

  static LogMeanEstimate from_log_samples(std::span<const double> log_values);
};

double pairwise_sum(std::span<const double> values) noexcept;

/// Combined standard error sqrt(a^2 + b^2).
double joint_stderr(const Estimate& a, const Estimate& b) noexcept;

}  // namespace fdh
