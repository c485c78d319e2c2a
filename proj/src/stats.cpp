#include "fdh/stats.hpp"

#include "fdh/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace fdh {

double pairwise_sum(std::span<const double> values) noexcept {
  constexpr std::size_t kLeaf = 16;
  if (values.size() <= kLeaf) {
    double acc = 0.0;
    for (double v : values) acc += v;
    return acc;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

Estimate Estimate::from_samples(std::span<const double> values) {
  if (values.empty()) throw Error(Errc::EmptySample, "estimate needs at least one sample");
  Estimate e;
  e.n = static_cast<std::int64_t>(values.size());
  const double n = static_cast<double>(values.size());
  e.mean = pairwise_sum(values) / n;
  if (values.size() > 1) {
    std::vector<double> sq(values.size());
    std::transform(values.begin(), values.end(), sq.begin(), [&](double v) { return (v - e.mean) * (v - e.mean); });
    const double var = pairwise_sum(sq) / (n - 1.0);
    e.std_error = std::sqrt(var / n);
  }
  e.ci_lo = e.mean - 1.96 * e.std_error;
  e.ci_hi = e.mean + 1.96 * e.std_error;
  return e;
}

LogMeanEstimate LogMeanEstimate::from_log_samples(std::span<const double> log_values) {
  if (log_values.empty()) throw Error(Errc::EmptySample, "estimate needs at least one sample");
  const double top = *std::max_element(log_values.begin(), log_values.end());
  std::vector<double> w(log_values.size());
  std::transform(log_values.begin(), log_values.end(), w.begin(), [&](double v) { return std::exp(v - top); });
  const Estimate e = Estimate::from_samples(w);
  LogMeanEstimate out;
  out.n = e.n;
  out.log_mean = top + std::log(e.mean);
  const double lo = e.mean - 3.0 * e.std_error;
  out.log_lo = lo > 0.0 ? top + std::log(lo) : -std::numeric_limits<double>::infinity();
  out.log_hi = top + std::log(e.mean + 3.0 * e.std_error);
  return out;
}

double joint_stderr(const Estimate& a, const Estimate& b) noexcept { return std::hypot(a.std_error, b.std_error); }

}  // namespace fdh
