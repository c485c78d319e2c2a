#include "fdh/schedule.hpp"

#include "fdh/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fdh {

Schedule::Schedule(double constant) : values_{constant} {}

Schedule::Schedule(std::vector<double> breaks, std::vector<double> values)
    : breaks_(std::move(breaks)), values_(std::move(values)) {
  if (values_.size() != breaks_.size() + 1) {
    throw Error(Errc::InvalidArgument, "schedule needs exactly one more value than break points");
  }
  for (std::size_t k = 0; k < breaks_.size(); ++k) {
    if (!(breaks_[k] > 0.0) || (k > 0 && !(breaks_[k] > breaks_[k - 1]))) {
      throw Error(Errc::InvalidArgument, "schedule break points must be positive and strictly increasing");
    }
  }
  for (double v : values_) {
    if (!std::isfinite(v)) throw Error(Errc::InvalidArgument, "schedule values must be finite");
  }
}

double Schedule::at(double t) const {
  const auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
  return values_[static_cast<std::size_t>(it - breaks_.begin())];
}

double Schedule::integral(double a, double b) const {
  if (b < a) return -integral(b, a);
  double acc = 0.0;
  double lo = a;
  auto it = std::upper_bound(breaks_.begin(), breaks_.end(), a);
  while (lo < b) {
    const double hi = (it == breaks_.end()) ? b : std::min(*it, b);
    acc += values_[static_cast<std::size_t>(it - breaks_.begin())] * (hi - lo);
    lo = hi;
    if (it != breaks_.end()) ++it;
  }
  return acc;
}

double Schedule::inf_on(double a, double b) const {
  double best = at(a);
  for (std::size_t k = 0; k < breaks_.size(); ++k) {
    if (breaks_[k] > a && breaks_[k] < b) best = std::min(best, values_[k + 1]);
  }
  return best;
}

double Schedule::sup_on(double a, double b) const {
  double best = at(a);
  for (std::size_t k = 0; k < breaks_.size(); ++k) {
    if (breaks_[k] > a && breaks_[k] < b) best = std::max(best, values_[k + 1]);
  }
  return best;
}

std::vector<double> merged_nodes(const std::vector<const Schedule*>& schedules, double horizon) {
  std::vector<double> nodes{0.0};
  for (const Schedule* s : schedules) {
    for (double b : s->breaks()) {
      if (b > 0.0 && b < horizon) nodes.push_back(b);
    }
  }
  nodes.push_back(horizon);
  std::sort(nodes.begin(), nodes.end());
  nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
  return nodes;
}

double decay_integral(double rate, double h) {
  if (rate == 0.0) return h;
  return -std::expm1(-rate * h) / rate;
}

double integrate_decaying(const std::vector<double>& nodes,
                          const std::function<double(double)>& amplitude,
                          const Schedule& gamma, double kappa) {
  double acc = 0.0;
  double cumulative = 0.0;  // int_0^{a} gamma
  for (std::size_t k = 0; k + 1 < nodes.size(); ++k) {
    const double a = nodes[k];
    const double b = nodes[k + 1];
    const double g = gamma.at(a);
    acc += amplitude(a) * std::exp(-kappa * cumulative) * decay_integral(kappa * g, b - a);
    cumulative += g * (b - a);
  }
  return acc;
}

}  // namespace fdh
