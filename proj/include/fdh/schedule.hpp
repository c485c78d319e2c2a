#pragma once

#include <functional>
#include <vector>

namespace fdh {

/// Right-continuous piecewise-constant function of time on [0, inf):
/// values[0] on [0, breaks[0]), values[k] on [breaks[k-1], breaks[k]), ...
class Schedule {
 public:
  Schedule(double constant = 0.0);  // NOLINT(google-explicit-constructor)
  Schedule(std::vector<double> breaks, std::vector<double> values);

  double at(double t) const;
  double integral(double a, double b) const;
  double inf_on(double a, double b) const;
  double sup_on(double a, double b) const;
  bool is_constant() const noexcept { return breaks_.empty(); }

  const std::vector<double>& breaks() const noexcept { return breaks_; }
  const std::vector<double>& values() const noexcept { return values_; }

  bool operator==(const Schedule&) const = default;

 private:
  std::vector<double> breaks_;
  std::vector<double> values_;
};

/// Sorted union of the break points of `schedules` inside (0, horizon),
/// bracketed by 0 and horizon.
std::vector<double> merged_nodes(const std::vector<const Schedule*>& schedules, double horizon);

/// int_0^h exp(-rate s) ds, with the exact limit h at rate == 0.
double decay_integral(double rate, double h);

/// Exact int_0^T A(t) exp(-kappa * int_0^t gamma) dt for A piecewise constant
/// on `nodes`; `amplitude` is evaluated once per piece at its left end.
double integrate_decaying(const std::vector<double>& nodes,
                          const std::function<double(double)>& amplitude,
                          const Schedule& gamma, double kappa);

}  // namespace fdh
