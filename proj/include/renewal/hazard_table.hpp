#pragma once

#include <cstddef>
#include <vector>

#include "renewal/iet_model.hpp"

namespace renewal {

/// Hazard values precomputed on {0, step, ..., x_max} with nearest-point
/// lookup, plus per-unit-window upper bounds for thinning.
class HazardTable {
 public:
  static constexpr double kDefaultStep = 1e-3;
  static constexpr double kDefaultSpanInMeans = 50.0;
  /// Relative slack added on top of grid maxima when forming window bounds.
  static constexpr double kBoundSlack = 1e-6;

  HazardTable(const IETModel& model, double x_max, double step);
  /// step 1e-3 over [0, 50 * mean].
  explicit HazardTable(const IETModel& model);

  double lookup(double x) const;
  /// Upper bound on the hazard over the unit window containing `elapsed`.
  double window_bound(double elapsed) const;
  double global_bound() const noexcept { return global_bound_; }
  bool bounded() const noexcept;

  double step() const noexcept { return step_; }
  double x_max() const noexcept { return x_max_; }
  double tail_value() const noexcept { return tail_; }
  std::size_t size() const noexcept { return values_.size(); }
  double at(std::size_t i) const { return values_.at(i); }

 private:
  double step_;
  double x_max_;
  double tail_;
  std::vector<double> values_;
  std::vector<double> window_bounds_;
  double global_bound_;
};

}  // namespace renewal
