#include "renewal/hazard_table.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace renewal {

HazardTable::HazardTable(const IETModel& model)
    : HazardTable(model, kDefaultSpanInMeans * model.mean(), kDefaultStep) {}

HazardTable::HazardTable(const IETModel& model, double x_max, double step)
    : step_(step), x_max_(x_max), tail_(model.hazard_tail_limit()) {
  if (!(x_max > 0.0) || !(step > 0.0)) throw std::invalid_argument("hazard table needs x_max > 0 and step > 0");
  const auto n = static_cast<std::size_t>(std::floor(x_max / step)) + 1;
  values_.resize(n);
  for (std::size_t i = 0; i < n; ++i) values_[i] = model.hazard(static_cast<double>(i) * step);

  double grid_max = 0.0;
  for (double v : values_) grid_max = std::max(grid_max, v);
  global_bound_ = std::max(grid_max, tail_) * (1.0 + kBoundSlack);

  const auto windows = static_cast<std::size_t>(std::ceil(x_max));
  window_bounds_.resize(windows);
  for (std::size_t w = 0; w < windows; ++w) {
    // Include one grid point either side so the window edges are covered.
    const auto lo = static_cast<std::size_t>(std::max(0.0, std::floor(static_cast<double>(w) / step) - 1.0));
    const auto hi = std::min(n - 1, static_cast<std::size_t>(std::ceil((w + 1.0) / step)) + 1);
    double m = 0.0;
    for (std::size_t i = lo; i <= hi; ++i) m = std::max(m, values_[i]);
    // The last (partial) window also has to cover everything beyond x_max.
    if (static_cast<double>(w + 1) > x_max) m = std::max(m, global_bound_);
    window_bounds_[w] = m * (1.0 + kBoundSlack);
  }
}

double HazardTable::lookup(double x) const {
  if (!(x >= 0.0)) throw std::domain_error("hazard lookup requires x >= 0");
  if (x > x_max_) return tail_;
  const auto i = static_cast<std::size_t>(std::llround(x / step_));
  return values_[std::min(i, values_.size() - 1)];
}

double HazardTable::window_bound(double elapsed) const {
  if (!(elapsed >= 0.0)) throw std::domain_error("window bound requires elapsed >= 0");
  const double w = std::floor(elapsed);
  if (w >= static_cast<double>(window_bounds_.size())) return global_bound_;
  return window_bounds_[static_cast<std::size_t>(w)];
}

bool HazardTable::bounded() const noexcept {
  return std::isfinite(global_bound_) &&
         std::all_of(window_bounds_.begin(), window_bounds_.end(), [](double b) { return std::isfinite(b); });
}

}  // namespace renewal
