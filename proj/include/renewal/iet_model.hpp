#pragma once

#include <limits>
#include <string>
#include <variant>
#include <vector>

namespace renewal {

struct Exponential {
  double rate;
  bool operator==(const Exponential&) const = default;
};

struct Gamma {
  double shape;
  double rate;
  bool operator==(const Gamma&) const = default;
};

struct ErlangComponent {
  int order;
  double rate;
  double weight;
  bool operator==(const ErlangComponent&) const = default;
};

/// Convex combination of Erlang densities
///   p(x) = sum_l w_l rate_l^order_l / (order_l - 1)! x^(order_l - 1) e^{-rate_l x}.
struct ErlangMixture {
  std::vector<ErlangComponent> components;
  bool operator==(const ErlangMixture&) const = default;
};

enum class Family { kExponential, kGamma, kErlangMixture };

struct MomentSummary {
  double mean;
  double variance;
  /// Supremum of theta with a finite moment generating function.
  double mgf_abscissa;
};

/**
 * Inter-event-time distribution of a renewal process.
 *
 * Immutable after construction. Survivors are evaluated in closed form (the
 * regularized incomplete gamma for Gamma, finite Erlang sums for mixtures) and
 * the hazard is formed as exp(log_pdf - log_survivor), so it stays finite far
 * into the tail where the survivor itself underflows.
 */
class IETModel {
 public:
  using Params = std::variant<Exponential, Gamma, ErlangMixture>;

  /// All factories throw std::invalid_argument on non-positive parameters or
  /// mixture weights that do not sum to 1 within 1e-12.
  static IETModel exponential(double rate);
  static IETModel gamma(double shape, double rate);
  static IETModel erlang_mixture(std::vector<ErlangComponent> components);

  Family family() const noexcept;
  const Params& params() const noexcept { return params_; }

  double pdf(double x) const;
  double log_pdf(double x) const;
  double cdf(double x) const;
  double survivor(double x) const;
  double log_survivor(double x) const;
  double hazard(double x) const;
  double integrated_hazard(double x) const;

  MomentSummary moments() const;
  double mean() const;
  double mgf_abscissa() const;
  /// lim_{x -> inf} hazard(x).
  double hazard_tail_limit() const;

  /// Solves integrated_hazard(x) = level for x; closed form for Exponential.
  double inverse_integrated_hazard(double level) const;

  std::string describe() const;

  friend bool operator==(const IETModel& a, const IETModel& b);

 private:
  explicit IETModel(Params params);

  Params params_;
  // ln of the density normalizer: ln rate (Exponential), shape ln rate -
  // lgamma(shape) (Gamma), one entry per component (ErlangMixture).
  std::vector<double> log_coef_;
};

}  // namespace renewal
