#pragma once

#include <functional>
#include <span>
#include <stdexcept>
#include <string>

namespace renewal {

/// Non-finite integrand values, diverging integrals and solver failures.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown by find_root_bracketed; carries the last bracket it held.
class RootFindingError : public NumericError {
 public:
  RootFindingError(const std::string& what, double lo, double hi)
      : NumericError(what), lo_(lo), hi_(hi) {}
  double lo() const noexcept { return lo_; }
  double hi() const noexcept { return hi_; }

 private:
  double lo_;
  double hi_;
};

using RealFunction = std::function<double(double)>;

struct QuadratureOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  int max_panels = 4000;
};

struct QuadratureResult {
  double value = 0.0;
  double abs_error_estimate = 0.0;
  bool converged = false;
};

/// Globally adaptive 21-point Gauss-Kronrod quadrature on [a, b].
QuadratureResult integrate(const RealFunction& f, double a, double b,
                           const QuadratureOptions& opts = {});

/// Integral over (0, inf). The truncation point X is found by doubling until
/// |f(X)| drops below abs_tol * 1e-2 of the largest magnitude seen so far; the
/// slice [X, 2X] is then integrated as a tail check and X keeps doubling while
/// that slice is not negligible.
///
/// Throws NumericError when f returns NaN or inf. Running out of panel budget
/// or truncation range is reported through `converged = false`.
QuadratureResult integrate_semi_infinite(const RealFunction& f,
                                         const QuadratureOptions& opts = {});

/// Brent's method (bisection / secant / inverse quadratic interpolation).
/// Requires g(lo) * g(hi) <= 0; stops once the bracket is narrower than tol.
double find_root_bracketed(const RealFunction& g, double lo, double hi,
                           double tol, int max_iter = 200);

// Special functions. All throw std::domain_error outside their domain.

double log_gamma(double x);
double digamma(double x);

/// e^{-rate x} * sum_{i<order} (rate x)^i / i!
double erlang_survivor_term(int order, double rate, double x);
double log_erlang_survivor_term(int order, double rate, double x);

/// Regularized incomplete gamma functions P(a, x) and Q(a, x) = 1 - P(a, x).
double regularized_gamma_p(double a, double x);
double regularized_gamma_q(double a, double x);
/// ln Q(a, x), finite far beyond where Q itself underflows.
double log_regularized_gamma_q(double a, double x);

double log_sum_exp(std::span<const double> v);
double log_add_exp(double a, double b);

/// Binary entropy in bits; 0 at the endpoints.
double binary_entropy(double p);

}  // namespace renewal
