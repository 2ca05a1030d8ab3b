#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "renewal/numerics.hpp"

namespace renewal {
namespace {

// Lanczos approximation, g = 7, n = 9.
constexpr double kLanczosG = 7.0;
constexpr std::array<double, 9> kLanczos = {
    0.99999999999980993,     676.5203681218851,     -1259.1392167224028,
    771.32342877765313,      -176.61502916214059,   12.507343278686905,
    -0.13857109526572012,    9.9843695780195716e-6, 1.5056327351493116e-7};

constexpr int kMaxSeriesTerms = 100000;

// ln P(a, x) by the power series; valid (and fast) for x < a + 1.
double log_gamma_p_series(double a, double x) {
  double term = 1.0 / a;
  double sum = term;
  double ap = a;
  for (int n = 0; n < kMaxSeriesTerms; ++n) {
    ap += 1.0;
    term *= x / ap;
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-17) break;
  }
  return std::log(sum) - x + a * std::log(x) - log_gamma(a);
}

// ln Q(a, x) by the Lentz continued fraction; valid for x >= a + 1.
double log_gamma_q_fraction(double a, double x) {
  constexpr double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < kMaxSeriesTerms; ++i) {
    const double an = -i * (i - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return std::log(h) - x + a * std::log(x) - log_gamma(a);
}

void require_gamma_args(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0) || std::isnan(x))
    throw std::domain_error("incomplete gamma requires a > 0 and x >= 0");
}

}  // namespace

double log_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw std::domain_error("log_gamma requires finite x > 0");
  if (x < 0.5) return log_gamma(x + 1.0) - std::log(x);
  const double z = x - 1.0;
  double series = kLanczos[0];
  for (std::size_t i = 1; i < kLanczos.size(); ++i) series += kLanczos[i] / (z + static_cast<double>(i));
  const double t = z + kLanczosG + 0.5;
  return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t + std::log(series);
}

double digamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) throw std::domain_error("digamma requires finite x > 0");
  double shift = 0.0;
  while (x < 10.0) {
    shift -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  // Asymptotic series in 1/x^2 with Bernoulli-number coefficients.
  const double tail =
      inv2 * (1.0 / 12 -
              inv2 * (1.0 / 120 -
                      inv2 * (1.0 / 252 -
                              inv2 * (1.0 / 240 - inv2 * (1.0 / 132 - inv2 * (691.0 / 32760 - inv2 / 12))))));
  return shift + std::log(x) - 0.5 * inv - tail;
}

double log_erlang_survivor_term(int order, double rate, double x) {
  if (order < 1 || !(rate > 0.0) || !(x >= 0.0))
    throw std::domain_error("erlang survivor term requires order >= 1, rate > 0, x >= 0");
  const double y = rate * x;
  if (y == 0.0) return 0.0;
  if (y < 500.0 && order <= 60) {
    double term = 1.0;
    double sum = 1.0;
    for (int i = 1; i < order; ++i) {
      term *= y / i;
      sum += term;
    }
    return std::log(sum) - y;
  }
  // Large arguments: sum the terms in log space.
  const double log_y = std::log(y);
  double best = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < order; ++i) best = std::max(best, i * log_y - std::lgamma(i + 1.0));
  double sum = 0.0;
  for (int i = 0; i < order; ++i) sum += std::exp(i * log_y - std::lgamma(i + 1.0) - best);
  return best + std::log(sum) - y;
}

double erlang_survivor_term(int order, double rate, double x) {
  return std::exp(log_erlang_survivor_term(order, rate, x));
}

double regularized_gamma_p(double a, double x) {
  require_gamma_args(a, x);
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return std::exp(log_gamma_p_series(a, x));
  return -std::expm1(log_gamma_q_fraction(a, x));
}

double regularized_gamma_q(double a, double x) {
  require_gamma_args(a, x);
  if (x == 0.0) return 1.0;
  if (x < a + 1.0) return -std::expm1(log_gamma_p_series(a, x));
  return std::exp(log_gamma_q_fraction(a, x));
}

double log_regularized_gamma_q(double a, double x) {
  require_gamma_args(a, x);
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return -std::numeric_limits<double>::infinity();
  if (x < a + 1.0) return std::log1p(-std::exp(log_gamma_p_series(a, x)));
  return log_gamma_q_fraction(a, x);
}

double log_sum_exp(std::span<const double> v) {
  if (v.empty()) return -std::numeric_limits<double>::infinity();
  const double best = *std::max_element(v.begin(), v.end());
  if (std::isinf(best)) return best;
  double sum = 0.0;
  for (double x : v) sum += std::exp(x - best);
  return best + std::log(sum);
}

double log_add_exp(double a, double b) {
  if (a < b) std::swap(a, b);
  if (a == -std::numeric_limits<double>::infinity()) return a;
  return a + std::log1p(std::exp(b - a));
}

double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::domain_error("binary_entropy requires p in [0, 1]");
  if (p == 0.0 || p == 1.0) return 0.0;
  return -(p * std::log2(p) + (1.0 - p) * std::log2(1.0 - p));
}

}  // namespace renewal
