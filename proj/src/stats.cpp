#include "renewal/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "renewal/numerics.hpp"

namespace renewal {

double kolmogorov_survival(double lambda) {
  if (lambda <= 0.0) return 1.0;
  if (lambda < 1.18) {
    // Small-lambda form converges faster than the alternating series.
    const double y = std::exp(-1.23370055013616983 / (lambda * lambda));  // pi^2 / 8
    const double p = 2.25675833419102515 * std::sqrt(-std::log(y)) *  // sqrt(2 pi)
                     (y + std::pow(y, 9) + std::pow(y, 25) + std::pow(y, 49));
    return 1.0 - p;
  }
  const double x = std::exp(-2.0 * lambda * lambda);
  return 2.0 * (x - std::pow(x, 4) + std::pow(x, 9));
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample requires non-empty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  return {d, kolmogorov_survival((ne + 0.12 + 0.11 / ne) * d)};
}

double chi_square_survival(double statistic, double dof) {
  if (!(dof > 0.0)) throw std::domain_error("chi-square requires dof > 0");
  if (statistic <= 0.0) return 1.0;
  return regularized_gamma_q(0.5 * dof, 0.5 * statistic);
}

WilsonInterval wilson_interval(std::size_t successes, std::size_t trials, double z) {
  if (trials == 0) throw std::invalid_argument("wilson_interval requires trials > 0");
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n)) / denom;
  return {std::max(0.0, std::min(p, center - half)), std::min(1.0, std::max(p, center + half))};
}

MeanEstimate sample_mean(std::span<const double> values) {
  MeanEstimate out;
  out.count = values.size();
  if (values.empty()) return out;
  // Welford keeps the variance stable for large counts.
  double mean = 0.0;
  double m2 = 0.0;
  std::size_t k = 0;
  for (double v : values) {
    ++k;
    const double delta = v - mean;
    mean += delta / static_cast<double>(k);
    m2 += delta * (v - mean);
  }
  out.mean = mean;
  if (k > 1) out.std_error = std::sqrt(m2 / static_cast<double>(k - 1) / static_cast<double>(k));
  return out;
}

}  // namespace renewal
