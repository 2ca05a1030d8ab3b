#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "renewal/bounds.hpp"

using namespace renewal;

namespace {

AffinityMatrix filled(std::size_t m, double v) {
  AffinityMatrix a(m, std::vector<double>(m, v));
  for (std::size_t k = 0; k < m; ++k) a[k][k] = 7.0;  // ignored
  return a;
}

PairConstantsMatrix synthetic(std::size_t m, double gamma, double rho) {
  PairConstantsMatrix out(m);
  for (std::size_t k = 0; k < m; ++k)
    for (std::size_t j = 0; j < m; ++j) {
      if (k == j) continue;
      auto& pc = out.at(k, j);
      pc.gamma = gamma * (1.0 + static_cast<double>(k + j));
      pc.alpha = 0.9;
      pc.rho = rho * (1.0 + static_cast<double>(k + 2 * j));
      pc.c = 1.1;
    }
  return out;
}

}  // namespace

TEST_CASE("entropy bounds from affinities") {
  CHECK(entropy_upper_HR({0.5, 0.5}, filled(2, 1.0)) == doctest::Approx(1.0));
  CHECK(entropy_upper_HR({0.5, 0.5}, filled(2, 0.0)) == 0.0);
  const std::vector<double> third(3, 1.0 / 3);
  CHECK(entropy_upper_HR(third, filled(3, 0.5)) == doctest::Approx(1.0));
  CHECK(entropy_lower_HK(third, filled(3, 0.25)) < entropy_upper_HR(third, filled(3, 0.5)));
  auto bad = filled(2, 0.5);
  bad[0][1] = -0.1;
  CHECK_THROWS_AS(entropy_upper_HR({0.5, 0.5}, bad), std::invalid_argument);
}

TEST_CASE("inverse Fano") {
  CHECK(inverse_fano(1.0, 2) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(inverse_fano(std::log2(10.0), 10) == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(inverse_fano(0.5, 2) == doctest::Approx(0.110028).epsilon(1e-5));
  CHECK(inverse_fano(0.0, 5) == 0.0);
  CHECK_THROWS_AS(inverse_fano(1.01, 2), std::domain_error);
  CHECK_THROWS_AS(inverse_fano(-0.1, 2), std::domain_error);

  std::mt19937_64 gen(1);
  for (int i = 0; i < 200; ++i) {
    const std::size_t M = 2 + gen() % 20;
    const double phi = std::uniform_real_distribution<double>(1e-6, 1.0 - 1.0 / M - 1e-3)(gen);
    CHECK(inverse_fano(fano_entropy(phi, M), M) == doctest::Approx(phi).epsilon(1e-10));
  }
}

TEST_CASE("inverse Fano asymptote") {
  CHECK(inverse_fano_asymptote(std::ldexp(1.0, -10)) == doctest::Approx(9.765625e-5));
  CHECK_THROWS_AS(inverse_fano_asymptote(1.0), std::domain_error);
  for (std::size_t M : {2u, 10u}) {
    CAPTURE(M);
    double previous = 0.0;
    for (double H : {1e-4, 1e-6, 1e-8, 1e-30, 1e-100, 1e-300}) {
      const double ratio = inverse_fano(H, M) / inverse_fano_asymptote(H);
      // H_b(phi) ~ phi (log2(1/phi) + log2 e), so with L = -log2 H the ratio
      // is L / (L + log2 L + log2 e + log2(M-1)) to leading order: it climbs
      // to 1 from below, only logarithmically.
      const double L = -std::log2(H);
      const double leading = L / (L + std::log2(L) + std::numbers::log2e + std::log2(double(M - 1)));
      CHECK(ratio == doctest::Approx(leading).epsilon(0.02));
      CHECK(ratio < 1.0);
      CHECK(ratio > previous);
      previous = ratio;
    }
    CHECK(previous == doctest::Approx(1.0).epsilon(0.02));
  }
}

TEST_CASE("dominant-pair aggregation") {
  const std::vector<double> priors = {0.3, 0.7};
  PairConstantsMatrix two(2);
  two.at(0, 1) = {.gamma = 0.01, .alpha = 0.8, .rho = 0.02, .c = 1.2};
  two.at(1, 0) = {.gamma = 0.01, .alpha = 0.8, .rho = 0.03, .c = 1.5};
  const auto a = aggregate_asymptotics(priors, two);
  CHECK(a.gamma_star == 0.01);
  CHECK(a.alpha_star == doctest::Approx(0.8));
  CHECK(a.bhattacharyya_pairs.size() == 2);
  CHECK(a.rho_star == 0.02);
  CHECK(a.c_star == doctest::Approx(0.7 * 1.2));
  CHECK(a.kl_pairs.size() == 1);
  CHECK(a.folded_alpha() == doctest::Approx(0.8 / (2 * std::numbers::ln2)));
  CHECK(a.lower_amplitude_nats() == doctest::Approx(a.lower_amplitude() / std::numbers::ln2));

  // Perturbing a non-dominant pair changes nothing.
  auto m = synthetic(4, 1e-3, 2e-3);
  const auto base = aggregate_asymptotics(std::vector<double>(4, 0.25), m);
  m.at(3, 2).alpha = 123.0;
  m.at(3, 2).c = 55.0;
  const auto perturbed = aggregate_asymptotics(std::vector<double>(4, 0.25), m);
  CHECK(perturbed.alpha_star == base.alpha_star);
  CHECK(perturbed.c_star == base.c_star);

  CHECK_THROWS_AS(aggregate_asymptotics({}, PairConstantsMatrix()), std::invalid_argument);
}

TEST_CASE("bound curves") {
  const std::vector<double> priors(4, 0.25);
  const auto m = synthetic(4, 1e-3, 2e-3);
  const std::vector<double> grid = {10.0, 500.0, 2000.0, 5000.0};
  const auto curve = asymptotic_bound_curves(priors, m, grid);
  const auto& a = curve.constants;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(curve.upper[i] <= 1.0);
    if (curve.lower_valid[i]) CHECK(curve.lower[i] <= curve.upper[i]);
  }
  CHECK_FALSE(curve.lower_valid[0]);
  CHECK(curve.lower_valid[3]);
  // Log-linear upper curve.
  CHECK(std::log(curve.upper[3]) - std::log(curve.upper[2]) == doctest::Approx(-a.gamma_star * 3000.0));
  CHECK(curve.lower[3] == doctest::Approx(a.lower_amplitude() * std::exp(-a.rho_star * 5000.0) / 5000.0));

  // Far out the pairwise sum is dominated by the argmin pairs.
  const auto far = asymptotic_bound_curves(priors, m, {20000.0});
  CHECK(0.5 * (*far.exact_HR)[0] == doctest::Approx(far.upper[0]).epsilon(2e-3));

  std::ostringstream csv;
  write_bound_curve_csv(csv, curve);
  CHECK(csv.str().rfind("T,upper,lower,ln_upper_over_T,ln_lower_over_T", 0) == 0);
}

TEST_CASE("degenerate ensembles give constant flagged curves") {
  PairConstantsMatrix m(2);
  m.at(0, 1) = {.gamma = 0.0, .alpha = 1.0, .rho = 0.0, .c = 1.0, .degenerate = true};
  m.at(1, 0) = m.at(0, 1);
  const auto curve = asymptotic_bound_curves({0.5, 0.5}, m, {1.0, 100.0});
  CHECK(curve.constants.degenerate());
  CHECK(curve.upper[0] == curve.upper[1]);
  CHECK_FALSE(curve.lower_valid[0]);
  CHECK_FALSE(curve.lower_valid[1]);
}
