#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "renewal/affinities.hpp"

using namespace renewal;

namespace {

IETModel moe8() { return IETModel::erlang_mixture({{1, 1.5, 0.5}, {2, 1.7, 0.25}, {3, 2.5, 0.25}}); }
IETModel moe9() { return IETModel::erlang_mixture({{1, 1.5, 0.5}, {2, 1.7, 0.25}, {4, 3.0, 0.25}}); }

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("exponential pairs have closed-form constants") {
  const double lk = 1.2, lj = 1.5;
  const auto k = IETModel::exponential(lk), j = IETModel::exponential(lj);
  const auto pc = pair_constants(k, j);
  const double gamma = 0.5 * std::pow(std::sqrt(lk) - std::sqrt(lj), 2);
  CHECK(rel(pc.gamma, gamma) < 1e-9);
  CHECK(gamma == doctest::Approx(0.0083592).epsilon(1e-5));
  CHECK(pc.alpha == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(rel(pc.rho, lk * std::log(lk / lj) + lj - lk) < 1e-9);
  CHECK(pc.c == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(pc.diagnostics.all_passed());
}

TEST_CASE("gamma pair against mpmath") {
  // Gamma(2, 1.2) vs Gamma(3, 1.5); reference from 30-digit mpmath quadrature.
  const auto k = IETModel::gamma(2.0, 1.2), j = IETModel::gamma(3.0, 1.5);
  for (const auto& pc : {pair_constants(k, j), gamma_closed_form_constants(k, j)}) {
    CHECK(rel(pc.gamma, 0.0116314132589947) < 1e-10);
    CHECK(rel(pc.alpha, 0.990701617234908) < 1e-9);
    CHECK(rel(pc.rho, 0.0605593149113093) < 1e-10);
    CHECK(rel(pc.c, 1.05006549572293) < 1e-9);
    CHECK(rel(pc.kl_integral, 0.100932191518849) < 1e-10);
    CHECK(rel(pc.kl_first_moment, -0.248446347468585) < 1e-9);
    CHECK(rel(pc.survivor_kl, -0.293190688362053) < 1e-9);
  }
  const auto back = pair_constants(j, k);
  CHECK(rel(back.rho, 0.0379621285834707) < 1e-10);
  CHECK(rel(back.c, 1.03046916037752) < 1e-9);
  CHECK(back.gamma == pair_constants(k, j).gamma);

  // Shape below 1 (unbounded density at 0).
  const auto s = pair_constants(IETModel::gamma(0.7, 1.0), IETModel::gamma(1.3, 2.0));
  CHECK(rel(s.gamma, 0.0461729143143971) < 1e-9);
  CHECK(rel(s.alpha, 0.991716528656846) < 1e-8);
  CHECK(rel(s.rho, 0.231258202073293) < 1e-9);
  CHECK(rel(s.c, 1.07440610754482) < 1e-8);
}

TEST_CASE("closed-form flags and family restriction") {
  const auto pc = gamma_closed_form_constants(IETModel::gamma(2.0, 1.0), IETModel::exponential(2.0));
  CHECK(pc.gamma_closed_form);
  CHECK(pc.tilted_mean_closed_form);
  CHECK(pc.kl_closed_form);
  CHECK_FALSE(pair_constants(IETModel::gamma(2.0, 1.0), IETModel::exponential(2.0)).gamma_closed_form);
  CHECK_THROWS_AS(gamma_closed_form_constants(moe8(), moe9()), std::invalid_argument);
}

TEST_CASE("mixture-of-Erlang dominant pair against mpmath") {
  const auto r = pair_constants(moe8(), moe9());
  CHECK(rel(r.gamma, 0.000478442218993517) < 1e-8);
  CHECK(rel(r.alpha, 0.999931246866226) < 1e-8);
  const auto k = pair_constants(moe9(), moe8());
  CHECK(rel(k.rho, 0.00188639350104426) < 1e-8);
  CHECK(rel(k.c, 1.00027502115169) < 1e-8);
  CHECK(k.diagnostics.all_passed());
}

TEST_CASE("identical models are degenerate") {
  const auto pc = pair_constants(moe8(), moe8());
  CHECK(pc.degenerate);
  CHECK(pc.gamma == 0.0);
  CHECK(pc.rho == 0.0);
  CHECK(pc.alpha == 1.0);
  CHECK(pc.c == 1.0);
  CHECK(solve_bhattacharyya_gamma(moe8(), moe8()) == 0.0);
}

TEST_CASE("tilted density is normalized at the root and the log-integral inequality holds") {
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> shape(0.6, 5.0), rate(0.5, 3.0);
  for (int i = 0; i < 6; ++i) {
    const auto k = IETModel::gamma(shape(gen), rate(gen));
    const auto j = IETModel::erlang_mixture({{1, rate(gen), 0.4}, {3, rate(gen), 0.6}});
    CAPTURE(k.describe());
    CAPTURE(j.describe());
    const auto report = check_assumptions(k, j);
    CHECK(report.all_passed());
    const double gamma = solve_bhattacharyya_gamma(k, j);
    CHECK(tilted_bhattacharyya_mass(k, j, gamma).value == doctest::Approx(1.0).epsilon(1e-10));
    const auto* tail = report.find("log_integral_tail");
    REQUIRE(tail != nullptr);
    CHECK(tail->value >= 0.0);
    CHECK(report.find("no_such_check") == nullptr);
    CHECK(kl_rho(k, j) > 0.0);
  }
}

TEST_CASE("monte carlo KL divergence of Poisson processes") {
  const double lk = 1.0, lj = 1.6, T = 15.0;
  const auto est = mc_kl_divergence(IETModel::exponential(lk), IETModel::exponential(lj), T, 20000, 4);
  const double exact = T * (lk * std::log(lk / lj) + lj - lk);
  CHECK(std::abs(est.mean - exact) < 5 * est.std_error);
}

TEST_CASE("monte carlo Bhattacharyya affinity: both estimators are unbiased") {
  const double lk = 1.2, lj = 1.5, T = 40.0;
  const auto k = IETModel::exponential(lk), j = IETModel::exponential(lj);
  const double exact = std::exp(-0.5 * std::pow(std::sqrt(lk) - std::sqrt(lj), 2) * T);
  for (auto est : {BhattacharyyaEstimator::kClassSampling, BhattacharyyaEstimator::kGeometricProposal}) {
    const auto r = mc_bhattacharyya(k, j, T, 20000, 9, est, 2);
    CHECK(std::abs(r.mean - exact) < 5 * r.std_error + 1e-12);
  }
  // Non-Poisson pair: the estimators must agree with each other.
  const auto a = mc_bhattacharyya(moe8(), IETModel::gamma(2.0, 1.5), 10.0, 20000, 1,
                                  BhattacharyyaEstimator::kClassSampling);
  const auto b = mc_bhattacharyya(moe8(), IETModel::gamma(2.0, 1.5), 10.0, 20000, 2,
                                  BhattacharyyaEstimator::kGeometricProposal);
  CHECK(std::abs(a.mean - b.mean) < 5 * std::hypot(a.std_error, b.std_error));
  CHECK(mc_bhattacharyya(k, k, T, 10, 1).mean == 1.0);
}

TEST_CASE("constants matrix is symmetric in gamma and exports CSV") {
  const ClassEnsemble e({IETModel::exponential(0.8), IETModel::gamma(2.0, 2.0), moe9()});
  const auto m1 = compute_constants_matrix(e, 1);
  const auto m3 = compute_constants_matrix(e, 3);
  for (std::size_t k = 0; k < 3; ++k)
    for (std::size_t j = 0; j < 3; ++j) {
      if (k == j) continue;
      CHECK(m1.at(k, j).gamma == m1.at(j, k).gamma);
      CHECK(m1.at(k, j).alpha == m1.at(j, k).alpha);
      CHECK(m1.at(k, j).rho == m3.at(k, j).rho);
      CHECK(m1.at(k, j).diagnostics.all_passed());
    }
  std::ostringstream csv;
  write_constants_csv(csv, m1);
  const auto text = csv.str();
  CHECK(text.rfind("k,j,gamma,alpha,rho,c,checks_passed\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 7);
  CHECK(text.find("\n3,2,") != std::string::npos);
}
