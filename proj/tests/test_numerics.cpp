#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "renewal/numerics.hpp"

using namespace renewal;

TEST_CASE("quadrature on finite intervals") {
  const auto r = integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-13));

  // Integrable endpoint singularity.
  const auto s = integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, {1e-10, 1e-12, 4000});
  CHECK(s.value == doctest::Approx(2.0).epsilon(1e-8));

  const auto rev = integrate([](double x) { return x * x; }, 1.0, 0.0);
  CHECK(rev.value == doctest::Approx(-1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("semi-infinite quadrature") {
  const auto e = integrate_semi_infinite([](double x) { return std::exp(-x); });
  CHECK(e.converged);
  CHECK(e.value == doctest::Approx(1.0).epsilon(1e-11));

  // Slow exponential tail, as in tilted Bhattacharyya integrands.
  const double rate = 1e-3;
  const auto slow = integrate_semi_infinite([&](double x) { return rate * std::exp(-rate * x); },
                                            {1e-12, 1e-15, 20000});
  CHECK(slow.converged);
  CHECK(slow.value == doctest::Approx(1.0).epsilon(1e-11));

  const auto gauss = integrate_semi_infinite([](double x) { return std::exp(-x * x); });
  CHECK(gauss.value == doctest::Approx(std::sqrt(std::numbers::pi) / 2).epsilon(1e-11));

  CHECK_THROWS_AS(integrate_semi_infinite([](double) { return std::nan(""); }), NumericError);
  const auto divergent = integrate_semi_infinite([](double x) { return 1.0 / (1.0 + x); });
  CHECK_FALSE(divergent.converged);
}

TEST_CASE("brent root finding") {
  const double r = find_root_bracketed([](double x) { return x * x - 2.0; }, 0.0, 2.0, 1e-15);
  CHECK(r == doctest::Approx(std::numbers::sqrt2).epsilon(1e-15));
  const double c = find_root_bracketed([](double x) { return std::cos(x) - x; }, 0.0, 1.0, 1e-14);
  CHECK(c == doctest::Approx(0.7390851332151607).epsilon(1e-13));
  CHECK(find_root_bracketed([](double x) { return x - 1.0; }, 1.0, 3.0, 1e-12) == 1.0);
  CHECK_THROWS_AS(find_root_bracketed([](double x) { return x * x + 1.0; }, -1.0, 1.0, 1e-12), RootFindingError);
}

TEST_CASE("log gamma") {
  for (double x : {0.1, 0.5, 1.0, 2.0, 3.7, 25.5, 170.2, 1e4})
    CHECK(log_gamma(x) == doctest::Approx(std::lgamma(x)).epsilon(1e-13));
  CHECK(log_gamma(0.5) == doctest::Approx(0.57236494292470009).epsilon(1e-14));
  CHECK(log_gamma(1.0) == doctest::Approx(0.0).scale(1.0).epsilon(1e-15));
  CHECK_THROWS_AS(log_gamma(0.0), std::domain_error);
  CHECK_THROWS_AS(log_gamma(-1.5), std::domain_error);
}

TEST_CASE("digamma") {
  // mpmath reference values.
  CHECK(digamma(1.0) == doctest::Approx(-0.57721566490153286).epsilon(1e-14));
  CHECK(digamma(0.5) == doctest::Approx(-1.9635100260214235).epsilon(1e-14));
  CHECK(digamma(10.3) == doctest::Approx(2.2828154464391227).epsilon(1e-14));
  CHECK(digamma(0.01) == doctest::Approx(-100.56088545786867).epsilon(1e-13));
  CHECK(digamma(3.7) == doctest::Approx(1.1671535393615114).epsilon(1e-14));
  // Recurrence psi(x + 1) = psi(x) + 1/x.
  for (double x : {0.3, 1.7, 8.2, 40.0}) CHECK(digamma(x + 1) == doctest::Approx(digamma(x) + 1 / x).epsilon(1e-13));
}

TEST_CASE("regularized incomplete gamma") {
  struct Ref {
    double a, x, q;
  };
  // mpmath reference values.
  const std::vector<Ref> refs = {{0.5, 2.0, 0.045500263896358414},   {2.5, 1.0, 0.84914503608460964},
                                 {3.0, 10.0, 0.0027693957155115759}, {10.0, 3.0, 0.99889751186988452},
                                 {50.0, 80.0, 0.00013078397659141034}, {1.5, 0.01, 0.9992522446606088}};
  for (const auto& r : refs) {
    CHECK(regularized_gamma_q(r.a, r.x) == doctest::Approx(r.q).epsilon(1e-12));
    CHECK(regularized_gamma_p(r.a, r.x) + regularized_gamma_q(r.a, r.x) == doctest::Approx(1.0).epsilon(1e-14));
  }
  for (double y : {0.01, 0.3, 1.0, 4.0, 20.0})
    CHECK(regularized_gamma_q(0.5, y) == doctest::Approx(std::erfc(std::sqrt(y))).epsilon(1e-12));
  CHECK(log_regularized_gamma_q(5.0, 300.0) == doctest::Approx(-280.34954625468072).epsilon(1e-13));
  CHECK(regularized_gamma_q(2.0, 0.0) == 1.0);
}

TEST_CASE("erlang survivor terms match Q") {
  for (int order : {1, 2, 4, 12})
    for (double x : {0.0, 0.3, 2.0, 15.0}) {
      const double rate = 1.7;
      CHECK(erlang_survivor_term(order, rate, x) ==
            doctest::Approx(regularized_gamma_q(order, rate * x)).epsilon(1e-12));
    }
  // Far tail stays finite in log space.
  CHECK(log_erlang_survivor_term(3, 2.0, 1000.0) ==
        doctest::Approx(-2000.0 + std::log(1.0 + 2000.0 + 2000.0 * 2000.0 / 2.0)).epsilon(1e-13));
}

TEST_CASE("log-sum-exp and binary entropy") {
  const std::vector<double> v = {-1000.0, -1000.0};
  CHECK(log_sum_exp(v) == doctest::Approx(-1000.0 + std::log(2.0)).epsilon(1e-15));
  const double ninf = -std::numeric_limits<double>::infinity();
  CHECK(log_add_exp(ninf, 0.5) == 0.5);
  CHECK(binary_entropy(0.5) == doctest::Approx(1.0));
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(1.0) == 0.0);
  CHECK(binary_entropy(0.110028) == doctest::Approx(0.5).epsilon(1e-5));
}
