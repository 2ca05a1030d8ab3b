#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "renewal/stats.hpp"

using namespace renewal;

TEST_CASE("chi-square survival against scipy") {
  CHECK(chi_square_survival(3.84, 1) == doctest::Approx(0.05004352124870519).epsilon(1e-10));
  CHECK(chi_square_survival(10.0, 5) == doctest::Approx(0.07523524614651217).epsilon(1e-10));
  CHECK(chi_square_survival(120.0, 100) == doctest::Approx(0.08440668109369177).epsilon(1e-9));
  CHECK(chi_square_survival(0.0, 3) == 1.0);
}

TEST_CASE("kolmogorov distribution") {
  CHECK(kolmogorov_survival(1.0) == doctest::Approx(0.26999967167735456).epsilon(1e-9));
  CHECK(kolmogorov_survival(0.5) == doctest::Approx(0.9639452436648751).epsilon(1e-9));
  CHECK(kolmogorov_survival(2.0) == doctest::Approx(0.0006709252557796953).epsilon(1e-8));
}

TEST_CASE("two-sample KS") {
  std::vector<double> a, b;
  for (int i = 0; i < 200; ++i) {
    a.push_back(i + 0.25);
    b.push_back(i + 0.75);
  }
  const auto same = ks_two_sample(a, b);
  CHECK(same.statistic == doctest::Approx(1.0 / 200));
  CHECK(same.p_value > 0.99);

  std::vector<double> shifted;
  for (double x : a) shifted.push_back(x + 100.0);
  const auto diff = ks_two_sample(a, shifted);
  CHECK(diff.statistic == doctest::Approx(0.5));
  CHECK(diff.p_value < 1e-10);
}

TEST_CASE("wilson interval") {
  const auto w = wilson_interval(50, 100);
  CHECK(w.low == doctest::Approx(0.40383153).epsilon(1e-6));
  CHECK(w.high == doctest::Approx(0.59616847).epsilon(1e-6));
  const auto zero = wilson_interval(0, 1000);
  CHECK(zero.low == 0.0);
  CHECK(zero.high > 0.0);
  CHECK(zero.high < 0.005);
}

TEST_CASE("sample mean and standard error") {
  const std::vector<double> v = {1, 2, 3, 4, 5};
  const auto m = sample_mean(v);
  CHECK(m.mean == doctest::Approx(3.0));
  CHECK(m.std_error == doctest::Approx(std::sqrt(2.5 / 5)));
  CHECK(m.count == 5);
}
