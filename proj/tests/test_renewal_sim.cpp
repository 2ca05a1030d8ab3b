#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "renewal/renewal_sim.hpp"
#include "renewal/stats.hpp"

using namespace renewal;

namespace {

IETModel moe_class9() { return IETModel::erlang_mixture({{1, 1.5, 0.5}, {2, 1.7, 0.25}, {4, 3.0, 0.25}}); }

std::vector<double> first_events(const IetSampler& s, std::uint64_t seed, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    RandomStream rng({seed, i});
    out[i] = s.draw(rng);
  }
  return out;
}

}  // namespace

TEST_CASE("trajectory validation and text round trip") {
  Trajectory t{10.0, {0.5, 1.25, 9.999999999999}};
  CHECK_NOTHROW(t.validate());
  const auto line = format_trajectory(t);
  CHECK(parse_trajectory(line) == t);
  CHECK(format_trajectory(Trajectory{2.0, {}}) == "2,0");

  CHECK_THROWS_AS((Trajectory{1.0, {0.5, 0.4}}).validate(), std::invalid_argument);
  CHECK_THROWS_AS((Trajectory{1.0, {1.5}}).validate(), std::invalid_argument);
  CHECK_THROWS_AS((Trajectory{0.0, {}}).validate(), std::invalid_argument);
  CHECK_THROWS_AS(parse_trajectory("10,2,1.0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_trajectory("abc"), std::invalid_argument);

  std::ostringstream out;
  write_trajectory(out, t);
  CHECK(out.str() == line + "\n");
}

TEST_CASE("simulated trajectories are valid and reproducible") {
  for (auto kind : {SimulatorKind::kThinning, SimulatorKind::kInversion}) {
    const auto s = make_sampler(moe_class9(), kind);
    const auto a = s->simulate(200.0, SeedSpec{17, 3});
    const auto b = s->simulate(200.0, SeedSpec{17, 3});
    CHECK(a == b);
    CHECK_NOTHROW(a.validate());
    CHECK(a.events.size() > 50);
    CHECK_FALSE(a == s->simulate(200.0, SeedSpec{17, 4}));
  }
}

TEST_CASE("exponential thinning counts have Poisson mean and variance") {
  const double rate = 1.3, T = 20.0;
  const ThinningSampler s(IETModel::exponential(rate));
  const int n = 4000;
  double sum = 0, sq = 0;
  for (int i = 0; i < n; ++i) {
    const double c = static_cast<double>(s.simulate(T, SeedSpec{5, static_cast<std::uint64_t>(i)}).events.size());
    sum += c;
    sq += c * c;
  }
  const double mean = sum / n, var = sq / n - mean * mean;
  CHECK(std::abs(mean - rate * T) < 5 * std::sqrt(rate * T / n));
  CHECK(var == doctest::Approx(rate * T).epsilon(0.1));
}

TEST_CASE("thinning and inversion agree in distribution") {
  for (const auto& m : {IETModel::gamma(2.5, 1.3), moe_class9(), IETModel::exponential(0.7)}) {
    CAPTURE(m.describe());
    const auto thin = first_events(ThinningSampler(m), 1, 3000);
    const auto inv = first_events(InversionSampler(m), 2, 3000);
    CHECK(ks_two_sample(thin, inv).p_value > 1e-3);
  }
  // Tabulated hazard acceptance follows the same law.
  const auto tab = first_events(ThinningSampler(moe_class9(), HazardEvaluation::kTable), 3, 3000);
  const auto inv = first_events(InversionSampler(moe_class9()), 4, 3000);
  CHECK(ks_two_sample(tab, inv).p_value > 1e-3);
}

TEST_CASE("unbounded hazards are refused by thinning") {
  CHECK_THROWS_AS(ThinningSampler(IETModel::gamma(0.5, 1.0)), SimulationError);
  CHECK_NOTHROW(InversionSampler(IETModel::gamma(0.5, 1.0)).simulate(5.0, SeedSpec{1, 1}));
}

TEST_CASE("void probability matches the survivor and is thread invariant") {
  const auto m = IETModel::gamma(3.0, 2.0);
  const double T = 1.2;
  const double p1 = empirical_void_probability(m, T, 20000, 8, SimulatorKind::kThinning, 1);
  const double p4 = empirical_void_probability(m, T, 20000, 8, SimulatorKind::kThinning, 4);
  CHECK(p1 == p4);
  const double s = m.survivor(T);
  CHECK(std::abs(p1 - s) < 5 * std::sqrt(s * (1 - s) / 20000));
}

TEST_CASE("simulator names") {
  CHECK(simulator_from_string("thinning") == SimulatorKind::kThinning);
  CHECK(to_string(SimulatorKind::kInversion) == "inversion");
  CHECK_THROWS_AS(simulator_from_string("ogata"), std::invalid_argument);
}
