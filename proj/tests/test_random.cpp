#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <set>

#include "renewal/random.hpp"
#include "renewal/stats.hpp"

using namespace renewal;

static_assert(std::uniform_random_bit_generator<RandomStream>);

TEST_CASE("philox4x32-10 known answers") {
  const auto zero = philox4x32({0, 0, 0, 0}, {0, 0});
  CHECK(zero[0] == 0x6627e8d5u);
  CHECK(zero[1] == 0xe169c58du);
  CHECK(zero[2] == 0xbc57ac4cu);
  CHECK(zero[3] == 0x9b00dbd8u);

  const auto pi = philox4x32({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0});
  CHECK(pi[0] == 0xd16cfe09u);
  CHECK(pi[1] == 0x94fdccebu);
  CHECK(pi[2] == 0x5001e420u);
  CHECK(pi[3] == 0x24126ea1u);
}

TEST_CASE("streams are reproducible and distinct") {
  RandomStream a({42, 7}), b({42, 7}), c({42, 8}), d({43, 7});
  std::set<std::uint64_t> seen;
  for (int i = 0; i < 1000; ++i) {
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    seen.insert(x);
    seen.insert(c.next_u64());
    seen.insert(d.next_u64());
  }
  CHECK(seen.size() == 3000);
}

TEST_CASE("uniform and exponential moments") {
  RandomStream rng({1, 0});
  const int n = 200000;
  double sum = 0, sum_e = 0, min_u = 1, max_u = 0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    min_u = std::min(min_u, u);
    max_u = std::max(max_u, u);
    sum += u;
    sum_e += rng.exponential();
  }
  CHECK(min_u > 0.0);
  CHECK(max_u < 1.0);
  // 5 standard errors.
  CHECK(std::abs(sum / n - 0.5) < 5 * std::sqrt(1.0 / 12 / n));
  CHECK(std::abs(sum_e / n - 1.0) < 5 * std::sqrt(1.0 / n));
}

TEST_CASE("uniforms pass a KS test against a shuffled reference") {
  RandomStream rng({99, 3});
  std::vector<double> u(5000), grid(5000);
  for (std::size_t i = 0; i < u.size(); ++i) {
    u[i] = rng.uniform();
    grid[i] = (i + 0.5) / grid.size();
  }
  CHECK(ks_two_sample(u, grid).p_value > 1e-3);
}

TEST_CASE("works with standard distributions") {
  RandomStream rng({5, 5});
  std::normal_distribution<double> normal;
  double s = 0;
  for (int i = 0; i < 10000; ++i) s += normal(rng);
  CHECK(std::abs(s / 10000) < 0.05);
}
