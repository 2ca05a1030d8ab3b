#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace renewal {

/// Identifies one reproducible random stream: the same pair always yields the
/// same sequence, and distinct stream indices under one master seed give
/// independent streams.
struct SeedSpec {
  std::uint64_t master_seed = 0;
  std::uint64_t stream_index = 0;
};

/// Philox4x32-10 block function (Salmon et al. counter-based generator).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/**
 * Counter-based random stream. The master seed is the Philox key and the
 * stream index occupies the upper half of the counter, so a stream's draws do
 * not depend on which thread produces them or on how many other streams were
 * consumed first.
 *
 * Satisfies std::uniform_random_bit_generator.
 */
class RandomStream {
 public:
  using result_type = std::uint32_t;

  explicit RandomStream(SeedSpec seed);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()();

  std::uint64_t next_u64();
  /// Uniform on the open interval (0, 1).
  double uniform();
  /// Unit-rate exponential variate.
  double exponential();

 private:
  void refill();

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> counter_;
  std::array<std::uint32_t, 4> block_{};
  int next_ = 4;
};

}  // namespace renewal
