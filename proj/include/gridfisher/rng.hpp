#pragma once

#include <array>
#include <cstdint>

namespace gridfisher {

/// Philox4x64 with 10 rounds (Salmon et al. counter-based generator).
/// Output is a pure function of (counter, key), identical on every platform.
struct Philox4x64 {
  using Counter = std::array<std::uint64_t, 4>;
  using Key = std::array<std::uint64_t, 2>;

  static Counter block(Counter counter, Key key) noexcept;
};

/// Sequential draws from one Philox substream keyed by (seed, stream).
class CounterStream {
 public:
  CounterStream(std::uint64_t seed, std::uint64_t stream) noexcept;

  std::uint64_t next_u64() noexcept;
  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Poisson variate: inversion for mean < 10, transformed rejection (PTRS) above.
  std::int64_t poisson(double mean);

 private:
  Philox4x64::Key key_;
  std::uint64_t block_ = 0;
  Philox4x64::Counter buffer_{};
  int used_ = 4;
};

}  // namespace gridfisher
