#pragma once

#include <cmath>
#include <cstdint>

namespace nomafair {

namespace detail {
// SplitMix64 finalizer (Steele, Lea, Flood).
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
}  // namespace detail

/// Counter-based uniform generator: output j is a pure function of
/// (seed, stream, j), so any (seed, stream) pair can be replayed or handed to
/// a different thread without shared state.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream) noexcept {
    const std::uint64_t a = detail::mix64(seed + detail::kGolden);
    state_ = detail::mix64(a ^ detail::mix64(stream + 0xBF58476D1CE4E5B9ull));
  }

  std::uint64_t next_u64() noexcept {
    state_ += detail::kGolden;
    return detail::mix64(state_);
  }

  /// Uniform double in (0, 1].
  double next_unit() noexcept {
    return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;
  }

  /// Inverse-CDF exponential draw with the given mean.
  double next_exponential(double mean) noexcept { return -mean * std::log(next_unit()); }

 private:
  std::uint64_t state_;
};

}  // namespace nomafair
