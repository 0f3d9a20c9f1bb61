#pragma once

#include <cstdint>
#include <random>

namespace tanav {

/// Stream identifiers for keyed random draws. Every stochastic quantity in a
/// run is drawn from a generator keyed by (seed, stream, step), so results do
/// not depend on evaluation order.
enum class Stream : std::uint64_t {
  terrain = 1,
  imu = 2,
  range = 3,
  altimeter = 4,
  baro = 5,
  initial_error = 6,
  mpf_init = 7,
  mpf_process = 8,
  mpf_resample = 9,
  bench = 10,
};

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t stream_key(std::uint64_t seed, Stream stream, std::uint64_t step) noexcept {
  return splitmix64(splitmix64(splitmix64(seed) ^ static_cast<std::uint64_t>(stream)) ^ step);
}

using Engine = std::mt19937_64;

inline Engine make_engine(std::uint64_t seed, Stream stream, std::uint64_t step = 0) {
  return Engine(stream_key(seed, stream, step));
}

/// Standard normal draw.
inline double gauss(Engine& eng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return n(eng);
}

/// Uniform draw in [0, 1).
inline double uniform01(Engine& eng) {
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

}  // namespace tanav
