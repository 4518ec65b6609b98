#include "occtime/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace occtime {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::array<std::uint32_t, 4> path_stream_state(std::uint64_t seed, std::uint64_t path) {
  std::uint64_t sm = seed ^ (path * 0xD1B54A32D192ED03ull);
  // Decorrelate consecutive path indices before drawing the state words.
  splitmix64(sm);
  std::array<std::uint32_t, 4> s{};
  do {
    const std::uint64_t a = splitmix64(sm);
    const std::uint64_t b = splitmix64(sm);
    s = {static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32), static_cast<std::uint32_t>(b),
         static_cast<std::uint32_t>(b >> 32)};
  } while ((s[0] | s[1] | s[2] | s[3]) == 0u);
  return s;
}

std::int32_t probability_threshold31(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("probability must lie in [0, 1]");
  // Count of 31-bit values below p 2^31, minus one for the inclusive form.
  const double count = std::floor(p * 2147483648.0);
  return static_cast<std::int32_t>(count - 1.0);
}

}  // namespace occtime
