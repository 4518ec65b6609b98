#pragma once

// Per-path random streams: xoshiro128** seeded from (seed, path index)
// through splitmix64, so a path's draws never depend on how paths are
// distributed over workers or SIMD lanes.

#include <array>
#include <cstdint>

namespace occtime {

std::uint64_t splitmix64(std::uint64_t& state);

/// Initial xoshiro128** state of path `path` under master seed `seed`;
/// never all zero.
std::array<std::uint32_t, 4> path_stream_state(std::uint64_t seed, std::uint64_t path);

class Xoshiro128ss {
public:
  explicit Xoshiro128ss(const std::array<std::uint32_t, 4>& s) : s_(s) {}
  Xoshiro128ss(std::uint64_t seed, std::uint64_t path) : s_(path_stream_state(seed, path)) {}

  std::uint32_t next() {
    const std::uint32_t result = rotl(s_[1] * 5u, 7) * 9u;
    const std::uint32_t t = s_[1] << 9;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 11);
    return result;
  }

  /// Top 31 bits, the form the walk kernels compare against thresholds.
  std::int32_t next31() { return static_cast<std::int32_t>(next() >> 1); }

  /// Uniform on [0, 1) with 32 random bits.
  double uniform() { return next() * 0x1p-32; }

  const std::array<std::uint32_t, 4>& state() const { return s_; }

private:
  static std::uint32_t rotl(std::uint32_t x, int k) { return (x << k) | (x >> (32 - k)); }
  std::array<std::uint32_t, 4> s_;
};

/// Inclusive 31-bit threshold for an event of probability p: the event is
/// next31() <= threshold. p = 0 gives -1 (never), p = 1 gives 2^31 - 1.
std::int32_t probability_threshold31(double p);

}  // namespace occtime
