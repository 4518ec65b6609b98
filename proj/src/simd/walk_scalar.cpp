#include "occtime/rng.hpp"
#include "occtime/simd.hpp"

namespace occtime {

namespace {
constexpr std::int32_t kHalf31 = 1 << 30;
}

void lattice_walk_scalar(const LatticeWalkParams& p, std::uint64_t seed, std::uint64_t first_path,
                         std::size_t count, LatticeWalkResult* out) {
  for (std::size_t i = 0; i < count; ++i) {
    Xoshiro128ss rng(seed, first_path + i);
    std::int32_t pos = 0;
    std::uint32_t positive = 0, zero = 0;
    for (std::uint32_t s = 0; s < p.slots; ++s) {
      const std::int32_t u = rng.next31();
      if (pos == 0) {
        if (u <= p.hold_at_zero) {
          ++zero;
          continue;
        }
        pos = u <= p.up_at_zero ? 1 : -1;
        if (pos > 0) ++positive;
      } else {
        const std::int32_t next = u < kHalf31 ? pos + 1 : pos - 1;
        if (pos + next > 0) ++positive;
        pos = next;
      }
    }
    out[i] = {positive, zero, pos};
  }
}

void chain_walk_scalar(const ChainWalkParams& p, std::uint64_t seed, std::uint64_t first_path, std::size_t count,
                       ChainWalkResult* out) {
  const std::int32_t m = p.max_site;
  for (std::size_t i = 0; i < count; ++i) {
    Xoshiro128ss rng(seed, first_path + i);
    std::int32_t site = 0;
    double time = 0.0, occ = 0.0;
    std::uint32_t jumps = 0;
    for (;;) {
      const double hold = p.hold[site + m];
      const double frac = p.positive_fraction[site + m];
      const double end = time + hold;
      if (end >= p.horizon) {
        occ = occ + (p.horizon - time) * frac;
        break;
      }
      occ = occ + hold * frac;
      time = end;
      const std::int32_t u = rng.next31();
      site += u <= p.up_threshold[site + m] ? 1 : -1;
      ++jumps;
    }
    out[i] = {occ, site, jumps};
  }
}

}  // namespace occtime
