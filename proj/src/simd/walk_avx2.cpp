#include <immintrin.h>

#include "occtime/rng.hpp"
#include "occtime/simd.hpp"

namespace occtime {

namespace {

struct Lanes {
  __m256i s0, s1, s2, s3;
};

Lanes seed_lanes(std::uint64_t seed, std::uint64_t first_path) {
  alignas(32) std::uint32_t w[4][8];
  for (int l = 0; l < 8; ++l) {
    const auto s = path_stream_state(seed, first_path + static_cast<std::uint64_t>(l));
    for (int k = 0; k < 4; ++k) w[k][l] = s[static_cast<std::size_t>(k)];
  }
  return {_mm256_load_si256(reinterpret_cast<const __m256i*>(w[0])),
          _mm256_load_si256(reinterpret_cast<const __m256i*>(w[1])),
          _mm256_load_si256(reinterpret_cast<const __m256i*>(w[2])),
          _mm256_load_si256(reinterpret_cast<const __m256i*>(w[3]))};
}

inline __m256i rotl(__m256i x, int k) {
  return _mm256_or_si256(_mm256_slli_epi32(x, k), _mm256_srli_epi32(x, 32 - k));
}

// Returns next31() of every lane and the advanced state.
inline __m256i next31(Lanes& s, Lanes& out) {
  const __m256i r = _mm256_mullo_epi32(rotl(_mm256_mullo_epi32(s.s1, _mm256_set1_epi32(5)), 7), _mm256_set1_epi32(9));
  const __m256i t = _mm256_slli_epi32(s.s1, 9);
  __m256i s2 = _mm256_xor_si256(s.s2, s.s0);
  __m256i s3 = _mm256_xor_si256(s.s3, s.s1);
  const __m256i s1 = _mm256_xor_si256(s.s1, s2);
  const __m256i s0 = _mm256_xor_si256(s.s0, s3);
  s2 = _mm256_xor_si256(s2, t);
  s3 = rotl(s3, 11);
  out = {s0, s1, s2, s3};
  return _mm256_srli_epi32(r, 1);
}

inline __m256i select(__m256i mask, __m256i a, __m256i b) { return _mm256_blendv_epi8(b, a, mask); }

}  // namespace

void lattice_walk_avx2(const LatticeWalkParams& p, std::uint64_t seed, std::uint64_t first_path, std::size_t count,
                       LatticeWalkResult* out) {
  const __m256i zero = _mm256_setzero_si256();
  const __m256i one = _mm256_set1_epi32(1);
  const __m256i two = _mm256_set1_epi32(2);
  const __m256i half = _mm256_set1_epi32(1 << 30);
  const __m256i hold_thr = _mm256_set1_epi32(p.hold_at_zero);
  const __m256i up_thr = _mm256_set1_epi32(p.up_at_zero);
  std::size_t i = 0;
  for (; i + 8 <= count; i += 8) {
    Lanes st = seed_lanes(seed, first_path + i);
    __m256i pos = zero, positive = zero, zeros = zero;
    for (std::uint32_t s = 0; s < p.slots; ++s) {
      const __m256i u = next31(st, st);
      const __m256i at0 = _mm256_cmpeq_epi32(pos, zero);
      const __m256i hold = _mm256_andnot_si256(_mm256_cmpgt_epi32(u, hold_thr), at0);
      const __m256i up0 = _mm256_andnot_si256(_mm256_cmpgt_epi32(u, up_thr), _mm256_set1_epi32(-1));
      const __m256i up_away = _mm256_cmpgt_epi32(half, u);
      const __m256i up = select(at0, up0, up_away);
      const __m256i delta = _mm256_sub_epi32(_mm256_and_si256(up, two), one);
      const __m256i next = select(hold, pos, _mm256_add_epi32(pos, delta));
      positive = _mm256_sub_epi32(positive, _mm256_cmpgt_epi32(_mm256_add_epi32(pos, next), zero));
      zeros = _mm256_sub_epi32(zeros, hold);
      pos = next;
    }
    alignas(32) std::int32_t a[8], b[8], c[8];
    _mm256_store_si256(reinterpret_cast<__m256i*>(a), positive);
    _mm256_store_si256(reinterpret_cast<__m256i*>(b), zeros);
    _mm256_store_si256(reinterpret_cast<__m256i*>(c), pos);
    for (int l = 0; l < 8; ++l)
      out[i + l] = {static_cast<std::uint32_t>(a[l]), static_cast<std::uint32_t>(b[l]), c[l]};
  }
  if (i < count) lattice_walk_scalar(p, seed, first_path + i, count - i, out + i);
}

void chain_walk_avx2(const ChainWalkParams& p, std::uint64_t seed, std::uint64_t first_path, std::size_t count,
                     ChainWalkResult* out) {
  if (count < 8) {
    chain_walk_scalar(p, seed, first_path, count, out);
    return;
  }
  const __m256i one = _mm256_set1_epi32(1);
  const __m256i two = _mm256_set1_epi32(2);
  const __m256i mvec = _mm256_set1_epi32(p.max_site);
  const __m256i lane_bits = _mm256_setr_epi32(1, 2, 4, 8, 16, 32, 64, 128);
  const __m256i lane_bits_lo = _mm256_setr_epi64x(1, 2, 4, 8);
  const __m256i lane_bits_hi = _mm256_setr_epi64x(16, 32, 64, 128);
  const __m256d horizon = _mm256_set1_pd(p.horizon);

  auto mask32 = [&](int bits) {
    const __m256i b = _mm256_set1_epi32(bits);
    return _mm256_cmpeq_epi32(_mm256_and_si256(b, lane_bits), lane_bits);
  };
  auto mask64 = [](int bits, __m256i lb) {
    const __m256i b = _mm256_set1_epi64x(bits);
    return _mm256_castsi256_pd(_mm256_cmpeq_epi64(_mm256_and_si256(b, lb), lb));
  };

  // Path lengths vary a lot, so a lane that finishes takes the next pending
  // path instead of idling until its group is done.
  std::size_t lane_path[8];
  for (int l = 0; l < 8; ++l) lane_path[l] = static_cast<std::size_t>(l);
  std::size_t next_path = 8;
  Lanes st = seed_lanes(seed, first_path);
  __m256i site = _mm256_setzero_si256(), jumps = _mm256_setzero_si256();
  __m256d time[2] = {_mm256_setzero_pd(), _mm256_setzero_pd()};
  __m256d occ[2] = {_mm256_setzero_pd(), _mm256_setzero_pd()};
  int active = 0xFF;
  while (active) {
    const __m256i idx = _mm256_add_epi32(site, mvec);
    const __m128i idx_half[2] = {_mm256_castsi256_si128(idx), _mm256_extracti128_si256(idx, 1)};
    int finishing = 0;
    for (int h = 0; h < 2; ++h) {
      const __m256d hold = _mm256_i32gather_pd(p.hold, idx_half[h], 8);
      const __m256d frac = _mm256_i32gather_pd(p.positive_fraction, idx_half[h], 8);
      const __m256d end = _mm256_add_pd(time[h], hold);
      const __m256d act = mask64(active, h == 0 ? lane_bits_lo : lane_bits_hi);
      const __m256d fin = _mm256_and_pd(_mm256_cmp_pd(end, horizon, _CMP_GE_OQ), act);
      const __m256d cont = _mm256_andnot_pd(fin, act);
      const __m256d occ_fin = _mm256_add_pd(occ[h], _mm256_mul_pd(_mm256_sub_pd(horizon, time[h]), frac));
      const __m256d occ_cont = _mm256_add_pd(occ[h], _mm256_mul_pd(hold, frac));
      occ[h] = _mm256_blendv_pd(occ[h], occ_fin, fin);
      occ[h] = _mm256_blendv_pd(occ[h], occ_cont, cont);
      time[h] = _mm256_blendv_pd(time[h], end, cont);
      finishing |= _mm256_movemask_pd(fin) << (4 * h);
    }
    const int moving = active & ~finishing;
    if (finishing) {
      alignas(32) double o[8], tm[8];
      alignas(32) std::int32_t sv[8], jv[8];
      alignas(32) std::uint32_t w[4][8];
      _mm256_store_pd(o, occ[0]);
      _mm256_store_pd(o + 4, occ[1]);
      _mm256_store_pd(tm, time[0]);
      _mm256_store_pd(tm + 4, time[1]);
      _mm256_store_si256(reinterpret_cast<__m256i*>(sv), site);
      _mm256_store_si256(reinterpret_cast<__m256i*>(jv), jumps);
      _mm256_store_si256(reinterpret_cast<__m256i*>(w[0]), st.s0);
      _mm256_store_si256(reinterpret_cast<__m256i*>(w[1]), st.s1);
      _mm256_store_si256(reinterpret_cast<__m256i*>(w[2]), st.s2);
      _mm256_store_si256(reinterpret_cast<__m256i*>(w[3]), st.s3);
      for (int l = 0; l < 8; ++l) {
        if (!(finishing >> l & 1)) continue;
        out[lane_path[l]] = {o[l], sv[l], static_cast<std::uint32_t>(jv[l])};
        if (next_path == count) {
          active &= ~(1 << l);
          continue;
        }
        lane_path[l] = next_path;
        const auto s0 = path_stream_state(seed, first_path + next_path);
        ++next_path;
        for (int k = 0; k < 4; ++k) w[k][l] = s0[static_cast<std::size_t>(k)];
        o[l] = 0.0;
        tm[l] = 0.0;
        sv[l] = 0;
        jv[l] = 0;
      }
      occ[0] = _mm256_load_pd(o);
      occ[1] = _mm256_load_pd(o + 4);
      time[0] = _mm256_load_pd(tm);
      time[1] = _mm256_load_pd(tm + 4);
      site = _mm256_load_si256(reinterpret_cast<const __m256i*>(sv));
      jumps = _mm256_load_si256(reinterpret_cast<const __m256i*>(jv));
      st = {_mm256_load_si256(reinterpret_cast<const __m256i*>(w[0])),
            _mm256_load_si256(reinterpret_cast<const __m256i*>(w[1])),
            _mm256_load_si256(reinterpret_cast<const __m256i*>(w[2])),
            _mm256_load_si256(reinterpret_cast<const __m256i*>(w[3]))};
    }
    // Refilled lanes start with a hold, not a jump.
    if (!moving) continue;
    const __m256i move = mask32(moving);
    Lanes adv;
    const __m256i u = next31(st, adv);
    st.s0 = select(move, adv.s0, st.s0);
    st.s1 = select(move, adv.s1, st.s1);
    st.s2 = select(move, adv.s2, st.s2);
    st.s3 = select(move, adv.s3, st.s3);
    const __m256i thr = _mm256_i32gather_epi32(p.up_threshold, idx, 4);
    const __m256i up = _mm256_andnot_si256(_mm256_cmpgt_epi32(u, thr), _mm256_set1_epi32(-1));
    const __m256i step = _mm256_sub_epi32(_mm256_and_si256(up, two), one);
    site = select(move, _mm256_add_epi32(site, step), site);
    jumps = _mm256_sub_epi32(jumps, move);
  }
}

}  // namespace occtime
