#include <atomic>
#include <stdexcept>

#include "occtime/simd.hpp"

namespace occtime {

namespace {

// -1: automatic, otherwise a SimdLevel value.
std::atomic<int> g_override{-1};

bool cpu_has_avx2() {
#if defined(OCCTIME_BUILD_AVX2) && (defined(__x86_64__) || defined(__i386__))
  static const bool has = __builtin_cpu_supports("avx2");
  return has;
#else
  return false;
#endif
}

}  // namespace

#if !defined(OCCTIME_BUILD_AVX2)
// Portable builds route the AVX2 entry points to the reference kernels.
void clenshaw_batch_avx2(const double* coef, std::size_t ncoef, const double* t, double* out, std::size_t m) {
  clenshaw_batch_scalar(coef, ncoef, t, out, m);
}
void lattice_walk_avx2(const LatticeWalkParams& p, std::uint64_t seed, std::uint64_t first_path, std::size_t count,
                       LatticeWalkResult* out) {
  lattice_walk_scalar(p, seed, first_path, count, out);
}
void chain_walk_avx2(const ChainWalkParams& p, std::uint64_t seed, std::uint64_t first_path, std::size_t count,
                     ChainWalkResult* out) {
  chain_walk_scalar(p, seed, first_path, count, out);
}
#endif

std::string to_string(SimdLevel level) { return level == SimdLevel::avx2 ? "avx2" : "scalar"; }

bool avx2_available() { return cpu_has_avx2(); }

SimdLevel active_simd_level() {
  const int o = g_override.load(std::memory_order_relaxed);
  if (o >= 0) return static_cast<SimdLevel>(o);
  return cpu_has_avx2() ? SimdLevel::avx2 : SimdLevel::scalar;
}

void set_simd_override(std::optional<SimdLevel> level) {
  if (level && *level == SimdLevel::avx2 && !cpu_has_avx2())
    throw std::runtime_error("AVX2 kernels are not available on this machine");
  g_override.store(level ? static_cast<int>(*level) : -1, std::memory_order_relaxed);
}

void clenshaw_batch(const double* coef, std::size_t ncoef, const double* t, double* out, std::size_t m) {
  if (active_simd_level() == SimdLevel::avx2) clenshaw_batch_avx2(coef, ncoef, t, out, m);
  else clenshaw_batch_scalar(coef, ncoef, t, out, m);
}

void lattice_walk(const LatticeWalkParams& p, std::uint64_t seed, std::uint64_t first_path, std::size_t count,
                  LatticeWalkResult* out) {
  if (active_simd_level() == SimdLevel::avx2) lattice_walk_avx2(p, seed, first_path, count, out);
  else lattice_walk_scalar(p, seed, first_path, count, out);
}

void chain_walk(const ChainWalkParams& p, std::uint64_t seed, std::uint64_t first_path, std::size_t count,
                ChainWalkResult* out) {
  if (active_simd_level() == SimdLevel::avx2) chain_walk_avx2(p, seed, first_path, count, out);
  else chain_walk_scalar(p, seed, first_path, count, out);
}

}  // namespace occtime
