#pragma once

// Hot loops with a scalar reference implementation and an AVX2 variant.
// The dispatchers pick AVX2 at run time when the CPU supports it; both
// variants produce bit-identical results (no FMA contraction, same operation
// order, per-path random streams).

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

namespace occtime {

enum class SimdLevel { scalar, avx2 };

std::string to_string(SimdLevel level);

/// True when the AVX2 kernels were compiled in and the CPU supports them.
bool avx2_available();
/// Level used by the dispatchers: the override if set, else the best available.
SimdLevel active_simd_level();
/// Forces a level (nullopt restores automatic selection). Requesting AVX2 on
/// a machine without it throws std::runtime_error.
void set_simd_override(std::optional<SimdLevel> level);

// --- Chebyshev series ---------------------------------------------------------

/// out[i] = sum_k coef[k] T_k(t[i]) for t[i] in [-1, 1], by Clenshaw's recurrence.
void clenshaw_batch(const double* coef, std::size_t ncoef, const double* t, double* out, std::size_t m);
void clenshaw_batch_scalar(const double* coef, std::size_t ncoef, const double* t, double* out, std::size_t m);
void clenshaw_batch_avx2(const double* coef, std::size_t ncoef, const double* t, double* out, std::size_t m);

// --- lattice walk -------------------------------------------------------------

/// Simple random walk on the integers with time step one slot. Away from 0 it
/// moves up when next31() < 2^30. At 0 one draw u decides: u <= hold_at_zero
/// keeps the walk at 0 for the slot, else u <= up_at_zero moves up, else down.
/// Slot occupation follows the linearly interpolated path: a moving slot is
/// positive when old + new > 0 and negative when old + new < 0; a holding
/// slot is a zero slot.
struct LatticeWalkParams {
  std::uint32_t slots = 0;
  std::int32_t hold_at_zero = -1;  // inclusive 31-bit threshold
  std::int32_t up_at_zero = 0;     // inclusive 31-bit threshold, >= hold_at_zero
};

struct LatticeWalkResult {
  std::uint32_t positive_slots;
  std::uint32_t zero_slots;
  std::int32_t terminal;
};

/// Simulates paths first_path .. first_path + count - 1 of master seed `seed`.
void lattice_walk(const LatticeWalkParams& p, std::uint64_t seed, std::uint64_t first_path, std::size_t count,
                  LatticeWalkResult* out);
void lattice_walk_scalar(const LatticeWalkParams& p, std::uint64_t seed, std::uint64_t first_path,
                         std::size_t count, LatticeWalkResult* out);
void lattice_walk_avx2(const LatticeWalkParams& p, std::uint64_t seed, std::uint64_t first_path, std::size_t count,
                       LatticeWalkResult* out);

// --- birth-death chain with deterministic holds -----------------------------

/// Nearest-neighbour chain on sites -max_site..max_site. Before each jump the
/// chain stays hold[site + max_site] time units at its site, of which the
/// fraction positive_fraction[site + max_site] counts as occupation of
/// [0, inf); it then moves up when next31() <= up_threshold[site + max_site].
/// The last hold is cut at the horizon. End sites must carry thresholds
/// that point inwards (-1 at the top, 2^31 - 1 at the bottom).
struct ChainWalkParams {
  double horizon = 1.0;
  std::int32_t max_site = 0;
  const double* hold = nullptr;               // 2 max_site + 1 entries
  const double* positive_fraction = nullptr;  // 2 max_site + 1 entries
  const std::int32_t* up_threshold = nullptr; // 2 max_site + 1 entries
};

struct ChainWalkResult {
  double occupation;
  std::int32_t terminal;
  std::uint32_t jumps;
};

void chain_walk(const ChainWalkParams& p, std::uint64_t seed, std::uint64_t first_path, std::size_t count,
                ChainWalkResult* out);
void chain_walk_scalar(const ChainWalkParams& p, std::uint64_t seed, std::uint64_t first_path, std::size_t count,
                       ChainWalkResult* out);
void chain_walk_avx2(const ChainWalkParams& p, std::uint64_t seed, std::uint64_t first_path, std::size_t count,
                     ChainWalkResult* out);

}  // namespace occtime
