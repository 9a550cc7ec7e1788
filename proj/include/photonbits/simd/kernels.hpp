#pragma once

// Data-parallel inner loops. Every entry exists as a scalar reference and,
// where the host allows, an AVX2 variant. The variants are required to be
// bit-identical (same IEEE operation sequence, no contraction), which
// tests/simd_equivalence_test.cpp checks on random inputs.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

#include "photonbits/rng.hpp"

namespace photonbits::simd {

struct KernelTable {
  std::string_view name;

  /// Raw xoshiro256++ draws in block order. out.size() must be a multiple of 4.
  void (*fill_u64)(Xoshiro4x& state, std::span<std::uint64_t> out);

  /// out[i] = -mean * log(uniform_open(draw i)). out.size() must be a multiple of 4.
  void (*fill_exponential)(Xoshiro4x& state, std::span<double> out, double mean);

  /// out[i] = max(0, floor((t[i] + offset - phase) / period)): the number of
  /// clock edges phase + k*period, k >= 1, at or before t[i] + offset.
  void (*edge_indices)(std::span<const double> t, double offset, double phase, double period,
                       std::span<double> out);

  /// `intervals` holds consecutive (t1, t2) pairs; out[i] is +1, -1 or 0 as the
  /// restarted-clock count of t1 + skew is above, below or equal to that of t2.
  void (*restart_signs)(std::span<const double> intervals, double period, double skew,
                        std::span<std::int8_t> out);

  /// out[k-1] = number of i < n_bits - k with bits i and i+k both set, for
  /// k = 1..out.size(). Bits are LSB-first within each word; out.size() <= 63.
  void (*lag_pair_counts)(std::span<const std::uint64_t> words, std::size_t n_bits,
                          std::span<std::uint64_t> out);

  /// Number of set bits among the first n_bits.
  std::uint64_t (*count_ones)(std::span<const std::uint64_t> words, std::size_t n_bits);
};

const KernelTable& scalar_kernels() noexcept;

/// AVX2 table, or nullptr when it was not compiled in or the CPU lacks AVX2.
const KernelTable* avx2_kernels() noexcept;

/// Best table for this host. Setting PHOTONBITS_SIMD=scalar in the
/// environment forces the scalar reference.
const KernelTable& active_kernels() noexcept;

/// The logarithm used by fill_exponential, exposed for accuracy tests.
double log_open_unit(double u) noexcept;

/// Restarted-clock edge count: #{k >= 1 : k*period <= t} with k*period
/// evaluated in double precision.
double restart_count(double t, double period) noexcept;

inline constexpr int kMaxLag = 63;

}  // namespace photonbits::simd
