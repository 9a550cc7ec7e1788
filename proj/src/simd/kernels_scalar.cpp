#include <bit>
#include <cassert>

#include "kernel_common.hpp"
#include "photonbits/simd/kernels.hpp"

namespace photonbits::simd {
namespace {

using namespace detail;

void fill_u64(Xoshiro4x& g, std::span<std::uint64_t> out) {
  assert(out.size() % 4 == 0);
  for (std::size_t i = 0; i < out.size(); i += 4) {
    for (int l = 0; l < 4; ++l) out[i + l] = xoshiro_step(g.s.data(), l);
  }
}

void fill_exponential(Xoshiro4x& g, std::span<double> out, double mean) {
  assert(out.size() % 4 == 0);
  for (std::size_t i = 0; i < out.size(); i += 4) {
    for (int l = 0; l < 4; ++l) {
      const double u = uniform_open(xoshiro_step(g.s.data(), l));
      out[i + l] = -log_unit(u) * mean;
    }
  }
}

void edge_indices(std::span<const double> t, double offset, double phase, double period,
                  std::span<double> out) {
  assert(out.size() >= t.size());
  for (std::size_t i = 0; i < t.size(); ++i) out[i] = edge_index(t[i], offset, phase, period);
}

void restart_signs(std::span<const double> iv, double period, double skew,
                   std::span<std::int8_t> out) {
  const std::size_t pairs = iv.size() / 2;
  assert(out.size() >= pairs);
  for (std::size_t i = 0; i < pairs; ++i) {
    const double n1 = detail::restart_count(iv[2 * i] + skew, period);
    const double n2 = detail::restart_count(iv[2 * i + 1], period);
    out[i] = static_cast<std::int8_t>((n1 > n2) - (n1 < n2));
  }
}

std::uint64_t pairs_at_lag(std::span<const std::uint64_t> w, std::size_t n_bits, int k) {
  if (n_bits <= static_cast<std::size_t>(k)) return 0;
  const std::size_t m = n_bits - static_cast<std::size_t>(k);
  const std::size_t full = m / 64;
  const std::size_t nw = w.size();
  std::uint64_t total = 0;
  for (std::size_t j = 0; j < full; ++j) {
    const std::uint64_t sh = (w[j] >> k) | (w[j + 1] << (64 - k));
    total += static_cast<std::uint64_t>(std::popcount(w[j] & sh));
  }
  if (const std::size_t rem = m % 64; rem != 0) {
    const std::uint64_t next = full + 1 < nw ? w[full + 1] << (64 - k) : 0;
    const std::uint64_t sh = (w[full] >> k) | next;
    const std::uint64_t mask = (std::uint64_t{1} << rem) - 1;
    total += static_cast<std::uint64_t>(std::popcount(w[full] & sh & mask));
  }
  return total;
}

void lag_pair_counts(std::span<const std::uint64_t> w, std::size_t n_bits,
                     std::span<std::uint64_t> out) {
  assert(out.size() <= static_cast<std::size_t>(kMaxLag));
  for (std::size_t k = 1; k <= out.size(); ++k) out[k - 1] = pairs_at_lag(w, n_bits, static_cast<int>(k));
}

std::uint64_t count_ones(std::span<const std::uint64_t> w, std::size_t n_bits) {
  const std::size_t full = n_bits / 64;
  std::uint64_t total = 0;
  for (std::size_t j = 0; j < full; ++j) total += static_cast<std::uint64_t>(std::popcount(w[j]));
  if (const std::size_t rem = n_bits % 64; rem != 0) {
    total += static_cast<std::uint64_t>(std::popcount(w[full] & ((std::uint64_t{1} << rem) - 1)));
  }
  return total;
}

constexpr KernelTable kScalar{
    "scalar", fill_u64, fill_exponential, edge_indices, restart_signs, lag_pair_counts, count_ones,
};

}  // namespace

const KernelTable& scalar_kernels() noexcept { return kScalar; }

double log_open_unit(double u) noexcept { return detail::log_unit(u); }

double restart_count(double t, double period) noexcept { return detail::restart_count(t, period); }

}  // namespace photonbits::simd
