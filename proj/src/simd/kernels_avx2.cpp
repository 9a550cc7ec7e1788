// Compiled with -mavx2 only; selected at runtime by dispatch.cpp.

#include <immintrin.h>

#include <bit>
#include <cassert>

#include "kernel_common.hpp"
#include "photonbits/simd/kernels.hpp"

namespace photonbits::simd {
namespace {

using namespace detail;

inline __m256i rotl64(__m256i x, int k) {
  return _mm256_or_si256(_mm256_slli_epi64(x, k), _mm256_srli_epi64(x, 64 - k));
}

struct Lanes {
  __m256i s0, s1, s2, s3;

  explicit Lanes(const Xoshiro4x& g)
      : s0(_mm256_load_si256(reinterpret_cast<const __m256i*>(g.s.data()))),
        s1(_mm256_load_si256(reinterpret_cast<const __m256i*>(g.s.data() + 4))),
        s2(_mm256_load_si256(reinterpret_cast<const __m256i*>(g.s.data() + 8))),
        s3(_mm256_load_si256(reinterpret_cast<const __m256i*>(g.s.data() + 12))) {}

  void store(Xoshiro4x& g) const {
    _mm256_store_si256(reinterpret_cast<__m256i*>(g.s.data()), s0);
    _mm256_store_si256(reinterpret_cast<__m256i*>(g.s.data() + 4), s1);
    _mm256_store_si256(reinterpret_cast<__m256i*>(g.s.data() + 8), s2);
    _mm256_store_si256(reinterpret_cast<__m256i*>(g.s.data() + 12), s3);
  }

  __m256i next() {
    const __m256i result = _mm256_add_epi64(rotl64(_mm256_add_epi64(s0, s3), 23), s0);
    const __m256i t = _mm256_slli_epi64(s1, 17);
    s2 = _mm256_xor_si256(s2, s0);
    s3 = _mm256_xor_si256(s3, s1);
    s1 = _mm256_xor_si256(s1, s2);
    s0 = _mm256_xor_si256(s0, s3);
    s2 = _mm256_xor_si256(s2, t);
    s3 = rotl64(s3, 45);
    return result;
  }
};

// Exact conversion of integers below 2^52 held in 64-bit lanes.
inline __m256d small_u64_to_double(__m256i v) {
  const __m256i magic_bits = _mm256_set1_epi64x(0x4330000000000000LL);
  const __m256d magic = _mm256_set1_pd(0x1.0p52);
  return _mm256_sub_pd(_mm256_castsi256_pd(_mm256_or_si256(v, magic_bits)), magic);
}

inline __m256d uniform_open4(__m256i r) {
  const __m256d k = small_u64_to_double(_mm256_srli_epi64(r, 12));
  return _mm256_mul_pd(_mm256_add_pd(k, _mm256_set1_pd(0.5)), _mm256_set1_pd(0x1.0p-52));
}

inline __m256d log_unit4(__m256d u) {
  const __m256i bits = _mm256_castpd_si256(u);
  __m256d e = _mm256_sub_pd(small_u64_to_double(_mm256_srli_epi64(bits, 52)), _mm256_set1_pd(1023.0));
  const __m256i mbits = _mm256_or_si256(_mm256_and_si256(bits, _mm256_set1_epi64x(static_cast<long long>(kMantissaMask))),
                                        _mm256_set1_epi64x(static_cast<long long>(kExponentOne)));
  __m256d m = _mm256_castsi256_pd(mbits);
  const __m256d big = _mm256_cmp_pd(m, _mm256_set1_pd(kSqrt2), _CMP_GT_OQ);
  m = _mm256_blendv_pd(m, _mm256_mul_pd(m, _mm256_set1_pd(0.5)), big);
  e = _mm256_blendv_pd(e, _mm256_add_pd(e, _mm256_set1_pd(1.0)), big);
  const __m256d f = _mm256_sub_pd(m, _mm256_set1_pd(1.0));
  const __m256d s = _mm256_div_pd(f, _mm256_add_pd(_mm256_set1_pd(2.0), f));
  const __m256d z = _mm256_mul_pd(s, s);
  __m256d p = _mm256_set1_pd(kAtanhCoef[10]);
  for (int k = 9; k >= 0; --k) p = _mm256_add_pd(_mm256_mul_pd(p, z), _mm256_set1_pd(kAtanhCoef[k]));
  const __m256d r = _mm256_mul_pd(s, p);
  const __m256d lo = _mm256_add_pd(_mm256_mul_pd(e, _mm256_set1_pd(kLn2Lo)), _mm256_add_pd(r, r));
  return _mm256_add_pd(_mm256_mul_pd(e, _mm256_set1_pd(kLn2Hi)), lo);
}

void fill_u64(Xoshiro4x& g, std::span<std::uint64_t> out) {
  assert(out.size() % 4 == 0);
  Lanes lanes(g);
  for (std::size_t i = 0; i < out.size(); i += 4) {
    _mm256_storeu_si256(reinterpret_cast<__m256i*>(out.data() + i), lanes.next());
  }
  lanes.store(g);
}

void fill_exponential(Xoshiro4x& g, std::span<double> out, double mean) {
  assert(out.size() % 4 == 0);
  Lanes lanes(g);
  const __m256d vmean = _mm256_set1_pd(mean);
  const __m256d sign = _mm256_set1_pd(-0.0);
  for (std::size_t i = 0; i < out.size(); i += 4) {
    const __m256d l = log_unit4(uniform_open4(lanes.next()));
    _mm256_storeu_pd(out.data() + i, _mm256_mul_pd(_mm256_xor_pd(l, sign), vmean));
  }
  lanes.store(g);
}

inline __m256d edge_index4(__m256d t, __m256d offset, __m256d phase, __m256d period) {
  const __m256d v = _mm256_floor_pd(_mm256_div_pd(_mm256_sub_pd(_mm256_add_pd(t, offset), phase), period));
  return _mm256_max_pd(v, _mm256_setzero_pd());
}

void edge_indices(std::span<const double> t, double offset, double phase, double period,
                  std::span<double> out) {
  assert(out.size() >= t.size());
  const __m256d vo = _mm256_set1_pd(offset), vp = _mm256_set1_pd(phase), vT = _mm256_set1_pd(period);
  std::size_t i = 0;
  for (; i + 4 <= t.size(); i += 4) {
    _mm256_storeu_pd(out.data() + i, edge_index4(_mm256_loadu_pd(t.data() + i), vo, vp, vT));
  }
  for (; i < t.size(); ++i) out[i] = edge_index(t[i], offset, phase, period);
}

inline __m256d restart_count4(__m256d t, __m256d period) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d n = _mm256_floor_pd(_mm256_div_pd(t, period));
  const __m256d down = _mm256_and_pd(_mm256_cmp_pd(n, one, _CMP_GE_OQ),
                                     _mm256_cmp_pd(_mm256_mul_pd(n, period), t, _CMP_GT_OQ));
  const __m256d up = _mm256_cmp_pd(_mm256_mul_pd(_mm256_add_pd(n, one), period), t, _CMP_LE_OQ);
  __m256d r = _mm256_blendv_pd(n, _mm256_add_pd(n, one), up);
  return _mm256_blendv_pd(r, _mm256_sub_pd(n, one), down);
}

void restart_signs(std::span<const double> iv, double period, double skew,
                   std::span<std::int8_t> out) {
  const std::size_t pairs = iv.size() / 2;
  assert(out.size() >= pairs);
  const __m256d vT = _mm256_set1_pd(period), vs = _mm256_set1_pd(skew);
  std::size_t i = 0;
  for (; i + 4 <= pairs; i += 4) {
    const __m256d a = _mm256_loadu_pd(iv.data() + 2 * i);
    const __m256d b = _mm256_loadu_pd(iv.data() + 2 * i + 4);
    // unpack yields pair order (0, 2, 1, 3); permute back to (0, 1, 2, 3).
    const __m256d first = _mm256_permute4x64_pd(_mm256_unpacklo_pd(a, b), 0xD8);
    const __m256d second = _mm256_permute4x64_pd(_mm256_unpackhi_pd(a, b), 0xD8);
    const __m256d n1 = restart_count4(_mm256_add_pd(first, vs), vT);
    const __m256d n2 = restart_count4(second, vT);
    const int gt = _mm256_movemask_pd(_mm256_cmp_pd(n1, n2, _CMP_GT_OQ));
    const int lt = _mm256_movemask_pd(_mm256_cmp_pd(n1, n2, _CMP_LT_OQ));
    for (int l = 0; l < 4; ++l) {
      out[i + l] = static_cast<std::int8_t>(((gt >> l) & 1) - ((lt >> l) & 1));
    }
  }
  for (; i < pairs; ++i) {
    const double n1 = detail::restart_count(iv[2 * i] + skew, period);
    const double n2 = detail::restart_count(iv[2 * i + 1], period);
    out[i] = static_cast<std::int8_t>((n1 > n2) - (n1 < n2));
  }
}

// Nibble-table popcount, accumulated into 64-bit lanes.
inline __m256i popcount_sad(__m256i v) {
  const __m256i lut = _mm256_setr_epi8(0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4,
                                       0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3, 3, 4);
  const __m256i low = _mm256_set1_epi8(0x0f);
  const __m256i lo = _mm256_and_si256(v, low);
  const __m256i hi = _mm256_and_si256(_mm256_srli_epi16(v, 4), low);
  const __m256i cnt = _mm256_add_epi8(_mm256_shuffle_epi8(lut, lo), _mm256_shuffle_epi8(lut, hi));
  return _mm256_sad_epu8(cnt, _mm256_setzero_si256());
}

inline std::uint64_t hsum(__m256i v) {
  alignas(32) std::uint64_t t[4];
  _mm256_store_si256(reinterpret_cast<__m256i*>(t), v);
  return t[0] + t[1] + t[2] + t[3];
}

std::uint64_t pairs_at_lag(std::span<const std::uint64_t> w, std::size_t n_bits, int k) {
  if (n_bits <= static_cast<std::size_t>(k)) return 0;
  const std::size_t m = n_bits - static_cast<std::size_t>(k);
  const std::size_t full = m / 64;
  const std::size_t nw = w.size();
  __m256i acc = _mm256_setzero_si256();
  std::size_t j = 0;
  for (; j + 4 <= full; j += 4) {
    const __m256i cur = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(w.data() + j));
    const __m256i nxt = _mm256_loadu_si256(reinterpret_cast<const __m256i*>(w.data() + j + 1));
    const __m256i sh = _mm256_or_si256(_mm256_srli_epi64(cur, k), _mm256_slli_epi64(nxt, 64 - k));
    acc = _mm256_add_epi64(acc, popcount_sad(_mm256_and_si256(cur, sh)));
  }
  std::uint64_t total = hsum(acc);
  for (; j < full; ++j) {
    const std::uint64_t sh = (w[j] >> k) | (w[j + 1] << (64 - k));
    total += static_cast<std::uint64_t>(std::popcount(w[j] & sh));
  }
  if (const std::size_t rem = m % 64; rem != 0) {
    const std::uint64_t next = full + 1 < nw ? w[full + 1] << (64 - k) : 0;
    const std::uint64_t sh = (w[full] >> k) | next;
    total += static_cast<std::uint64_t>(std::popcount(w[full] & sh & ((std::uint64_t{1} << rem) - 1)));
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
  __m256i acc = _mm256_setzero_si256();
  std::size_t j = 0;
  for (; j + 4 <= full; j += 4) {
    acc = _mm256_add_epi64(acc, popcount_sad(_mm256_loadu_si256(reinterpret_cast<const __m256i*>(w.data() + j))));
  }
  std::uint64_t total = hsum(acc);
  for (; j < full; ++j) total += static_cast<std::uint64_t>(std::popcount(w[j]));
  if (const std::size_t rem = n_bits % 64; rem != 0) {
    total += static_cast<std::uint64_t>(std::popcount(w[full] & ((std::uint64_t{1} << rem) - 1)));
  }
  return total;
}

constexpr KernelTable kAvx2{
    "avx2", fill_u64, fill_exponential, edge_indices, restart_signs, lag_pair_counts, count_ones,
};

}  // namespace

const KernelTable& avx2_kernel_table() noexcept { return kAvx2; }

}  // namespace photonbits::simd
