#pragma once

// Scalar building blocks shared by every kernel table. The AVX2 kernels
// reproduce these operation sequences lane by lane.

#include <bit>
#include <cmath>
#include <cstdint>

namespace photonbits::simd::detail {

inline constexpr std::uint64_t kMantissaMask = 0x000fffffffffffffULL;
inline constexpr std::uint64_t kExponentOne = 0x3ff0000000000000ULL;
inline constexpr double kSqrt2 = 1.41421356237309514547;  // 0x3ff6a09e667f3bcd
inline constexpr double kLn2Hi = 6.93147180369123816490e-01;  // trailing zeros: e*hi exact
inline constexpr double kLn2Lo = 1.90821492927058770002e-10;

// 2*atanh(s) = log((1+s)/(1-s)) = 2s * sum z^k / (2k+1), z = s^2 <= 0.0295.
inline constexpr double kAtanhCoef[11] = {
    1.0,       1.0 / 3.0,  1.0 / 5.0,  1.0 / 7.0,  1.0 / 9.0,  1.0 / 11.0,
    1.0 / 13.0, 1.0 / 15.0, 1.0 / 17.0, 1.0 / 19.0, 1.0 / 21.0,
};

inline constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
  return (x << k) | (x >> (64 - k));
}

/// One xoshiro256++ step for lane `l` of a lane-interleaved state.
inline std::uint64_t xoshiro_step(std::uint64_t* s, int l) noexcept {
  std::uint64_t& s0 = s[l];
  std::uint64_t& s1 = s[4 + l];
  std::uint64_t& s2 = s[8 + l];
  std::uint64_t& s3 = s[12 + l];
  const std::uint64_t result = rotl(s0 + s3, 23) + s0;
  const std::uint64_t t = s1 << 17;
  s2 ^= s0;
  s3 ^= s1;
  s1 ^= s2;
  s0 ^= s3;
  s2 ^= t;
  s3 = rotl(s3, 45);
  return result;
}

/// log(u) for normal u in (0, 1).
inline double log_unit(double u) noexcept {
  const std::uint64_t bits = std::bit_cast<std::uint64_t>(u);
  double e = static_cast<double>(static_cast<std::int64_t>(bits >> 52)) - 1023.0;
  double m = std::bit_cast<double>((bits & kMantissaMask) | kExponentOne);
  if (m > kSqrt2) {
    m = m * 0.5;
    e = e + 1.0;
  }
  const double f = m - 1.0;
  const double s = f / (2.0 + f);
  const double z = s * s;
  double p = kAtanhCoef[10];
  for (int k = 9; k >= 0; --k) p = p * z + kAtanhCoef[k];
  const double r = s * p;
  return e * kLn2Hi + (e * kLn2Lo + (r + r));
}

inline double restart_count(double t, double period) noexcept {
  const double n = std::floor(t / period);
  if (n >= 1.0 && n * period > t) return n - 1.0;
  if ((n + 1.0) * period <= t) return n + 1.0;
  return n;
}

inline double edge_index(double t, double offset, double phase, double period) noexcept {
  const double v = std::floor(((t + offset) - phase) / period);
  return v > 0.0 ? v : 0.0;
}

}  // namespace photonbits::simd::detail
