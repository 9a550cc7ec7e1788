#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace photonbits {

/// SplitMix64; used only to expand seeds into generator state.
class SplitMix64 {
 public:
  explicit constexpr SplitMix64(std::uint64_t seed) noexcept : state_(seed) {}

  constexpr std::uint64_t next() noexcept {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Four interleaved xoshiro256++ lanes. Word w of lane l lives at s[4*w + l],
/// which is the layout the AVX2 kernel loads directly. Output j of the block
/// sequence is lane (j % 4), step (j / 4).
struct Xoshiro4x {
  alignas(32) std::array<std::uint64_t, 16> s{};
};

/// Stable 64-bit tag for a substream purpose ("intervals", "afterpulse", ...).
constexpr std::uint64_t substream_tag(std::string_view name) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (char c : name) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Order-sensitive combination of a seed with further coordinates
/// (substream tag, grid index, replicate, ...).
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t coordinate) noexcept {
  SplitMix64 a(seed ^ 0x6a09e667f3bcc909ULL);
  SplitMix64 b(a.next() ^ coordinate);
  return b.next();
}

/// Expands (seed, tag) into four decorrelated xoshiro256++ lanes.
Xoshiro4x seed_xoshiro4x(std::uint64_t seed, std::uint64_t tag) noexcept;

/// Maps a raw 64-bit draw onto the open interval (0, 1) with 52-bit resolution.
constexpr double uniform_open(std::uint64_t r) noexcept {
  return (static_cast<double>(r >> 12) + 0.5) * 0x1.0p-52;
}

/// Scalar single-step access to a Xoshiro4x block, for consumers that need
/// one draw at a time. Yields the same sequence as the block kernels.
class UniformSource {
 public:
  UniformSource(std::uint64_t seed, std::uint64_t tag) noexcept
      : state_(seed_xoshiro4x(seed, tag)) {}

  std::uint64_t next_u64() noexcept;
  double next_open() noexcept { return uniform_open(next_u64()); }

 private:
  Xoshiro4x state_;
  std::array<std::uint64_t, 4> block_{};
  unsigned pos_ = 4;
};

}  // namespace photonbits
