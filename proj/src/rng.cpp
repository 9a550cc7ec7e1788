#include "photonbits/rng.hpp"

#include "photonbits/simd/kernels.hpp"

namespace photonbits {

Xoshiro4x seed_xoshiro4x(std::uint64_t seed, std::uint64_t tag) noexcept {
  Xoshiro4x g;
  SplitMix64 sm(derive_seed(seed, tag));
  for (auto& w : g.s) w = sm.next();
  // xoshiro must not start from the all-zero state in any lane.
  for (int lane = 0; lane < 4; ++lane) {
    if ((g.s[lane] | g.s[4 + lane] | g.s[8 + lane] | g.s[12 + lane]) == 0) g.s[lane] = 1;
  }
  return g;
}

std::uint64_t UniformSource::next_u64() noexcept {
  if (pos_ == 4) {
    simd::scalar_kernels().fill_u64(state_, block_);
    pos_ = 0;
  }
  return block_[pos_++];
}

}  // namespace photonbits
