#include <cstdlib>
#include <string_view>

#include "photonbits/simd/kernels.hpp"

namespace photonbits::simd {

#if defined(PHOTONBITS_WITH_AVX2)
const KernelTable& avx2_kernel_table() noexcept;
#endif

const KernelTable* avx2_kernels() noexcept {
#if defined(PHOTONBITS_WITH_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &avx2_kernel_table() : nullptr;
#else
  return nullptr;
#endif
}

// TODO: add NEON variants; aarch64 hosts currently run the scalar table.
const KernelTable& active_kernels() noexcept {
  static const KernelTable& table = [] () -> const KernelTable& {
    if (const char* env = std::getenv("PHOTONBITS_SIMD"); env && std::string_view(env) == "scalar") {
      return scalar_kernels();
    }
    if (const KernelTable* t = avx2_kernels()) return *t;
    return scalar_kernels();
  }();
  return table;
}

}  // namespace photonbits::simd
