#include <cstdlib>
#include <string_view>

#include "washboard/kernels/kernels.hpp"

namespace washboard::kernels {

#if defined(WASHBOARD_BUILD_AVX2)
const KernelTable& avx2_kernel_table();
#endif

const KernelTable* avx2_kernels() {
#if defined(WASHBOARD_BUILD_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return supported ? &avx2_kernel_table() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active_kernels() {
  static const KernelTable* selected = [] {
    const char* env = std::getenv("WASHBOARD_KERNELS");
    if (env != nullptr && std::string_view(env) == "scalar") return &scalar_kernels();
    if (const KernelTable* fast = avx2_kernels()) return fast;
    return &scalar_kernels();
  }();
  return *selected;
}

}  // namespace washboard::kernels
