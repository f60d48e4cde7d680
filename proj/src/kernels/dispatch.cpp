#include "mfg/kernels.hpp"

#include <cstdlib>
#include <string_view>

namespace mfg::kernels {

#if defined(MFG_BUILD_AVX2)
namespace avx2 {
KernelTable const &table();
}
#endif

KernelTable const *avx2_table()
{
#if defined(MFG_BUILD_AVX2)
  static bool const supported = __builtin_cpu_supports("avx2");
  return supported ? &avx2::table() : nullptr;
#else
  return nullptr;
#endif
}

KernelTable const &active()
{
  static KernelTable const &chosen = [] () -> KernelTable const & {
    char const *env = std::getenv("MFG_SIMD");
    if (env != nullptr && std::string_view(env) == "scalar") return scalar_table();
    if (auto const *t = avx2_table()) return *t;
    return scalar_table();
  }();
  return chosen;
}

} // namespace mfg::kernels
