#include <cstdlib>
#include <string_view>

#include "shotguard/kernels.hpp"
#include "variants.hpp"

namespace shotguard::kernels {

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
  }
  return "unknown";
}

bool isa_supported(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(SHOTGUARD_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

const KernelTable& kernel_table(Isa isa) noexcept {
#if defined(SHOTGUARD_HAVE_AVX2)
  if (isa == Isa::avx2 && isa_supported(Isa::avx2)) return *detail::avx2_table();
#endif
  (void)isa;
  return scalar_table();
}

const KernelTable& active() noexcept {
  static const KernelTable& table = []() -> const KernelTable& {
    const char* forced = std::getenv("SHOTGUARD_ISA");
    if (forced != nullptr && std::string_view(forced) == "scalar") return scalar_table();
    return kernel_table(Isa::avx2);
  }();
  return table;
}

}  // namespace shotguard::kernels
