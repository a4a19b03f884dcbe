#pragma once

#include "shotguard/kernels.hpp"

namespace shotguard::kernels::detail {

// Defined only when the AVX2 translation unit is compiled in.
const KernelTable* avx2_table() noexcept;

}  // namespace shotguard::kernels::detail
