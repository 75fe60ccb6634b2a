#pragma once

#include "semicomp/kernels/kernels.hpp"

namespace semicomp::kernels {

// Backend registry internals shared by the dispatch unit and the equivalence
// tests (which need to call both backends directly on the same inputs).
const Backend& scalar_backend();

#if defined(__x86_64__) || defined(_M_X64)
const Backend& avx2_backend();
bool avx2_supported();
#endif

#if defined(__aarch64__) && defined(__ARM_NEON)
const Backend& neon_backend();
#endif

} // namespace semicomp::kernels
