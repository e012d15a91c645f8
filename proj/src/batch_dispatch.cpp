#include "calorpot/batch.hpp"

namespace calorpot::batch {

namespace {
Isa g_isa = avx2_supported() ? Isa::Avx2 : Isa::Scalar;
}

bool avx2_supported() {
#if defined(__x86_64__) && defined(CALORPOT_HAVE_AVX2)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa active_isa() { return g_isa; }

void force_isa(Isa isa) {
  if (isa == Isa::Avx2 && !avx2_supported())
    throw std::runtime_error("force_isa: AVX2 not supported on this host");
  g_isa = isa;
}

void reset_isa() { g_isa = avx2_supported() ? Isa::Avx2 : Isa::Scalar; }

const Kernels& active() {
#if defined(CALORPOT_HAVE_AVX2)
  if (g_isa == Isa::Avx2) return avx2_kernels();
#endif
  return scalar_kernels();
}

}  // namespace calorpot::batch
