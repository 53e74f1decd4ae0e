#include <atomic>
#include <cstdlib>
#include <string>

#include "gradprop/error.hpp"
#include "gradprop/kernels.hpp"
#include "kernel_impls.hpp"

namespace gradprop::kernels {

namespace {

const KernelTable kScalar{Isa::Scalar, &scalar::dot, &scalar::axpy, &scalar::gemv, &scalar::gemv_t, &scalar::ger};

#if defined(GRADPROP_HAVE_AVX2)
const KernelTable kAvx2{Isa::Avx2, &avx2::dot, &avx2::axpy, &avx2::gemv, &avx2::gemv_t, &avx2::ger};
#endif

const KernelTable* pick_default() {
  const char* env = std::getenv("GRADPROP_KERNELS");
  const std::string choice = env ? env : "auto";
  if (choice == "scalar") return &kScalar;
  const KernelTable* simd = (avx2_table() && cpu_has_avx2()) ? avx2_table() : nullptr;
  if (choice == "avx2") {
    if (!simd) throw ConfigError("GRADPROP_KERNELS=avx2 requested but AVX2/FMA is unavailable");
    return simd;
  }
  if (choice != "auto") throw ConfigError("GRADPROP_KERNELS must be scalar, avx2 or auto, got '" + choice + "'");
  return simd ? simd : &kScalar;
}

std::atomic<const KernelTable*> g_active{nullptr};

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

const KernelTable* avx2_table() {
#if defined(GRADPROP_HAVE_AVX2)
  return &kAvx2;
#else
  return nullptr;
#endif
}

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(__i386__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

const KernelTable& active() {
  const KernelTable* t = g_active.load(std::memory_order_acquire);
  if (!t) {
    t = pick_default();
    g_active.store(t, std::memory_order_release);
  }
  return *t;
}

void select(Isa isa) {
  if (isa == Isa::Scalar) {
    g_active.store(&kScalar, std::memory_order_release);
    return;
  }
  if (!avx2_table() || !cpu_has_avx2()) throw ConfigError("AVX2 kernels unavailable on this build or CPU");
  g_active.store(avx2_table(), std::memory_order_release);
}

std::string_view name(Isa isa) { return isa == Isa::Avx2 ? "avx2" : "scalar"; }

}  // namespace gradprop::kernels
