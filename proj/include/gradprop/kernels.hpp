#pragma once

// Dense double-precision inner loops. Every kernel exists as a scalar
// reference and, on x86-64, as an AVX2/FMA variant. The active table is chosen
// once at first use from the CPU features, or forced with the environment
// variable GRADPROP_KERNELS=scalar|avx2.
//
// Variants agree to rounding only: the SIMD reductions sum in a different
// order. A single process always uses one table, so runs stay bit-reproducible
// on a given machine.

#include <cstddef>
#include <string_view>

namespace gradprop::kernels {

enum class Isa { Scalar, Avx2 };

struct KernelTable {
  Isa isa;
  // sum_i a[i] * b[i]
  double (*dot)(const double* a, const double* b, std::size_t n);
  // y += alpha * x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // y = M x, M row-major rows x cols
  void (*gemv)(const double* m, std::size_t rows, std::size_t cols, const double* x, double* y);
  // y = M^T x, M row-major rows x cols, y has cols entries
  void (*gemv_t)(const double* m, std::size_t rows, std::size_t cols, const double* x, double* y);
  // M += alpha * u v^T
  void (*ger)(double* m, std::size_t rows, std::size_t cols, double alpha, const double* u, const double* v);
};

const KernelTable& scalar_table();

/// nullptr when the AVX2 variant was not compiled in.
const KernelTable* avx2_table();

bool cpu_has_avx2();

/// The table every library routine dispatches through.
const KernelTable& active();

/// Force a variant for the rest of the process. Throws ConfigError if the
/// variant is unavailable on this build or CPU.
void select(Isa isa);

std::string_view name(Isa isa);

}  // namespace gradprop::kernels
