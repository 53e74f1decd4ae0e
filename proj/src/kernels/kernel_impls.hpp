#pragma once

#include <cstddef>

namespace gradprop::kernels::scalar {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void gemv(const double* m, std::size_t rows, std::size_t cols, const double* x, double* y);
void gemv_t(const double* m, std::size_t rows, std::size_t cols, const double* x, double* y);
void ger(double* m, std::size_t rows, std::size_t cols, double alpha, const double* u, const double* v);
}  // namespace gradprop::kernels::scalar

#if defined(GRADPROP_HAVE_AVX2)
namespace gradprop::kernels::avx2 {
double dot(const double* a, const double* b, std::size_t n);
void axpy(double alpha, const double* x, double* y, std::size_t n);
void gemv(const double* m, std::size_t rows, std::size_t cols, const double* x, double* y);
void gemv_t(const double* m, std::size_t rows, std::size_t cols, const double* x, double* y);
void ger(double* m, std::size_t rows, std::size_t cols, double alpha, const double* u, const double* v);
}  // namespace gradprop::kernels::avx2
#endif
