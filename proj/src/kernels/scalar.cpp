#include "kernel_impls.hpp"

namespace gradprop::kernels::scalar {

double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void gemv(const double* m, std::size_t rows, std::size_t cols, const double* x, double* y) {
  for (std::size_t i = 0; i < rows; ++i) y[i] = dot(m + i * cols, x, cols);
}

void gemv_t(const double* m, std::size_t rows, std::size_t cols, const double* x, double* y) {
  for (std::size_t j = 0; j < cols; ++j) y[j] = 0.0;
  for (std::size_t i = 0; i < rows; ++i) axpy(x[i], m + i * cols, y, cols);
}

void ger(double* m, std::size_t rows, std::size_t cols, double alpha, const double* u, const double* v) {
  for (std::size_t i = 0; i < rows; ++i) {
    const double s = alpha * u[i];
    if (s != 0.0) axpy(s, v, m + i * cols, cols);
  }
}

}  // namespace gradprop::kernels::scalar
