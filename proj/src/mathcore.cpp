#include "gradprop/mathcore.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gradprop/error.hpp"
#include "gradprop/kernels.hpp"

namespace gradprop {

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill) : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major)
    : rows_(rows), cols_(cols), data_(std::move(row_major)) {
  if (data_.size() != rows * cols) {
    throw ConfigError("matrix data has " + std::to_string(data_.size()) + " entries, expected " +
                      std::to_string(rows) + "x" + std::to_string(cols));
  }
}

std::string_view to_string(ActivationKind kind) { return kind == ActivationKind::ReLU ? "relu" : "sigmoid"; }

ActivationKind parse_activation(std::string_view name) {
  if (name == "sigmoid") return ActivationKind::Sigmoid;
  if (name == "relu") return ActivationKind::ReLU;
  throw ConfigError("unknown activation '" + std::string(name) + "' (expected sigmoid or relu)");
}

double Rng::normal(double mean, double stddev) { return std::normal_distribution<double>(mean, stddev)(engine_); }

double Rng::uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }

std::size_t Rng::index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_); }

Vector matvec(const Matrix& m, const Vector& v) {
  if (m.cols() != v.size()) {
    throw ConfigError("matvec: matrix has " + std::to_string(m.cols()) + " columns but vector has " +
                      std::to_string(v.size()) + " entries");
  }
  Vector out(m.rows());
  kernels::active().gemv(m.data(), m.rows(), m.cols(), v.data(), out.data());
  return out;
}

Vector matvec_transposed(const Matrix& m, const Vector& v) {
  if (m.rows() != v.size()) {
    throw ConfigError("matvec_transposed: matrix has " + std::to_string(m.rows()) + " rows but vector has " +
                      std::to_string(v.size()) + " entries");
  }
  Vector out(m.cols());
  kernels::active().gemv_t(m.data(), m.rows(), m.cols(), v.data(), out.data());
  return out;
}

double sigmoid(double z) {
  // Split by sign so exp never overflows.
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

double activate(ActivationKind kind, double z) { return kind == ActivationKind::ReLU ? std::max(0.0, z) : sigmoid(z); }

Vector activate(ActivationKind kind, const Vector& z) {
  Vector y(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) y[i] = activate(kind, z[i]);
  return y;
}

double activate_deriv(ActivationKind kind, double z, double y) {
  if (kind == ActivationKind::ReLU) return z >= 0.0 ? 1.0 : 0.0;
  return y * (1.0 - y);
}

Vector activate_deriv(ActivationKind kind, const Vector& z, const Vector& y) {
  if (z.size() != y.size()) throw ConfigError("activate_deriv: z and y lengths differ");
  Vector d(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) d[i] = activate_deriv(kind, z[i], y[i]);
  return d;
}

Vector sample_normal(Rng& rng, double mean, double variance, std::size_t n) {
  if (!(variance > 0.0) || !std::isfinite(variance)) {
    throw ConfigError("sample_normal: variance must be positive and finite, got " + std::to_string(variance));
  }
  std::normal_distribution<double> dist(mean, std::sqrt(variance));
  Vector out(n);
  for (auto& v : out) v = dist(rng.engine());
  return out;
}

bool all_finite(std::span<const double> values) {
  return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

}  // namespace gradprop
