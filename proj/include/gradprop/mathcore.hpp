#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>
#include <span>
#include <string_view>
#include <vector>

namespace gradprop {

/// Dense real vector. Owns its storage; length is fixed at construction.
class Vector {
 public:
  Vector() = default;
  explicit Vector(std::size_t n, double fill = 0.0) : data_(n, fill) {}
  Vector(std::initializer_list<double> values) : data_(values) {}
  explicit Vector(std::vector<double> values) : data_(std::move(values)) {}

  std::size_t size() const noexcept { return data_.size(); }
  bool empty() const noexcept { return data_.empty(); }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  double* data() noexcept { return data_.data(); }
  const double* data() const noexcept { return data_.data(); }
  std::span<double> span() noexcept { return data_; }
  std::span<const double> span() const noexcept { return data_; }

  auto begin() noexcept { return data_.begin(); }
  auto end() noexcept { return data_.end(); }
  auto begin() const noexcept { return data_.begin(); }
  auto end() const noexcept { return data_.end(); }

  const std::vector<double>& values() const noexcept { return data_; }

  bool operator==(const Vector&) const = default;

 private:
  std::vector<double> data_;
};

/// Row-major dense matrix. Entry (i, j) is the weight from input j to output i.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> row_major);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::size_t size() const noexcept { return data_.size(); }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  std::span<double> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const double> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }

  double* data() noexcept { return data_.data(); }
  const double* data() const noexcept { return data_.data(); }
  std::span<double> span() noexcept { return data_; }
  std::span<const double> span() const noexcept { return data_; }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

enum class ActivationKind : std::uint8_t { Sigmoid = 0, ReLU = 1 };

std::string_view to_string(ActivationKind kind);
/// Accepts "sigmoid" or "relu"; throws ConfigError otherwise.
ActivationKind parse_activation(std::string_view name);

/// Seeded pseudo-random source. Identical seeds give identical streams on the
/// same build. Single owner: never share one across threads.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  std::uint64_t seed() const noexcept { return seed_; }
  std::mt19937_64& engine() noexcept { return engine_; }

  double normal(double mean, double stddev);
  double uniform(double lo, double hi);
  /// Uniform integer in [0, n).
  std::size_t index(std::size_t n);

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

/// result[i] = sum_j m(i, j) * v[j]. Throws ConfigError on shape mismatch.
Vector matvec(const Matrix& m, const Vector& v);
/// result[j] = sum_i m(i, j) * v[i].
Vector matvec_transposed(const Matrix& m, const Vector& v);

double sigmoid(double z);
double activate(ActivationKind kind, double z);
Vector activate(ActivationKind kind, const Vector& z);

/// Sigmoid: y (1 - y), taken from the cached activation.
/// ReLU: 1 where z >= 0, else 0 (the kink counts as active).
double activate_deriv(ActivationKind kind, double z, double y);
Vector activate_deriv(ActivationKind kind, const Vector& z, const Vector& y);

/// n independent draws from Normal(mean, variance). Throws ConfigError
/// unless variance > 0.
Vector sample_normal(Rng& rng, double mean, double variance, std::size_t n);

bool all_finite(std::span<const double> values);

}  // namespace gradprop
