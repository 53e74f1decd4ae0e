#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace gradprop {

/// Invalid configuration, shapes or hyper-parameters. Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class DataErrorCode {
  FileOpen,
  BadMagic,
  BadHeader,
  Truncated,
  CountMismatch,
  BadRecordLength,
  BadLabel,
};

const char* to_string(DataErrorCode code);

/// Malformed or unreadable dataset/checkpoint file. Maps to CLI exit code 2.
class DataError : public std::runtime_error {
 public:
  DataError(DataErrorCode code, std::string path, std::uint64_t offset, const std::string& what);

  DataErrorCode code() const noexcept { return code_; }
  const std::string& path() const noexcept { return path_; }
  std::uint64_t offset() const noexcept { return offset_; }

 private:
  DataErrorCode code_;
  std::string path_;
  std::uint64_t offset_;
};

/// A non-finite value appeared while solving targets or updating weights.
/// Maps to CLI exit code 3.
class DivergenceError : public std::runtime_error {
 public:
  DivergenceError(std::size_t layer, std::size_t step, const std::string& what);

  std::size_t layer() const noexcept { return layer_; }
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t layer_;
  std::size_t step_;
};

/// The finite-difference oracle evaluated a non-finite cost.
class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gradprop
