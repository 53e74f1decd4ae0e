#pragma once

// Image-classification datasets: MNIST and Fashion-MNIST in IDX format,
// CIFAR-10 binary batches. Pixels are scaled into [0, 1] by the format maximum
// (255); labels become one-hot output targets.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gradprop/mathcore.hpp"

namespace gradprop {

/// Labelled examples with features in [0, 1]. Image data keeps its raw bytes
/// and scales on access; synthetic data may be given as doubles.
class Dataset {
 public:
  Dataset() = default;

  /// Features are byte / 255. Throws ConfigError on inconsistent sizes or a
  /// label outside [0, num_classes).
  static Dataset from_bytes(std::string name, std::size_t feature_dim, std::size_t num_classes,
                            std::vector<std::uint8_t> pixels, std::vector<std::uint8_t> labels);
  /// Throws ConfigError on inconsistent sizes, features outside [0, 1] or a bad label.
  static Dataset from_dense(std::string name, std::size_t feature_dim, std::size_t num_classes,
                            std::vector<double> features, std::vector<std::size_t> labels);

  const std::string& name() const noexcept { return name_; }
  std::size_t size() const noexcept { return labels_.size(); }
  bool empty() const noexcept { return labels_.empty(); }
  std::size_t feature_dim() const noexcept { return feature_dim_; }
  std::size_t num_classes() const noexcept { return num_classes_; }

  std::size_t label(std::size_t i) const { return labels_.at(i); }
  Vector features(std::size_t i) const;
  void copy_features(std::size_t i, std::span<double> out) const;
  /// Raw bytes of example i (byte-backed datasets only).
  std::span<const std::uint8_t> raw_bytes(std::size_t i) const;
  bool byte_backed() const noexcept { return dense_.empty() && !labels_.empty(); }

  /// Examples [begin, begin + count) in file order.
  Dataset slice(std::size_t begin, std::size_t count) const;

  bool operator==(const Dataset&) const = default;

 private:
  std::string name_;
  std::size_t feature_dim_ = 0;
  std::size_t num_classes_ = 0;
  std::vector<std::uint8_t> bytes_;
  std::vector<double> dense_;
  std::vector<std::size_t> labels_;
};

/// Unit vector of length num_classes at `label`. Throws ConfigError if
/// label >= num_classes.
Vector one_hot(std::size_t label, std::size_t num_classes);

constexpr std::uint32_t kIdxImageMagic = 0x00000803;
constexpr std::uint32_t kIdxLabelMagic = 0x00000801;
constexpr std::size_t kCifarRecordBytes = 3073;

/// Reads an IDX3 image file and IDX1 label file (uncompressed). Throws
/// DataError carrying the byte offset of the problem.
Dataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels,
                 const std::string& name = "idx");

/// Reads CIFAR-10 binary batches: records of 1 label byte plus 3072
/// channel-major pixel bytes.
Dataset load_cifar10(const std::vector<std::filesystem::path>& batches, const std::string& name = "cifar10");

/// First train_size examples, then the next test_size, in file order.
/// Throws ConfigError if train_size is zero or the sizes overrun the data.
std::pair<Dataset, Dataset> split_train_test(const Dataset& data, std::size_t train_size, std::size_t test_size);

}  // namespace gradprop
