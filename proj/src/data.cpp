#include "gradprop/data.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>

#include "gradprop/error.hpp"

namespace gradprop {

namespace {

constexpr double kPixelMax = 255.0;

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(DataErrorCode::FileOpen, path.string(), 0, "cannot open file");
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::uint32_t be32(const std::vector<std::uint8_t>& bytes, std::size_t offset, const std::filesystem::path& path,
                   const char* what) {
  if (bytes.size() < offset + 4) {
    throw DataError(DataErrorCode::Truncated, path.string(), bytes.size(), std::string("file ends inside ") + what);
  }
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

void check_labels(const std::vector<std::size_t>& labels, std::size_t num_classes) {
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= num_classes) {
      throw ConfigError("label " + std::to_string(labels[i]) + " of example " + std::to_string(i) + " is not below " +
                        std::to_string(num_classes));
    }
  }
}

}  // namespace

Dataset Dataset::from_bytes(std::string name, std::size_t feature_dim, std::size_t num_classes,
                            std::vector<std::uint8_t> pixels, std::vector<std::uint8_t> labels) {
  if (feature_dim == 0 || num_classes == 0) throw ConfigError("dataset needs positive feature_dim and num_classes");
  if (pixels.size() != labels.size() * feature_dim) {
    throw ConfigError("dataset has " + std::to_string(pixels.size()) + " pixel bytes for " +
                      std::to_string(labels.size()) + " labels of dimension " + std::to_string(feature_dim));
  }
  Dataset d;
  d.name_ = std::move(name);
  d.feature_dim_ = feature_dim;
  d.num_classes_ = num_classes;
  d.bytes_ = std::move(pixels);
  d.labels_.assign(labels.begin(), labels.end());
  check_labels(d.labels_, num_classes);
  return d;
}

Dataset Dataset::from_dense(std::string name, std::size_t feature_dim, std::size_t num_classes,
                            std::vector<double> features, std::vector<std::size_t> labels) {
  if (feature_dim == 0 || num_classes == 0) throw ConfigError("dataset needs positive feature_dim and num_classes");
  if (features.size() != labels.size() * feature_dim) throw ConfigError("feature count does not match labels");
  for (double v : features) {
    if (!(v >= 0.0 && v <= 1.0)) throw ConfigError("dataset features must lie in [0, 1]");
  }
  check_labels(labels, num_classes);
  Dataset d;
  d.name_ = std::move(name);
  d.feature_dim_ = feature_dim;
  d.num_classes_ = num_classes;
  d.dense_ = std::move(features);
  d.labels_ = std::move(labels);
  return d;
}

void Dataset::copy_features(std::size_t i, std::span<double> out) const {
  if (i >= size()) throw ConfigError("example index " + std::to_string(i) + " out of range");
  if (out.size() != feature_dim_) throw ConfigError("feature buffer has wrong length");
  if (!dense_.empty()) {
    std::copy_n(dense_.begin() + static_cast<std::ptrdiff_t>(i * feature_dim_), feature_dim_, out.begin());
    return;
  }
  const std::uint8_t* src = bytes_.data() + i * feature_dim_;
  for (std::size_t j = 0; j < feature_dim_; ++j) out[j] = src[j] / kPixelMax;
}

Vector Dataset::features(std::size_t i) const {
  Vector v(feature_dim_);
  copy_features(i, v.span());
  return v;
}

std::span<const std::uint8_t> Dataset::raw_bytes(std::size_t i) const {
  if (!byte_backed()) throw ConfigError("dataset is not byte-backed");
  if (i >= size()) throw ConfigError("example index " + std::to_string(i) + " out of range");
  return {bytes_.data() + i * feature_dim_, feature_dim_};
}

Dataset Dataset::slice(std::size_t begin, std::size_t count) const {
  if (begin > size() || count > size() - begin) {
    throw ConfigError("slice [" + std::to_string(begin) + ", " + std::to_string(begin + count) +
                      ") exceeds dataset of " + std::to_string(size()));
  }
  Dataset d;
  d.name_ = name_;
  d.feature_dim_ = feature_dim_;
  d.num_classes_ = num_classes_;
  const auto lo = static_cast<std::ptrdiff_t>(begin * feature_dim_);
  const auto hi = static_cast<std::ptrdiff_t>((begin + count) * feature_dim_);
  if (!dense_.empty()) d.dense_.assign(dense_.begin() + lo, dense_.begin() + hi);
  if (!bytes_.empty()) d.bytes_.assign(bytes_.begin() + lo, bytes_.begin() + hi);
  d.labels_.assign(labels_.begin() + static_cast<std::ptrdiff_t>(begin),
                   labels_.begin() + static_cast<std::ptrdiff_t>(begin + count));
  return d;
}

Vector one_hot(std::size_t label, std::size_t num_classes) {
  if (label >= num_classes) {
    throw ConfigError("label " + std::to_string(label) + " out of range for " + std::to_string(num_classes) +
                      " classes");
  }
  Vector v(num_classes);
  v[label] = 1.0;
  return v;
}

Dataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels, const std::string& name) {
  const auto img = read_file(images);
  const auto lab = read_file(labels);

  if (be32(img, 0, images, "magic") != kIdxImageMagic) {
    throw DataError(DataErrorCode::BadMagic, images.string(), 0, "expected IDX image magic 0x00000803");
  }
  if (be32(lab, 0, labels, "magic") != kIdxLabelMagic) {
    throw DataError(DataErrorCode::BadMagic, labels.string(), 0, "expected IDX label magic 0x00000801");
  }
  const std::uint32_t count = be32(img, 4, images, "header");
  const std::uint32_t rows = be32(img, 8, images, "header");
  const std::uint32_t cols = be32(img, 12, images, "header");
  const std::uint32_t label_count = be32(lab, 4, labels, "header");
  if (rows == 0 || cols == 0) throw DataError(DataErrorCode::BadHeader, images.string(), 8, "zero image dimension");
  if (count != label_count) {
    throw DataError(DataErrorCode::CountMismatch, labels.string(), 4,
                    std::to_string(label_count) + " labels for " + std::to_string(count) + " images");
  }
  const std::size_t dim = std::size_t{rows} * cols;
  const std::size_t img_expected = 16 + std::size_t{count} * dim;
  const std::size_t lab_expected = 8 + std::size_t{count};
  if (img.size() < img_expected) {
    throw DataError(DataErrorCode::Truncated, images.string(), img.size(),
                    "expected " + std::to_string(img_expected) + " bytes");
  }
  if (lab.size() < lab_expected) {
    throw DataError(DataErrorCode::Truncated, labels.string(), lab.size(),
                    "expected " + std::to_string(lab_expected) + " bytes");
  }

  std::vector<std::uint8_t> label_bytes(lab.begin() + 8, lab.begin() + static_cast<std::ptrdiff_t>(lab_expected));
  for (std::size_t i = 0; i < label_bytes.size(); ++i) {
    if (label_bytes[i] >= 10) {
      throw DataError(DataErrorCode::BadLabel, labels.string(), 8 + i,
                      "label " + std::to_string(label_bytes[i]) + " is not a class in 0..9");
    }
  }
  std::vector<std::uint8_t> pixels(img.begin() + 16, img.begin() + static_cast<std::ptrdiff_t>(img_expected));
  return Dataset::from_bytes(name, dim, 10, std::move(pixels), std::move(label_bytes));
}

Dataset load_cifar10(const std::vector<std::filesystem::path>& batches, const std::string& name) {
  if (batches.empty()) throw ConfigError("load_cifar10: no batch files given");
  constexpr std::size_t dim = kCifarRecordBytes - 1;
  std::vector<std::uint8_t> pixels;
  std::vector<std::uint8_t> labels;
  for (const auto& path : batches) {
    const auto bytes = read_file(path);
    if (bytes.empty() || bytes.size() % kCifarRecordBytes != 0) {
      throw DataError(DataErrorCode::BadRecordLength, path.string(), bytes.size() - bytes.size() % kCifarRecordBytes,
                      "file length " + std::to_string(bytes.size()) + " is not a positive multiple of 3073");
    }
    for (std::size_t off = 0; off < bytes.size(); off += kCifarRecordBytes) {
      if (bytes[off] >= 10) {
        throw DataError(DataErrorCode::BadLabel, path.string(), off,
                        "label " + std::to_string(bytes[off]) + " is not a class in 0..9");
      }
      labels.push_back(bytes[off]);
      pixels.insert(pixels.end(), bytes.begin() + static_cast<std::ptrdiff_t>(off + 1),
                    bytes.begin() + static_cast<std::ptrdiff_t>(off + kCifarRecordBytes));
    }
  }
  return Dataset::from_bytes(name, dim, 10, std::move(pixels), std::move(labels));
}

std::pair<Dataset, Dataset> split_train_test(const Dataset& data, std::size_t train_size, std::size_t test_size) {
  if (train_size == 0) throw ConfigError("split_train_test: training split would be empty");
  if (train_size > data.size() || test_size > data.size() - train_size) {
    throw ConfigError("split_train_test: " + std::to_string(train_size) + " + " + std::to_string(test_size) +
                      " exceeds dataset of " + std::to_string(data.size()));
  }
  return {data.slice(0, train_size), data.slice(train_size, test_size)};
}

}  // namespace gradprop
