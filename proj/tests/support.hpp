#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

namespace testsupport {

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("gradprop-" + tag + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

inline void put_be32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

inline std::vector<std::uint8_t> idx_images(std::uint32_t count, std::uint32_t rows, std::uint32_t cols,
                                            const std::vector<std::uint8_t>& pixels) {
  std::vector<std::uint8_t> out;
  put_be32(out, 0x803);
  put_be32(out, count);
  put_be32(out, rows);
  put_be32(out, cols);
  out.insert(out.end(), pixels.begin(), pixels.end());
  return out;
}

inline std::vector<std::uint8_t> idx_labels(const std::vector<std::uint8_t>& labels) {
  std::vector<std::uint8_t> out;
  put_be32(out, 0x801);
  put_be32(out, static_cast<std::uint32_t>(labels.size()));
  out.insert(out.end(), labels.begin(), labels.end());
  return out;
}

inline void write_file(const std::filesystem::path& p, const std::vector<std::uint8_t>& bytes) {
  std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
}

inline std::vector<std::uint8_t> read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Four 2x3 images with labels 3, 0, 9, 5. Pixel k of image i is
// (i * 60 + k * 9) mod 256, except image 1, which is all zero, and image 2,
// whose first pixel is 255.
inline std::vector<std::uint8_t> idx_fixture_pixels() {
  std::vector<std::uint8_t> px;
  for (std::uint32_t i = 0; i < 4; ++i) {
    for (std::uint32_t k = 0; k < 6; ++k) {
      std::uint8_t v = static_cast<std::uint8_t>((i * 60 + k * 9) % 256);
      if (i == 1) v = 0;
      if (i == 2 && k == 0) v = 255;
      px.push_back(v);
    }
  }
  return px;
}

inline const std::vector<std::uint8_t> kIdxFixtureLabels{3, 0, 9, 5};

inline void write_idx_fixture(const std::filesystem::path& images, const std::filesystem::path& labels) {
  write_file(images, idx_images(4, 2, 3, idx_fixture_pixels()));
  write_file(labels, idx_labels(kIdxFixtureLabels));
}

// Two CIFAR-10 records: label 9 with pixel k = k mod 256, then label 2 with
// pixel k = 255 - (k mod 256).
inline std::vector<std::uint8_t> cifar_fixture() {
  std::vector<std::uint8_t> out;
  out.push_back(9);
  for (std::size_t k = 0; k < 3072; ++k) out.push_back(static_cast<std::uint8_t>(k % 256));
  out.push_back(2);
  for (std::size_t k = 0; k < 3072; ++k) out.push_back(static_cast<std::uint8_t>(255 - k % 256));
  return out;
}

}  // namespace testsupport
