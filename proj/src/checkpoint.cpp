#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "gradprop/error.hpp"
#include "gradprop/network.hpp"

namespace gradprop {

namespace {

constexpr std::array<char, 8> kMagic{'G', 'T', 'P', 'N', 'E', 'T', '1', '\0'};
// Guards against absurd allocations from a corrupt header.
constexpr std::uint64_t kMaxLayers = 1024;
constexpr std::uint64_t kMaxLayerSize = 1u << 24;

void put_u64(std::ostream& out, std::uint64_t v) {
  std::array<char, 8> b{};
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xffu);
  out.write(b.data(), b.size());
}

class Reader {
 public:
  Reader(std::istream& in, std::string name) : in_(in), name_(std::move(name)) {}

  void read(char* dst, std::size_t n, const char* what) {
    in_.read(dst, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) {
      throw DataError(DataErrorCode::Truncated, name_, offset_ + static_cast<std::uint64_t>(in_.gcount()),
                      std::string("file ends inside ") + what);
    }
    offset_ += n;
  }

  std::uint64_t u64(const char* what) {
    std::array<unsigned char, 8> b{};
    read(reinterpret_cast<char*>(b.data()), b.size(), what);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
    return v;
  }

  std::uint64_t offset() const { return offset_; }
  const std::string& name() const { return name_; }
  std::istream& stream() { return in_; }

 private:
  std::istream& in_;
  std::string name_;
  std::uint64_t offset_ = 0;
};

}  // namespace

void write_checkpoint(const Network& net, std::ostream& out) {
  out.write(kMagic.data(), kMagic.size());
  put_u64(out, net.layer_sizes().size());
  for (auto s : net.layer_sizes()) put_u64(out, s);
  for (auto kind : net.activations()) out.put(static_cast<char>(kind));
  for (const auto& w : net.all_weights()) {
    for (double v : w.span()) put_u64(out, std::bit_cast<std::uint64_t>(v));
  }
}

Network read_checkpoint(std::istream& in, const std::string& source_name) {
  Reader r(in, source_name);
  std::array<char, 8> magic{};
  r.read(magic.data(), magic.size(), "magic");
  if (magic != kMagic) throw DataError(DataErrorCode::BadMagic, source_name, 0, "not a GTPNET1 checkpoint");

  const std::uint64_t count_offset = r.offset();
  const std::uint64_t count = r.u64("layer count");
  if (count < 2 || count > kMaxLayers) {
    throw DataError(DataErrorCode::BadHeader, source_name, count_offset,
                    "layer count " + std::to_string(count) + " out of range");
  }
  std::vector<std::size_t> sizes;
  for (std::uint64_t i = 0; i < count; ++i) {
    const std::uint64_t at = r.offset();
    const std::uint64_t s = r.u64("layer sizes");
    if (s == 0 || s > kMaxLayerSize) {
      throw DataError(DataErrorCode::BadHeader, source_name, at, "layer size " + std::to_string(s) + " out of range");
    }
    sizes.push_back(static_cast<std::size_t>(s));
  }
  std::vector<ActivationKind> kinds;
  for (std::uint64_t i = 0; i + 1 < count; ++i) {
    const std::uint64_t at = r.offset();
    char tag = 0;
    r.read(&tag, 1, "activation tags");
    if (tag != 0 && tag != 1) {
      throw DataError(DataErrorCode::BadHeader, source_name, at, "unknown activation tag " + std::to_string(tag));
    }
    kinds.push_back(static_cast<ActivationKind>(tag));
  }
  std::vector<Matrix> weights;
  for (std::size_t k = 0; k + 1 < sizes.size(); ++k) {
    const std::size_t n = sizes[k + 1] * sizes[k];
    std::vector<double> data(n);
    for (auto& v : data) v = std::bit_cast<double>(r.u64("weights"));
    weights.emplace_back(sizes[k + 1], sizes[k], std::move(data));
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw DataError(DataErrorCode::BadHeader, source_name, r.offset(), "trailing bytes after last weight matrix");
  }
  try {
    return Network(std::move(sizes), std::move(weights), std::move(kinds));
  } catch (const ConfigError& e) {
    throw DataError(DataErrorCode::BadHeader, source_name, r.offset(), e.what());
  }
}

void save_checkpoint(const Network& net, const std::filesystem::path& path) {
  namespace fs = std::filesystem;
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write checkpoint " + tmp.string());
    write_checkpoint(net, out);
    out.flush();
    if (!out) throw ConfigError("failed writing checkpoint " + tmp.string());
  }
  std::error_code ec;
  if (fs::exists(path, ec)) {
    fs::path prev = path;
    prev += ".prev";
    fs::rename(path, prev);
  }
  fs::rename(tmp, path);
}

Network load_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(DataErrorCode::FileOpen, path.string(), 0, "cannot open checkpoint");
  return read_checkpoint(in, path.string());
}

}  // namespace gradprop
