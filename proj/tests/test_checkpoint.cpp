#include <doctest.h>

#include <sstream>

#include "gradprop/error.hpp"
#include "gradprop/netinit.hpp"
#include "gradprop/network.hpp"
#include "support.hpp"

using namespace gradprop;

namespace {

Network sample_net() {
  Rng rng(21);
  return initialize_network({5, 4, 3}, parse_activations("relu-first", 2), rng);
}

std::string bytes_of(const Network& net) {
  std::ostringstream out;
  write_checkpoint(net, out);
  return out.str();
}

DataErrorCode code_of(const std::string& bytes) {
  std::istringstream in(bytes);
  try {
    read_checkpoint(in);
  } catch (const DataError& e) {
    return e.code();
  }
  FAIL("checkpoint was accepted");
  return DataErrorCode::FileOpen;
}

}  // namespace

TEST_CASE("round trip is exact") {
  const Network net = sample_net();
  std::istringstream in(bytes_of(net));
  CHECK(read_checkpoint(in) == net);
}

TEST_CASE("layout: magic, sizes, tags, little-endian doubles") {
  const Network net({1, 1}, {Matrix(1, 1, 1.0)}, {ActivationKind::ReLU});
  const std::string b = bytes_of(net);
  REQUIRE(b.size() == 8 + 8 + 2 * 8 + 1 + 8);
  CHECK(b.substr(0, 8) == std::string("GTPNET1\0", 8));
  CHECK(b[8] == 2);
  CHECK(b[16] == 1);
  CHECK(b[24] == 1);
  CHECK(b[32] == 1);  // relu tag
  // 1.0 = 0x3FF0000000000000
  CHECK(static_cast<unsigned char>(b[39]) == 0xF0);
  CHECK(static_cast<unsigned char>(b[40]) == 0x3F);
}

TEST_CASE("corrupt checkpoints are rejected with codes") {
  const std::string good = bytes_of(sample_net());
  std::string bad_magic = good;
  bad_magic[0] = 'X';
  CHECK(code_of(bad_magic) == DataErrorCode::BadMagic);
  CHECK(code_of(good.substr(0, good.size() - 3)) == DataErrorCode::Truncated);
  CHECK(code_of(good.substr(0, 5)) == DataErrorCode::Truncated);
  CHECK(code_of(good + "x") == DataErrorCode::BadHeader);
  std::string bad_tag = good;
  bad_tag[8 + 8 + 3 * 8] = 7;
  CHECK(code_of(bad_tag) == DataErrorCode::BadHeader);
  std::string bad_count = good;
  bad_count[8] = 1;
  CHECK(code_of(bad_count) == DataErrorCode::BadHeader);
}

TEST_CASE("save keeps the previous checkpoint") {
  testsupport::TempDir dir("ckpt");
  const auto path = dir / "net.ckpt";
  const Network first = sample_net();
  save_checkpoint(first, path);
  CHECK(load_checkpoint(path) == first);

  Network second = first;
  second.weights(1)(0, 0) += 1.0;
  save_checkpoint(second, path);
  CHECK(load_checkpoint(path) == second);
  auto prev = path;
  prev += ".prev";
  CHECK(load_checkpoint(prev) == first);
  auto tmp = path;
  tmp += ".tmp";
  CHECK_FALSE(std::filesystem::exists(tmp));
}

TEST_CASE("missing file") {
  try {
    load_checkpoint("/nonexistent/dir/net.ckpt");
    FAIL("expected DataError");
  } catch (const DataError& e) {
    CHECK(e.code() == DataErrorCode::FileOpen);
  }
}
