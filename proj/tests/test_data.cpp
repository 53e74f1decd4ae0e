#include <doctest.h>

#include "gradprop/data.hpp"
#include "gradprop/error.hpp"
#include "support.hpp"

using namespace gradprop;
using namespace testsupport;

namespace {

DataError expect_data_error(auto&& fn) {
  try {
    fn();
  } catch (const DataError& e) {
    return e;
  }
  FAIL("expected a DataError");
  return DataError(DataErrorCode::FileOpen, "", 0, "");
}

}  // namespace

TEST_CASE("IDX fixture parses to the exact bytes") {
  TempDir dir("idx");
  write_idx_fixture(dir / "img", dir / "lab");
  const Dataset d = load_idx(dir / "img", dir / "lab", "fixture");
  REQUIRE(d.size() == 4);
  CHECK(d.feature_dim() == 6);
  CHECK(d.num_classes() == 10);
  CHECK(d.name() == "fixture");
  CHECK(d.byte_backed());
  const auto px = idx_fixture_pixels();
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(d.label(i) == kIdxFixtureLabels[i]);
    const auto raw = d.raw_bytes(i);
    const Vector f = d.features(i);
    for (std::size_t k = 0; k < 6; ++k) {
      CHECK(raw[k] == px[i * 6 + k]);
      CHECK(f[k] == px[i * 6 + k] / 255.0);
      CHECK(f[k] >= 0.0);
      CHECK(f[k] <= 1.0);
    }
  }
  CHECK(d.features(1) == Vector(6, 0.0));
  CHECK(d.features(2)[0] == 1.0);
  CHECK(d.features(0)[1] == 9.0 / 255.0);
}

TEST_CASE("IDX loading is deterministic") {
  TempDir dir("idx2");
  write_idx_fixture(dir / "img", dir / "lab");
  CHECK(load_idx(dir / "img", dir / "lab") == load_idx(dir / "img", dir / "lab"));
}

TEST_CASE("malformed IDX files") {
  TempDir dir("idxbad");
  const auto good_img = idx_images(4, 2, 3, idx_fixture_pixels());
  const auto good_lab = idx_labels(kIdxFixtureLabels);

  SUBCASE("bad image magic") {
    auto img = good_img;
    img[3] = 0x04;
    write_file(dir / "img", img);
    write_file(dir / "lab", good_lab);
    const auto e = expect_data_error([&] { load_idx(dir / "img", dir / "lab"); });
    CHECK(e.code() == DataErrorCode::BadMagic);
    CHECK(e.offset() == 0);
    CHECK(std::string(to_string(e.code())) == "bad-magic");
  }
  SUBCASE("bad label magic") {
    auto lab = good_lab;
    lab[2] = 0x09;
    write_file(dir / "img", good_img);
    write_file(dir / "lab", lab);
    CHECK(expect_data_error([&] { load_idx(dir / "img", dir / "lab"); }).code() == DataErrorCode::BadMagic);
  }
  SUBCASE("truncated pixels") {
    write_file(dir / "img", std::vector<std::uint8_t>(good_img.begin(), good_img.end() - 1));
    write_file(dir / "lab", good_lab);
    const auto e = expect_data_error([&] { load_idx(dir / "img", dir / "lab"); });
    CHECK(e.code() == DataErrorCode::Truncated);
    CHECK(e.offset() == good_img.size() - 1);
    CHECK(std::string(to_string(e.code())) == "truncated");
  }
  SUBCASE("truncated header") {
    write_file(dir / "img", std::vector<std::uint8_t>(good_img.begin(), good_img.begin() + 10));
    write_file(dir / "lab", good_lab);
    CHECK(expect_data_error([&] { load_idx(dir / "img", dir / "lab"); }).code() == DataErrorCode::Truncated);
  }
  SUBCASE("truncated labels") {
    write_file(dir / "img", good_img);
    write_file(dir / "lab", std::vector<std::uint8_t>(good_lab.begin(), good_lab.end() - 2));
    CHECK(expect_data_error([&] { load_idx(dir / "img", dir / "lab"); }).code() == DataErrorCode::Truncated);
  }
  SUBCASE("count mismatch") {
    write_file(dir / "img", good_img);
    write_file(dir / "lab", idx_labels({1, 2, 3}));
    CHECK(expect_data_error([&] { load_idx(dir / "img", dir / "lab"); }).code() == DataErrorCode::CountMismatch);
  }
  SUBCASE("label out of range") {
    write_file(dir / "img", good_img);
    write_file(dir / "lab", idx_labels({1, 2, 10, 3}));
    const auto e = expect_data_error([&] { load_idx(dir / "img", dir / "lab"); });
    CHECK(e.code() == DataErrorCode::BadLabel);
    CHECK(e.offset() == 10);
  }
  SUBCASE("missing file") {
    write_file(dir / "lab", good_lab);
    CHECK(expect_data_error([&] { load_idx(dir / "nope", dir / "lab"); }).code() == DataErrorCode::FileOpen);
  }
}

TEST_CASE("CIFAR-10 fixture parses to the exact bytes") {
  TempDir dir("cifar");
  write_file(dir / "batch.bin", cifar_fixture());
  const Dataset d = load_cifar10({dir / "batch.bin"});
  REQUIRE(d.size() == 2);
  CHECK(d.feature_dim() == 3072);
  CHECK(d.num_classes() == 10);
  CHECK(d.label(0) == 9);
  CHECK(d.label(1) == 2);
  for (std::size_t k = 0; k < 3072; k += 97) {
    CHECK(d.raw_bytes(0)[k] == k % 256);
    CHECK(d.raw_bytes(1)[k] == 255 - k % 256);
  }
  CHECK(d.features(0)[255] == 1.0);
  CHECK(d.features(1)[255] == 0.0);

  // Several batches concatenate in order.
  write_file(dir / "b2.bin", cifar_fixture());
  CHECK(load_cifar10({dir / "batch.bin", dir / "b2.bin"}).size() == 4);
}

TEST_CASE("malformed CIFAR-10 batches") {
  TempDir dir("cifarbad");
  auto bytes = cifar_fixture();
  SUBCASE("partial record") {
    bytes.pop_back();
    write_file(dir / "b.bin", bytes);
    const auto e = expect_data_error([&] { load_cifar10({dir / "b.bin"}); });
    CHECK(e.code() == DataErrorCode::BadRecordLength);
    CHECK(e.offset() == kCifarRecordBytes);
  }
  SUBCASE("empty file") {
    write_file(dir / "b.bin", {});
    CHECK(expect_data_error([&] { load_cifar10({dir / "b.bin"}); }).code() == DataErrorCode::BadRecordLength);
  }
  SUBCASE("bad label") {
    bytes[kCifarRecordBytes] = 12;
    write_file(dir / "b.bin", bytes);
    const auto e = expect_data_error([&] { load_cifar10({dir / "b.bin"}); });
    CHECK(e.code() == DataErrorCode::BadLabel);
    CHECK(e.offset() == kCifarRecordBytes);
  }
}

TEST_CASE("one_hot") {
  const Vector first = one_hot(0, 10);
  CHECK(first[0] == 1.0);
  double sum = 0;
  for (double v : first) sum += v;
  CHECK(sum == 1.0);
  CHECK(one_hot(9, 10)[9] == 1.0);
  CHECK(one_hot(9, 10)[0] == 0.0);
  CHECK_THROWS_AS(one_hot(10, 10), ConfigError);
}

TEST_CASE("split_train_test") {
  std::vector<std::uint8_t> px(10 * 2);
  std::vector<std::uint8_t> labels(10);
  for (std::size_t i = 0; i < 10; ++i) {
    labels[i] = static_cast<std::uint8_t>(i % 3);
    px[2 * i] = static_cast<std::uint8_t>(i);
  }
  const Dataset d = Dataset::from_bytes("d", 2, 3, px, labels);
  const auto [train, test] = split_train_test(d, 7, 3);
  CHECK(train.size() == 7);
  CHECK(test.size() == 3);
  CHECK(test.raw_bytes(0)[0] == 7);
  CHECK(split_train_test(d, 7, 3).first == train);
  CHECK_THROWS_AS(split_train_test(d, 0, 5), ConfigError);
  CHECK_THROWS_AS(split_train_test(d, 8, 3), ConfigError);
  CHECK_THROWS_AS(d.slice(9, 2), ConfigError);
}

TEST_CASE("dataset construction checks") {
  CHECK_THROWS_AS(Dataset::from_bytes("d", 2, 3, {1, 2, 3}, {0}), ConfigError);
  CHECK_THROWS_AS(Dataset::from_bytes("d", 1, 3, {1}, {3}), ConfigError);
  CHECK_THROWS_AS(Dataset::from_dense("d", 1, 2, {1.5}, {0}), ConfigError);
  const Dataset dense = Dataset::from_dense("d", 2, 2, {0.25, 0.5}, {1});
  CHECK_FALSE(dense.byte_backed());
  CHECK(dense.features(0) == Vector{0.25, 0.5});
  CHECK_THROWS_AS(dense.raw_bytes(0), ConfigError);
}
