#include <doctest.h>

#include "gradprop/driver.hpp"
#include "gradprop/error.hpp"
#include "gradprop/netinit.hpp"
#include "support.hpp"

using namespace gradprop;

namespace {

RunData toy(std::uint64_t seed) {
  Rng rng(seed);
  auto make = [&](std::size_t n) {
    std::vector<std::uint8_t> px(n * 8), labels(n);
    for (std::size_t i = 0; i < n; ++i) {
      labels[i] = static_cast<std::uint8_t>(rng.index(4));
      for (std::size_t j = 0; j < 8; ++j) {
        px[i * 8 + j] = static_cast<std::uint8_t>(j % 4 == labels[i] ? 200 + rng.index(56) : rng.index(80));
      }
    }
    return Dataset::from_bytes("toy", 8, 4, std::move(px), std::move(labels));
  };
  RunData d;
  d.train = make(200);
  d.test = make(100);
  return d;
}

RunConfig config(const std::filesystem::path& dir) {
  RunConfig cfg;
  for (const auto& [k, v] : KeyValues{{"arch", "8-6-4"}, {"tau", "20"}, {"eta", "0.05"}, {"epochs", "3"}, {"seed", "5"}}) {
    cfg.apply(k, v);
  }
  cfg.metrics = dir / "run.jsonl";
  cfg.checkpoint = dir / "net.ckpt";
  cfg.finalize();
  return cfg;
}

}  // namespace

TEST_CASE("run writes one record and one checkpoint per epoch") {
  testsupport::TempDir dir("driver");
  const RunConfig cfg = config(dir.path());
  std::size_t calls = 0;
  const RunResult r = run_training(cfg, toy(1), [&](const EpochRecord& rec) { CHECK(rec.epoch == ++calls); });
  CHECK(calls == 3);
  REQUIRE(r.metrics.epochs.size() == 3);
  const auto records = read_metrics_file(cfg.metrics);
  REQUIRE(records.size() == 3);
  for (std::size_t e = 0; e < 3; ++e) {
    CHECK(records[e].epoch == e + 1);
    CHECK(records[e].test_accuracy >= 0.0);
    CHECK(records[e].test_accuracy <= 1.0);
    CHECK(records[e].mean_layer_costs.size() == 2);
  }
  CHECK(load_checkpoint(cfg.checkpoint) == r.net);
  auto prev = cfg.checkpoint;
  prev += ".prev";
  CHECK(std::filesystem::exists(prev));
  CHECK(std::filesystem::exists(summary_path_for(cfg.metrics)));
  CHECK(r.metrics.final_test_accuracy() > 0.5);
}

TEST_CASE("identical seeds give identical bytes") {
  testsupport::TempDir a("det-a"), b("det-b");
  const RunData data = toy(2);
  run_training(config(a.path()), data);
  run_training(config(b.path()), data);
  CHECK(testsupport::read_file(a / "run.jsonl") == testsupport::read_file(b / "run.jsonl"));
  CHECK(testsupport::read_file(a / "net.ckpt") == testsupport::read_file(b / "net.ckpt"));
  CHECK(testsupport::read_file(a / "run.csv") == testsupport::read_file(b / "run.csv"));
}

TEST_CASE("targetprop and backprop start from the same weights") {
  RunConfig tp;
  for (const auto& [k, v] : KeyValues{{"arch", "8-6-4"}, {"tau", "1"}, {"eta", "0"}, {"epochs", "1"}, {"seed", "5"}}) {
    tp.apply(k, v);
  }
  tp.finalize();
  RunConfig bp = tp;
  bp.train.updater = Updater::Backprop;
  const RunData data = toy(3);
  // eta = 0 freezes both runs at their initial weights.
  CHECK(run_training(tp, data).net == run_training(bp, data).net);
  Rng rng(5);
  CHECK(run_training(tp, data).net == initialize_network({8, 6, 4}, parse_activations("sigmoid", 2), rng));
}

TEST_CASE("shape mismatches are config errors") {
  testsupport::TempDir dir("driver-bad");
  RunConfig cfg = config(dir.path());
  cfg.arch = {9, 6, 4};
  CHECK_THROWS_AS(run_training(cfg, toy(1)), ConfigError);
  cfg.arch = {8, 6, 3};
  CHECK_THROWS_AS(run_training(cfg, toy(1)), ConfigError);
}

TEST_CASE("divergence reports the epoch") {
  RunConfig cfg;
  for (const auto& [k, v] : KeyValues{{"arch", "8-6-4"}, {"tau", "1e300"}, {"eta", "1e300"}, {"epochs", "2"}, {"seed", "1"}}) {
    cfg.apply(k, v);
  }
  cfg.finalize();
  try {
    run_training(cfg, toy(1));
    FAIL("expected divergence");
  } catch (const DivergenceError& e) {
    CHECK(std::string(e.what()).find("epoch 1") != std::string::npos);
    CHECK(std::string(e.what()).find("example") != std::string::npos);
  }
}
