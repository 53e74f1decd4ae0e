#include <doctest.h>

#include <fstream>

#include "gradprop/error.hpp"
#include "gradprop/metrics.hpp"
#include "support.hpp"

using namespace gradprop;

namespace {

EpochRecord sample(std::size_t epoch) {
  EpochRecord r;
  r.epoch = epoch;
  r.train_accuracy = 0.1 * static_cast<double>(epoch);
  r.test_accuracy = 0.123456789012345;
  r.mean_output_cost = 1.0 / 3.0;
  r.mean_layer_costs = {0.25, 1.0 / 3.0};
  r.seconds = 12.5;
  return r;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("json line round trip is lossless and time-free") {
  const EpochRecord r = sample(3);
  const std::string line = to_json_line(r);
  CHECK(line.find("seconds") == std::string::npos);
  CHECK(line.rfind("{\"epoch\":3,", 0) == 0);
  EpochRecord back = parse_json_line(line);
  CHECK(back.seconds == 0.0);
  back.seconds = r.seconds;
  CHECK(back == r);
  CHECK_THROWS_AS(parse_json_line("{\"epoch\": 1}"), ConfigError);
  CHECK_THROWS_AS(parse_json_line("not json"), ConfigError);
}

TEST_CASE("writer produces metrics, timing and summary files") {
  testsupport::TempDir dir("metrics");
  const auto path = dir / "run.jsonl";
  {
    MetricsWriter w(path);
    w.append(sample(1));
    w.append(sample(2));
    RunSummary s;
    s.network = "784-100-10";
    s.score = 0.9721;
    s.tau = 400;
    s.eta = 0.01;
    s.epochs = 2;
    s.seed = 7;
    s.updater = "targetprop";
    w.write_summary(s);
  }
  const auto records = read_metrics_file(path);
  REQUIRE(records.size() == 2);
  CHECK(records[0].epoch == 1);
  CHECK(records[1].epoch == 2);

  CHECK(summary_path_for(path) == dir / "run.csv");
  CHECK(slurp(summary_path_for(path)) ==
        "network,score,tau,eta,epochs,seed,updater\n784-100-10,97.21%,400.0,0.01,2,7,targetprop\n");

  CHECK(timing_path_for(path) == dir / "run.jsonl.timing.jsonl");
  CHECK(slurp(timing_path_for(path)) == "{\"epoch\":1,\"seconds\":12.5}\n{\"epoch\":2,\"seconds\":12.5}\n");
}

TEST_CASE("writer truncates an earlier run") {
  testsupport::TempDir dir("metrics2");
  const auto path = dir / "run.jsonl";
  {
    MetricsWriter w(path);
    w.append(sample(1));
    w.append(sample(2));
  }
  {
    MetricsWriter w(path);
    w.append(sample(1));
  }
  CHECK(read_metrics_file(path).size() == 1);
}

TEST_CASE("run totals") {
  RunMetrics m;
  CHECK(m.final_test_accuracy() == 0.0);
  m.epochs = {sample(1), sample(2)};
  CHECK(m.total_seconds() == 25.0);
  CHECK(m.final_test_accuracy() == sample(2).test_accuracy);
}
