#include "gradprop/driver.hpp"

#include <filesystem>
#include <optional>
#include <system_error>

#include "gradprop/error.hpp"
#include "gradprop/learning.hpp"
#include "gradprop/netinit.hpp"

namespace gradprop {

namespace {

void check_shapes(const RunConfig& cfg, const RunData& data) {
  if (cfg.arch.front() != data.train.feature_dim()) {
    throw ConfigError("arch input size " + std::to_string(cfg.arch.front()) + " does not match the " +
                      std::to_string(data.train.feature_dim()) + " features of " + data.train.name());
  }
  if (cfg.arch.back() != data.train.num_classes()) {
    throw ConfigError("arch output size " + std::to_string(cfg.arch.back()) + " does not match the " +
                      std::to_string(data.train.num_classes()) + " classes of " + data.train.name());
  }
}

void make_parent(const std::filesystem::path& p) {
  if (p.empty() || p.parent_path().empty()) return;
  std::error_code ec;
  std::filesystem::create_directories(p.parent_path(), ec);
  if (ec) throw ConfigError("cannot create directory " + p.parent_path().string() + ": " + ec.message());
}

}  // namespace

RunResult run_training(const RunConfig& cfg, const RunData& data, const EpochCallback& on_epoch) {
  check_shapes(cfg, data);
  Rng rng(cfg.train.seed);
  Network net = initialize_network(cfg.arch, parse_activations(cfg.activations, cfg.arch.size() - 1), rng);
  return run_training(cfg, data, std::move(net), rng, on_epoch);
}

RunResult run_training(const RunConfig& cfg, const RunData& data, Network net, Rng& rng,
                       const EpochCallback& on_epoch) {
  check_shapes(cfg, data);
  make_parent(cfg.metrics);
  make_parent(cfg.checkpoint);
  std::optional<MetricsWriter> writer;
  if (!cfg.metrics.empty()) writer.emplace(cfg.metrics);

  RunMetrics metrics;
  for (std::size_t e = 1; e <= cfg.train.epochs; ++e) {
    EpochStats stats;
    try {
      stats = train_epoch(net, data.train, cfg.solver, cfg.train, rng);
    } catch (const DivergenceError& err) {
      throw DivergenceError(err.layer(), err.step(), "epoch " + std::to_string(e) + ": " + err.what());
    }
    EpochRecord rec;
    rec.epoch = e;
    rec.train_accuracy = stats.train_accuracy;
    rec.test_accuracy = data.test.empty() ? 0.0 : evaluate_accuracy(net, data.test, cfg.eval_workers);
    rec.mean_output_cost = stats.mean_output_cost;
    rec.mean_layer_costs = stats.mean_layer_costs;
    rec.seconds = stats.seconds;
    metrics.epochs.push_back(rec);
    if (writer) writer->append(rec);
    if (!cfg.checkpoint.empty()) save_checkpoint(net, cfg.checkpoint);
    if (on_epoch) on_epoch(rec);
  }
  if (writer) {
    RunSummary s;
    s.network = format_architecture(cfg.arch);
    s.score = metrics.final_test_accuracy();
    s.tau = cfg.train.updater == Updater::TargetProp ? cfg.solver.tau : 0.0;
    s.eta = cfg.train.eta;
    s.epochs = cfg.train.epochs;
    s.seed = cfg.train.seed;
    s.updater = std::string(to_string(cfg.train.updater));
    writer->write_summary(s);
  }
  return RunResult{std::move(net), std::move(metrics)};
}

}  // namespace gradprop
