// gradprop: train, evaluate and check target-propagation networks.
//
// Exit codes: 0 ok, 1 verification failure, 2 config or data error,
// 3 numeric divergence.

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "gradprop/analysis.hpp"
#include "gradprop/driver.hpp"
#include "gradprop/error.hpp"
#include "gradprop/kernels.hpp"
#include "gradprop/learning.hpp"
#include "gradprop/netinit.hpp"
#include "gradprop/network.hpp"
#include "gradprop/run_config.hpp"

using namespace gradprop;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitConfig = 2;
constexpr int kExitDiverged = 3;

// Flags that map one-to-one onto config keys. Empty means "not given".
struct TrainFlags {
  std::string config;
  std::vector<std::pair<std::string, std::string>> overrides;
};

void add_key_flag(CLI::App* cmd, TrainFlags& flags, const std::string& flag, const std::string& key,
                  const std::string& help) {
  cmd->add_option_function<std::string>(
      flag, [&flags, key](const std::string& v) { flags.overrides.emplace_back(key, v); }, help);
}

RunConfig build_config(const TrainFlags& flags) {
  RunConfig cfg;
  if (!flags.config.empty()) cfg.apply(read_config_file(flags.config));
  cfg.apply(flags.overrides);
  cfg.finalize();
  return cfg;
}

int cmd_train(const TrainFlags& flags) {
  const RunConfig cfg = build_config(flags);
  const RunData data = load_run_data(cfg.dataset, cfg.data_dir, cfg.train_size, cfg.test_size, cfg.limit_train);
  std::printf("%s %s  updater=%s tau=%g steps=%zu eta=%g epochs=%zu seed=%llu  train=%zu test=%zu  kernels=%s\n",
              std::string(to_string(cfg.dataset)).c_str(), format_architecture(cfg.arch).c_str(),
              std::string(to_string(cfg.train.updater)).c_str(), cfg.solver.tau, cfg.solver.steps, cfg.train.eta,
              cfg.train.epochs, static_cast<unsigned long long>(cfg.train.seed), data.train.size(), data.test.size(),
              std::string(kernels::name(kernels::active().isa)).c_str());
  std::fflush(stdout);
  const RunResult result = run_training(cfg, data, [](const EpochRecord& r) {
    std::printf("epoch %3zu  train %.4f  test %.4f  cost %.5f  %.1fs\n", r.epoch, r.train_accuracy, r.test_accuracy,
                r.mean_output_cost, r.seconds);
    std::fflush(stdout);
  });
  std::printf("final test accuracy %.2f%%\n", 100.0 * result.metrics.final_test_accuracy());
  return kExitOk;
}

struct EvalFlags {
  std::string checkpoint;
  std::string dataset = "mnist";
  std::string data_dir;
  std::string split = "test";
  std::size_t limit = 0;
  std::size_t train_size = 50000;
  std::size_t workers = 1;
};

int cmd_eval(const EvalFlags& f) {
  const Network net = load_checkpoint(f.checkpoint);
  const DatasetKind kind = parse_dataset(f.dataset);
  const auto dir = f.data_dir.empty() ? default_data_dir() : std::filesystem::path(f.data_dir);
  if (f.workers == 0) throw ConfigError("--eval-workers must be at least 1");
  if (f.split != "train" && f.split != "test") throw ConfigError("--split must be train or test");
  Dataset split;
  if (f.split == "train") {
    split = load_run_data(kind, dir, f.train_size, 0).train;
  } else {
    split = load_dataset_files(kind, dir).test;
  }
  if (f.limit != 0 && f.limit < split.size()) split = split.slice(0, f.limit);
  if (split.empty()) throw ConfigError("the " + f.split + " split is empty");
  if (net.input_size() != split.feature_dim() || net.output_size() != split.num_classes()) {
    throw ConfigError("checkpoint " + format_architecture(net.layer_sizes()) + " does not fit " + split.name() + " (" +
                      std::to_string(split.feature_dim()) + " features, " + std::to_string(split.num_classes()) +
                      " classes)");
  }
  const std::size_t correct = count_correct(net, split, f.workers);
  std::printf("accuracy = %zu/%zu = %.4f\n", correct, split.size(),
              static_cast<double>(correct) / static_cast<double>(split.size()));
  return kExitOk;
}

struct VerifyFlags {
  std::uint64_t seed = 1;
  std::size_t cases = 100;
  std::size_t grad_cases = 50;
  bool mutate = false;
  bool verbose = false;
};

int cmd_verify(const VerifyFlags& f) {
  SuiteOptions opt;
  opt.seed = f.seed;
  opt.decomposition_cases = f.cases;
  opt.gradient_cases = f.grad_cases;
  opt.mutate_hebbian_sign = f.mutate;
  const SuiteReport r = run_verification_suite(opt);

  auto table = [&](const char* title, const char* metric, const std::vector<SuiteCase>& cases, double worst) {
    std::size_t failed = 0;
    for (const auto& c : cases) failed += c.passed ? 0 : 1;
    std::printf("%-14s %4zu cases  %4zu failed  worst %s %.3e\n", title, cases.size(), failed, metric, worst);
    for (const auto& c : cases) {
      if (!f.verbose && c.passed) continue;
      std::printf("  seed %-8llu %-22s %-10s %.3e  %s\n", static_cast<unsigned long long>(c.seed),
                  c.architecture.c_str(), c.relu_first ? "relu-first" : "sigmoid", c.value, c.passed ? "ok" : "FAIL");
    }
  };
  table("decomposition", "max|diff|", r.decomposition, r.worst_decomposition);
  table("gradients", "rel.err", r.gradients, r.worst_gradient);
  if (!r.passed) {
    std::printf("FAILED (replay one case with --seed <seed> --cases 1 --grad-cases 1)\n");
    return kExitVerifyFailed;
  }
  std::printf("all checks passed\n");
  return kExitOk;
}

struct InitFlags {
  std::string arch;
  std::uint64_t seed = 0;
  std::size_t samples = 1000000;
};

int cmd_inspect_init(const InitFlags& f) {
  const auto sizes = parse_architecture(f.arch);
  const auto variances = init_variances(sizes);
  Rng rng(f.seed);
  std::printf("%-6s %-8s %-14s %-14s %-14s %-12s\n", "layer", "fan-in", "formula", "theory", "empirical", "rel.dev");
  for (std::size_t l = 1; l < sizes.size(); ++l) {
    const std::size_t n = sizes[l - 1];
    const double v = variances[l - 1];
    const Vector draws = sample_normal(rng, 0.0, v, f.samples);
    double mean = 0.0;
    for (double w : draws) mean += w;
    mean /= static_cast<double>(draws.size());
    double var = 0.0;
    for (double w : draws) var += (w - mean) * (w - mean);
    var /= static_cast<double>(draws.size() - 1);
    const std::string formula = l == 1 ? "48/(35*" + std::to_string(n) + ")" : "16/(11*" + std::to_string(n) + ")";
    std::printf("%-6zu %-8zu %-14s %-14.8g %-14.8g %+.3f%%\n", l, n, formula.c_str(), v, var, 100.0 * (var / v - 1.0));
  }
  const auto m = sigmoid_uncertainty_moments();
  std::printf("sigmoid output under uncertainty: mean %g  variance %g\n", m.mean, m.variance);
  const auto u = uniform_input_moments();
  std::printf("uniform [0,1] input: mean %g  variance %g\n", u.mean, u.variance);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Target propagation trainer"};
  app.require_subcommand(1);

  TrainFlags train_flags;
  auto* train = app.add_subcommand("train", "train a network and write metrics and checkpoints");
  train->add_option("--config", train_flags.config, "key = value config file (flags override it)");
  add_key_flag(train, train_flags, "--dataset", "dataset", "mnist, fashion or cifar10");
  add_key_flag(train, train_flags, "--data-dir", "data_dir", "dataset root (default $GRADPROP_DATA_DIR or ./data)");
  add_key_flag(train, train_flags, "--arch", "arch", "layer sizes, e.g. 784-100-10");
  add_key_flag(train, train_flags, "--activations", "activations", "sigmoid, relu-first or a comma list");
  add_key_flag(train, train_flags, "--tau", "tau", "Euler step size of the target solve");
  add_key_flag(train, train_flags, "--steps", "steps", "Euler steps per target solve");
  add_key_flag(train, train_flags, "--readout", "readout", "endpoint or displacement");
  add_key_flag(train, train_flags, "--clip-targets", "clip_targets", "clip sigmoid targets to [0,1]");
  add_key_flag(train, train_flags, "--eta", "eta", "learning rate");
  add_key_flag(train, train_flags, "--epochs", "epochs", "epoch count or auto");
  add_key_flag(train, train_flags, "--seed", "seed", "random seed for init and shuffling");
  add_key_flag(train, train_flags, "--updater", "updater", "targetprop or backprop");
  add_key_flag(train, train_flags, "--shuffle", "shuffle", "shuffle every epoch (default true)");
  add_key_flag(train, train_flags, "--train-size", "train_size", "examples taken from the training file");
  add_key_flag(train, train_flags, "--test-size", "test_size", "examples taken from the test file");
  add_key_flag(train, train_flags, "--limit-train", "limit_train", "truncate the training split further");
  add_key_flag(train, train_flags, "--metrics", "metrics", "JSON-lines metrics output");
  add_key_flag(train, train_flags, "--checkpoint", "checkpoint", "checkpoint output, rewritten every epoch");
  add_key_flag(train, train_flags, "--eval-workers", "eval_workers", "threads for test evaluation");

  EvalFlags eval_flags;
  auto* eval = app.add_subcommand("eval", "score a checkpoint");
  eval->add_option("--checkpoint", eval_flags.checkpoint, "checkpoint to load")->required();
  eval->add_option("--dataset", eval_flags.dataset, "mnist, fashion or cifar10");
  eval->add_option("--data-dir", eval_flags.data_dir, "dataset root");
  eval->add_option("--split", eval_flags.split, "train or test");
  eval->add_option("--limit", eval_flags.limit, "score only the first N examples");
  eval->add_option("--train-size", eval_flags.train_size, "size of the training split (--split train)");
  eval->add_option("--eval-workers", eval_flags.workers, "read-only scoring threads");

  VerifyFlags verify_flags;
  auto* verify = app.add_subcommand("verify", "check the update algebra and gradients on random nets");
  verify->add_option("--seed", verify_flags.seed, "first case seed");
  verify->add_option("--cases", verify_flags.cases, "decomposition cases");
  verify->add_option("--grad-cases", verify_flags.grad_cases, "finite-difference cases");
  verify->add_flag("--mutate-hebbian-sign", verify_flags.mutate, "flip the activity term (should fail)");
  verify->add_flag("-v,--verbose", verify_flags.verbose, "print every case");

  InitFlags init_flags;
  auto* inspect = app.add_subcommand("inspect-init", "print initialization variances");
  inspect->add_option("--arch", init_flags.arch, "layer sizes, e.g. 784-100-10")->required();
  inspect->add_option("--seed", init_flags.seed, "sampling seed");
  inspect->add_option("--samples", init_flags.samples, "draws per layer")->check(CLI::Range(2, 100000000));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*train) return cmd_train(train_flags);
    if (*eval) return cmd_eval(eval_flags);
    if (*verify) return cmd_verify(verify_flags);
    if (*inspect) return cmd_inspect_init(init_flags);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const DataError& e) {
    std::fprintf(stderr, "data error [%s]: %s\n", to_string(e.code()), e.what());
    return kExitConfig;
  } catch (const DivergenceError& e) {
    std::fprintf(stderr, "diverged: %s\n", e.what());
    return kExitDiverged;
  }
  return kExitOk;
}
