#pragma once

// Run configuration for the command-line driver.
//
// Config files are flat "key = value" lines; '#' starts a comment. Command
// line flags are applied on top and win. Keys:
//
//   dataset        mnist | fashion | cifar10
//   data_dir       directory holding mnist/, fashion/ or cifar-10-batches-bin/
//   arch           layer sizes, e.g. 784-100-10
//   activations    sigmoid | relu-first | comma list (default sigmoid)
//   tau, steps     Euler step size and count (steps defaults to 1)
//   tau.<l>, steps.<l>, eta.<l>   per-layer overrides
//   readout        endpoint | displacement (default endpoint)
//   clip_targets   true | false (default false)
//   eta            learning rate
//   epochs         positive count, or "auto" for 30 (<= 2 hidden layers) / 60
//   seed           64-bit integer
//   updater        targetprop | backprop (default targetprop)
//   shuffle        true | false (default true)
//   train_size     training examples taken from the training file (default 50000)
//   test_size      test examples (default 10000)
//   limit_train    further truncate the training split (0 = off)
//   metrics        JSON-lines metrics path
//   checkpoint     checkpoint path
//   eval_workers   read-only evaluation threads (default 1)
//
// tau (for targetprop), eta, epochs and seed never default.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gradprop/data.hpp"
#include "gradprop/learning.hpp"

namespace gradprop {

enum class DatasetKind { Mnist, Fashion, Cifar10 };

std::string_view to_string(DatasetKind kind);
DatasetKind parse_dataset(std::string_view name);

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Parses "key = value" lines. Throws ConfigError with the line number on
/// malformed input.
KeyValues parse_key_values(std::istream& in, const std::string& source = "<config>");
KeyValues read_config_file(const std::filesystem::path& path);

struct RunConfig {
  DatasetKind dataset = DatasetKind::Mnist;
  std::filesystem::path data_dir;
  std::vector<std::size_t> arch;
  std::string activations = "sigmoid";
  TargetSolverConfig solver;
  TrainConfig train;
  bool epochs_auto = false;
  std::size_t train_size = 50000;
  std::size_t test_size = 10000;
  std::size_t limit_train = 0;
  std::filesystem::path metrics;
  std::filesystem::path checkpoint;
  std::size_t eval_workers = 1;

  /// Keys that were given explicitly.
  std::map<std::string, bool> explicit_keys;

  void apply(const std::string& key, const std::string& value);
  void apply(const KeyValues& kvs);

  /// Checks required keys, resolves epochs = auto, validates ranges.
  void finalize();

  bool has(const std::string& key) const { return explicit_keys.count(key) != 0; }
};

/// 30 epochs for up to two hidden layers, 60 beyond.
std::size_t default_epochs(const std::vector<std::size_t>& arch);

/// Default dataset root: $GRADPROP_DATA_DIR, else "data".
std::filesystem::path default_data_dir();

struct RunData {
  Dataset train;
  Dataset test;
};

/// Both files of a dataset, untruncated.
RunData load_dataset_files(DatasetKind kind, const std::filesystem::path& data_dir);

/// Loads the dataset named by the config: training file truncated to
/// train_size (then limit_train), test file truncated to test_size.
RunData load_run_data(DatasetKind kind, const std::filesystem::path& data_dir, std::size_t train_size,
                      std::size_t test_size, std::size_t limit_train = 0);

}  // namespace gradprop
