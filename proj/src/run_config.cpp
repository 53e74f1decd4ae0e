#include "gradprop/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <istream>

#include "gradprop/error.hpp"
#include "gradprop/network.hpp"

namespace gradprop {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_unsigned(const std::string& key, const std::string& value) {
  T out{};
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (value.empty() || ec != std::errc() || ptr != value.data() + value.size()) {
    throw ConfigError("'" + key + "' expects a non-negative integer, got '" + value + "'");
  }
  return out;
}

double parse_real(const std::string& key, const std::string& value) {
  char* end = nullptr;
  const double v = std::strtod(value.c_str(), &end);
  if (value.empty() || end != value.c_str() + value.size()) {
    throw ConfigError("'" + key + "' expects a number, got '" + value + "'");
  }
  return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1" || value == "yes") return true;
  if (value == "false" || value == "0" || value == "no") return false;
  throw ConfigError("'" + key + "' expects true or false, got '" + value + "'");
}

// "tau.2" -> ("tau", 2)
std::optional<std::pair<std::string, std::size_t>> split_layer_key(const std::string& key) {
  const auto dot = key.find('.');
  if (dot == std::string::npos) return std::nullopt;
  const std::string base = key.substr(0, dot);
  const std::size_t layer = parse_unsigned<std::size_t>(key, key.substr(dot + 1));
  if (layer == 0) throw ConfigError("'" + key + "': layers are numbered from 1");
  return std::make_pair(base, layer);
}

}  // namespace

std::string_view to_string(DatasetKind kind) {
  switch (kind) {
    case DatasetKind::Mnist: return "mnist";
    case DatasetKind::Fashion: return "fashion";
    case DatasetKind::Cifar10: return "cifar10";
  }
  return "unknown";
}

DatasetKind parse_dataset(std::string_view name) {
  if (name == "mnist") return DatasetKind::Mnist;
  if (name == "fashion") return DatasetKind::Fashion;
  if (name == "cifar10") return DatasetKind::Cifar10;
  throw ConfigError("unknown dataset '" + std::string(name) + "' (expected mnist, fashion or cifar10)");
}

KeyValues parse_key_values(std::istream& in, const std::string& source) {
  KeyValues out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(source + ":" + std::to_string(line_no) + ": expected 'key = value'");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(source + ":" + std::to_string(line_no) + ": empty key");
    out.emplace_back(std::move(key), std::move(value));
  }
  return out;
}

KeyValues read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  return parse_key_values(in, path.string());
}

void RunConfig::apply(const std::string& key, const std::string& value) {
  if (auto layered = split_layer_key(key)) {
    const auto& [base, layer] = *layered;
    if (base == "tau") {
      solver.tau_by_layer[layer] = parse_real(key, value);
    } else if (base == "steps") {
      solver.steps_by_layer[layer] = parse_unsigned<std::size_t>(key, value);
    } else if (base == "eta") {
      train.eta_by_layer[layer] = parse_real(key, value);
    } else {
      throw ConfigError("unknown per-layer key '" + key + "'");
    }
  } else if (key == "dataset") {
    dataset = parse_dataset(value);
  } else if (key == "data_dir") {
    data_dir = value;
  } else if (key == "arch") {
    arch = parse_architecture(value);
  } else if (key == "activations") {
    activations = value;
  } else if (key == "tau") {
    solver.tau = parse_real(key, value);
  } else if (key == "steps") {
    solver.steps = parse_unsigned<std::size_t>(key, value);
  } else if (key == "readout") {
    solver.readout = parse_readout(value);
  } else if (key == "clip_targets") {
    solver.clip_targets = parse_bool(key, value);
  } else if (key == "eta") {
    train.eta = parse_real(key, value);
  } else if (key == "epochs") {
    epochs_auto = value == "auto";
    if (!epochs_auto) {
      train.epochs = parse_unsigned<std::size_t>(key, value);
      if (train.epochs == 0) throw ConfigError("epochs must be at least 1");
    }
  } else if (key == "seed") {
    train.seed = parse_unsigned<std::uint64_t>(key, value);
  } else if (key == "updater") {
    train.updater = parse_updater(value);
  } else if (key == "shuffle") {
    train.shuffle = parse_bool(key, value);
  } else if (key == "train_size") {
    train_size = parse_unsigned<std::size_t>(key, value);
  } else if (key == "test_size") {
    test_size = parse_unsigned<std::size_t>(key, value);
  } else if (key == "limit_train") {
    limit_train = parse_unsigned<std::size_t>(key, value);
  } else if (key == "metrics") {
    metrics = value;
  } else if (key == "checkpoint") {
    checkpoint = value;
  } else if (key == "eval_workers") {
    eval_workers = parse_unsigned<std::size_t>(key, value);
    if (eval_workers == 0) throw ConfigError("eval_workers must be at least 1");
  } else {
    throw ConfigError("unknown config key '" + key + "'");
  }
  explicit_keys[key] = true;
}

void RunConfig::apply(const KeyValues& kvs) {
  for (const auto& [k, v] : kvs) apply(k, v);
}

std::size_t default_epochs(const std::vector<std::size_t>& arch) {
  const std::size_t hidden = arch.size() >= 2 ? arch.size() - 2 : 0;
  return hidden <= 2 ? 30 : 60;
}

void RunConfig::finalize() {
  std::vector<std::string> missing;
  for (const char* key : {"arch", "eta", "epochs", "seed"}) {
    if (!has(key)) missing.emplace_back(key);
  }
  if (train.updater == Updater::TargetProp && !has("tau")) missing.emplace_back("tau");
  if (!missing.empty()) {
    std::string list;
    for (const auto& m : missing) list += (list.empty() ? "" : ", ") + m;
    throw ConfigError("missing required setting(s): " + list);
  }
  if (epochs_auto) train.epochs = default_epochs(arch);
  train.validate();
  if (train.updater == Updater::TargetProp) solver.validate();
  parse_activations(activations, arch.size() - 1);
  for (const auto& [layer, _] : solver.tau_by_layer) {
    if (layer >= arch.size() - 1) throw ConfigError("tau." + std::to_string(layer) + " names a layer without a target solve");
  }
  for (const auto& [layer, _] : train.eta_by_layer) {
    if (layer > arch.size() - 1) throw ConfigError("eta." + std::to_string(layer) + " names a non-existent layer");
  }
  if (data_dir.empty()) data_dir = default_data_dir();
}

std::filesystem::path default_data_dir() {
  const char* env = std::getenv("GRADPROP_DATA_DIR");
  return (env && *env) ? std::filesystem::path(env) : std::filesystem::path("data");
}

RunData load_dataset_files(DatasetKind kind, const std::filesystem::path& data_dir) {
  RunData out;
  if (kind == DatasetKind::Cifar10) {
    const auto dir = data_dir / "cifar-10-batches-bin";
    std::vector<std::filesystem::path> batches;
    for (int i = 1; i <= 5; ++i) batches.push_back(dir / ("data_batch_" + std::to_string(i) + ".bin"));
    out.train = load_cifar10(batches, "cifar10");
    out.test = load_cifar10({dir / "test_batch.bin"}, "cifar10");
  } else {
    const auto dir = data_dir / (kind == DatasetKind::Mnist ? "mnist" : "fashion");
    const std::string name(to_string(kind));
    out.train = load_idx(dir / "train-images-idx3-ubyte", dir / "train-labels-idx1-ubyte", name);
    out.test = load_idx(dir / "t10k-images-idx3-ubyte", dir / "t10k-labels-idx1-ubyte", name);
  }
  return out;
}

RunData load_run_data(DatasetKind kind, const std::filesystem::path& data_dir, std::size_t train_size,
                      std::size_t test_size, std::size_t limit_train) {
  const RunData files = load_dataset_files(kind, data_dir);
  if (limit_train != 0) train_size = std::min(train_size, limit_train);
  RunData out;
  out.train = split_train_test(files.train, train_size, 0).first;
  if (test_size > files.test.size()) {
    throw ConfigError("test_size " + std::to_string(test_size) + " exceeds the " + std::to_string(files.test.size()) +
                      " available test examples");
  }
  out.test = files.test.slice(0, test_size);
  return out;
}

}  // namespace gradprop
