#pragma once

// Training loop shared by the CLI and the acceptance checks: initialise from
// the seed, run the epochs, evaluate, write metrics and checkpoints.

#include <functional>
#include <string>

#include "gradprop/metrics.hpp"
#include "gradprop/network.hpp"
#include "gradprop/run_config.hpp"

namespace gradprop {

struct RunResult {
  Network net;
  RunMetrics metrics;
};

using EpochCallback = std::function<void(const EpochRecord&)>;

/// Initialises a network from cfg.train.seed and trains it on data.train.
/// After every epoch the test accuracy is measured and, when the paths are
/// set, a metrics line is appended and the checkpoint is replaced. The init
/// draw and the shuffle order both come from one Rng(seed), so targetprop and
/// backprop runs with the same seed start from the same weights.
RunResult run_training(const RunConfig& cfg, const RunData& data, const EpochCallback& on_epoch = {});

/// Same, starting from an existing network.
RunResult run_training(const RunConfig& cfg, const RunData& data, Network net, Rng& rng,
                       const EpochCallback& on_epoch = {});

}  // namespace gradprop
