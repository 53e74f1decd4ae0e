#pragma once

// Gradient target propagation.
//
// The output target is the one-hot label. Walking down from the output, the
// target of layer l-1 comes from integrating the gradient flow
//
//   dy_{l-1}/dt = -dC_l/dy_{l-1},   C_l = sum_i 1/2 (yhat_l[i] - y_l[i])^2
//
// with explicit Euler steps of size tau, recomputing y_l from the current
// iterate at every step while yhat_l stays frozen. Each layer then moves its
// weights down its own local cost: dW_l = eta (yhat_l - y_l) * f'(z_l) y_{l-1}^T.
// All deltas are computed against the pre-update weights and applied together
// once the backward sweep is done.

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gradprop/mathcore.hpp"
#include "gradprop/network.hpp"

namespace gradprop {

class Dataset;

/// What the Euler integration hands back as the target.
enum class TargetReadout {
  /// yhat = y^T, the state after T steps starting from y^0 = y.
  Endpoint,
  /// yhat = y^T - y^0, the accumulated flow alone. With T = 1 this is
  /// yhat = -tau dC/dy, the single-step form under which a weight change splits
  /// into a backprop term and Hebbian terms.
  Displacement,
};

std::string_view to_string(TargetReadout readout);
TargetReadout parse_readout(std::string_view name);

struct TargetSolverConfig {
  double tau = 1.0;
  std::size_t steps = 1;
  TargetReadout readout = TargetReadout::Endpoint;
  /// Clamp hidden sigmoid targets into [0, 1]. Off by default.
  bool clip_targets = false;
  /// Overrides keyed by the layer whose target is being solved.
  std::map<std::size_t, double> tau_by_layer;
  std::map<std::size_t, std::size_t> steps_by_layer;

  double tau_for(std::size_t layer) const;
  std::size_t steps_for(std::size_t layer) const;
  void validate() const;
};

enum class Updater { TargetProp, Backprop };

std::string_view to_string(Updater updater);
Updater parse_updater(std::string_view name);

struct TrainConfig {
  double eta = 0.0;
  std::map<std::size_t, double> eta_by_layer;
  std::size_t epochs = 1;
  std::uint64_t seed = 0;
  Updater updater = Updater::TargetProp;
  bool shuffle = true;

  double eta_for(std::size_t layer) const;
  void validate() const;
};

/// Targets for layers 1..L; at(L) is the one-hot label.
struct LayerTargets {
  std::vector<Vector> y_hat;

  const Vector& at(std::size_t layer) const { return y_hat.at(layer - 1); }
};

/// Per-layer weight change for one example. With one example per update every
/// change is rank one: dW_l = post_l pre_l^T, with the learning rate folded
/// into post_l.
struct WeightDeltas {
  std::vector<Vector> post;  // index l - 1, length N_l
  std::vector<Vector> pre;   // index l - 1, length N_{l-1}

  std::size_t num_layers() const noexcept { return post.size(); }
  Matrix matrix(std::size_t layer) const;
  bool is_zero() const;
};

/// W_l += dW_l for every layer.
void apply_deltas(Network& net, const WeightDeltas& deltas);

struct StepResult {
  WeightDeltas deltas;
  LayerTargets targets;
  /// C_l for l = 1..L (index l - 1), measured against the solved targets.
  std::vector<double> local_costs;
};

/// sum_i 1/2 (y_hat[i] - y[i])^2
double local_cost(const Vector& y_hat, const Vector& y);

/// dC/dy_below for C = local_cost(y_hat_above, f(W_above y_below)).
Vector target_cost_gradient(const Vector& y_below, const Matrix& w_above, ActivationKind kind_above,
                            const Vector& y_hat_above);

/// Target for the layer below `w_above` after `steps` Euler steps of size tau.
/// `layer` is the index of the layer being solved, used in diagnostics.
/// Throws DivergenceError naming layer and step on a non-finite iterate.
Vector solve_target(const Vector& y_below, const Matrix& w_above, ActivationKind kind_above, const Vector& y_hat_above,
                    double tau, std::size_t steps, TargetReadout readout, std::size_t layer = 0);

/// Every Euler iterate y^0..y^T of the same integration.
std::vector<Vector> target_trajectory(const Vector& y_below, const Matrix& w_above, ActivationKind kind_above,
                                      const Vector& y_hat_above, double tau, std::size_t steps, std::size_t layer = 0);

StepResult targetprop_step(const Network& net, const ForwardTrace& trace, const Vector& label_onehot,
                           const TargetSolverConfig& solver, const TrainConfig& train);
StepResult targetprop_step(const Network& net, const Vector& x, const Vector& label_onehot,
                           const TargetSolverConfig& solver, const TrainConfig& train);

/// -eta dC_L/dW_l for every layer by the chain rule.
WeightDeltas backprop_step(const Network& net, const ForwardTrace& trace, const Vector& label_onehot,
                           const TrainConfig& train);
WeightDeltas backprop_step(const Network& net, const Vector& x, const Vector& label_onehot, const TrainConfig& train);

struct EpochStats {
  std::size_t examples = 0;
  /// Fraction of examples classified correctly before their own update.
  double train_accuracy = 0.0;
  double mean_output_cost = 0.0;
  /// Mean C_l per layer. Backprop has no hidden targets, so it reports the
  /// output layer only.
  std::vector<double> mean_layer_costs;
  double seconds = 0.0;
};

/// One pass over `data`, updating after every example. Shuffles with `rng`
/// when train.shuffle is set. Throws DivergenceError if the weights go
/// non-finite.
EpochStats train_epoch(Network& net, const Dataset& data, const TargetSolverConfig& solver, const TrainConfig& train,
                       Rng& rng);

/// Fraction of `data` classified correctly. Splits the examples across up to
/// `workers` read-only threads; the count is reduced in example order.
double evaluate_accuracy(const Network& net, const Dataset& data, std::size_t workers = 1);

/// Number of examples of `data` classified correctly, same splitting.
std::size_t count_correct(const Network& net, const Dataset& data, std::size_t workers = 1);

}  // namespace gradprop
