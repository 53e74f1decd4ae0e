#include "gradprop/learning.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <thread>

#include "gradprop/data.hpp"
#include "gradprop/error.hpp"
#include "gradprop/kernels.hpp"

namespace gradprop {

std::string_view to_string(TargetReadout readout) {
  return readout == TargetReadout::Displacement ? "displacement" : "endpoint";
}

TargetReadout parse_readout(std::string_view name) {
  if (name == "endpoint") return TargetReadout::Endpoint;
  if (name == "displacement") return TargetReadout::Displacement;
  throw ConfigError("unknown target readout '" + std::string(name) + "' (expected endpoint or displacement)");
}

std::string_view to_string(Updater updater) { return updater == Updater::Backprop ? "backprop" : "targetprop"; }

Updater parse_updater(std::string_view name) {
  if (name == "targetprop") return Updater::TargetProp;
  if (name == "backprop") return Updater::Backprop;
  throw ConfigError("unknown updater '" + std::string(name) + "' (expected targetprop or backprop)");
}

double TargetSolverConfig::tau_for(std::size_t layer) const {
  const auto it = tau_by_layer.find(layer);
  return it == tau_by_layer.end() ? tau : it->second;
}

std::size_t TargetSolverConfig::steps_for(std::size_t layer) const {
  const auto it = steps_by_layer.find(layer);
  return it == steps_by_layer.end() ? steps : it->second;
}

void TargetSolverConfig::validate() const {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw ConfigError("tau must be positive and finite");
  if (steps < 1) throw ConfigError("steps must be at least 1");
  for (const auto& [layer, t] : tau_by_layer) {
    if (!(t > 0.0) || !std::isfinite(t)) throw ConfigError("tau override for layer " + std::to_string(layer) + " must be positive");
  }
  for (const auto& [layer, s] : steps_by_layer) {
    if (s < 1) throw ConfigError("steps override for layer " + std::to_string(layer) + " must be at least 1");
  }
}

double TrainConfig::eta_for(std::size_t layer) const {
  const auto it = eta_by_layer.find(layer);
  return it == eta_by_layer.end() ? eta : it->second;
}

void TrainConfig::validate() const {
  // eta = 0 is accepted so a run can be frozen for evaluation experiments.
  if (!(eta >= 0.0) || !std::isfinite(eta)) throw ConfigError("eta must be finite and non-negative");
  if (epochs < 1) throw ConfigError("epochs must be at least 1");
  for (const auto& [layer, e] : eta_by_layer) {
    if (!(e >= 0.0) || !std::isfinite(e)) throw ConfigError("eta override for layer " + std::to_string(layer) + " is invalid");
  }
}

Matrix WeightDeltas::matrix(std::size_t layer) const {
  const Vector& u = post.at(layer - 1);
  const Vector& v = pre.at(layer - 1);
  Matrix m(u.size(), v.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    for (std::size_t j = 0; j < v.size(); ++j) m(i, j) = u[i] * v[j];
  }
  return m;
}

bool WeightDeltas::is_zero() const {
  for (std::size_t k = 0; k < post.size(); ++k) {
    const bool post_zero = std::all_of(post[k].begin(), post[k].end(), [](double v) { return v == 0.0; });
    const bool pre_zero = std::all_of(pre[k].begin(), pre[k].end(), [](double v) { return v == 0.0; });
    if (!post_zero && !pre_zero) return false;
  }
  return true;
}

void apply_deltas(Network& net, const WeightDeltas& deltas) {
  if (deltas.num_layers() != net.num_layers()) throw ConfigError("delta layer count does not match network");
  const auto& k = kernels::active();
  for (std::size_t l = 1; l <= net.num_layers(); ++l) {
    Matrix& w = net.weights(l);
    const Vector& u = deltas.post[l - 1];
    const Vector& v = deltas.pre[l - 1];
    if (u.size() != w.rows() || v.size() != w.cols()) throw ConfigError("delta shape does not match weights");
    k.ger(w.data(), w.rows(), w.cols(), 1.0, u.data(), v.data());
  }
}

double local_cost(const Vector& y_hat, const Vector& y) {
  if (y_hat.size() != y.size()) throw ConfigError("local_cost: target and activation lengths differ");
  double c = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double d = y_hat[i] - y[i];
    c += 0.5 * d * d;
  }
  return c;
}

namespace {

// (y_hat - y) * f'(z): minus the cost gradient with respect to z.
Vector output_error(ActivationKind kind, const Vector& z, const Vector& y, const Vector& y_hat) {
  Vector e(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) e[i] = (y_hat[i] - y[i]) * activate_deriv(kind, z[i], y[i]);
  return e;
}

// -dC/dy_below at the given iterate, i.e. W^T [(y_hat - y) * f'(z)].
Vector descent_direction(const Vector& y_below, const Matrix& w_above, ActivationKind kind_above,
                         const Vector& y_hat_above) {
  const Vector z = matvec(w_above, y_below);
  const Vector y = activate(kind_above, z);
  return matvec_transposed(w_above, output_error(kind_above, z, y, y_hat_above));
}

void check_solver_shapes(const Vector& y_below, const Matrix& w_above, const Vector& y_hat_above) {
  if (w_above.cols() != y_below.size() || w_above.rows() != y_hat_above.size()) {
    throw ConfigError("solve_target: weight shape " + std::to_string(w_above.rows()) + "x" +
                      std::to_string(w_above.cols()) + " does not match activation/target lengths");
  }
}

}  // namespace

Vector target_cost_gradient(const Vector& y_below, const Matrix& w_above, ActivationKind kind_above,
                            const Vector& y_hat_above) {
  check_solver_shapes(y_below, w_above, y_hat_above);
  Vector g = descent_direction(y_below, w_above, kind_above, y_hat_above);
  for (auto& v : g) v = -v;
  return g;
}

Vector solve_target(const Vector& y_below, const Matrix& w_above, ActivationKind kind_above, const Vector& y_hat_above,
                    double tau, std::size_t steps, TargetReadout readout, std::size_t layer) {
  check_solver_shapes(y_below, w_above, y_hat_above);
  if (!(tau > 0.0)) throw ConfigError("solve_target: tau must be positive");
  if (steps < 1) throw ConfigError("solve_target: steps must be at least 1");
  const auto& k = kernels::active();
  Vector state = y_below;
  Vector moved(y_below.size());
  for (std::size_t t = 1; t <= steps; ++t) {
    const Vector dir = descent_direction(state, w_above, kind_above, y_hat_above);
    k.axpy(tau, dir.data(), state.data(), state.size());
    k.axpy(tau, dir.data(), moved.data(), moved.size());
    if (!all_finite(state.span())) {
      throw DivergenceError(layer, t, "non-finite target iterate; tau = " + std::to_string(tau) + " is too large");
    }
  }
  return readout == TargetReadout::Displacement ? moved : state;
}

std::vector<Vector> target_trajectory(const Vector& y_below, const Matrix& w_above, ActivationKind kind_above,
                                      const Vector& y_hat_above, double tau, std::size_t steps, std::size_t layer) {
  check_solver_shapes(y_below, w_above, y_hat_above);
  const auto& k = kernels::active();
  std::vector<Vector> path{y_below};
  for (std::size_t t = 1; t <= steps; ++t) {
    Vector next = path.back();
    const Vector dir = descent_direction(next, w_above, kind_above, y_hat_above);
    k.axpy(tau, dir.data(), next.data(), next.size());
    if (!all_finite(next.span())) throw DivergenceError(layer, t, "non-finite target iterate");
    path.push_back(std::move(next));
  }
  return path;
}

StepResult targetprop_step(const Network& net, const ForwardTrace& trace, const Vector& label_onehot,
                           const TargetSolverConfig& solver, const TrainConfig& train) {
  const std::size_t L = net.num_layers();
  if (label_onehot.size() != net.output_size()) throw ConfigError("label length does not match output layer");
  if (trace.num_layers() != L) throw ConfigError("trace does not belong to this network");

  StepResult r;
  r.targets.y_hat.resize(L);
  r.deltas.post.resize(L);
  r.deltas.pre.resize(L);
  r.local_costs.resize(L);
  r.targets.y_hat[L - 1] = label_onehot;

  for (std::size_t l = L; l >= 1; --l) {
    const Vector& y_hat = r.targets.y_hat[l - 1];
    r.local_costs[l - 1] = local_cost(y_hat, trace.y(l));
    if (l > 1) {
      Vector below = solve_target(trace.y(l - 1), net.weights(l), net.activation(l), y_hat, solver.tau_for(l - 1),
                                  solver.steps_for(l - 1), solver.readout, l - 1);
      if (solver.clip_targets && net.activation(l - 1) == ActivationKind::Sigmoid) {
        for (auto& v : below) v = std::clamp(v, 0.0, 1.0);
      }
      r.targets.y_hat[l - 2] = std::move(below);
    }
    Vector post = output_error(net.activation(l), trace.z(l), trace.y(l), y_hat);
    const double eta = train.eta_for(l);
    for (auto& v : post) v *= eta;
    r.deltas.post[l - 1] = std::move(post);
    r.deltas.pre[l - 1] = trace.y(l - 1);
  }
  return r;
}

StepResult targetprop_step(const Network& net, const Vector& x, const Vector& label_onehot,
                           const TargetSolverConfig& solver, const TrainConfig& train) {
  return targetprop_step(net, forward(net, x), label_onehot, solver, train);
}

WeightDeltas backprop_step(const Network& net, const ForwardTrace& trace, const Vector& label_onehot,
                           const TrainConfig& train) {
  const std::size_t L = net.num_layers();
  if (label_onehot.size() != net.output_size()) throw ConfigError("label length does not match output layer");
  WeightDeltas d;
  d.post.resize(L);
  d.pre.resize(L);
  // delta_l = -dC_L/dz_l
  Vector delta = output_error(net.activation(L), trace.z(L), trace.output(), label_onehot);
  for (std::size_t l = L; l >= 1; --l) {
    Vector post = delta;
    const double eta = train.eta_for(l);
    for (auto& v : post) v *= eta;
    d.post[l - 1] = std::move(post);
    d.pre[l - 1] = trace.y(l - 1);
    if (l > 1) {
      Vector back = matvec_transposed(net.weights(l), delta);
      for (std::size_t i = 0; i < back.size(); ++i) {
        back[i] *= activate_deriv(net.activation(l - 1), trace.z(l - 1)[i], trace.y(l - 1)[i]);
      }
      delta = std::move(back);
    }
  }
  return d;
}

WeightDeltas backprop_step(const Network& net, const Vector& x, const Vector& label_onehot, const TrainConfig& train) {
  return backprop_step(net, forward(net, x), label_onehot, train);
}

EpochStats train_epoch(Network& net, const Dataset& data, const TargetSolverConfig& solver, const TrainConfig& train,
                       Rng& rng) {
  if (data.empty()) throw ConfigError("training set is empty");
  if (data.feature_dim() != net.input_size() || data.num_classes() != net.output_size()) {
    throw ConfigError("dataset shape " + std::to_string(data.feature_dim()) + " -> " +
                      std::to_string(data.num_classes()) + " does not match network " +
                      format_architecture(net.layer_sizes()));
  }
  train.validate();
  if (train.updater == Updater::TargetProp) solver.validate();

  const auto start = std::chrono::steady_clock::now();
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (train.shuffle) std::shuffle(order.begin(), order.end(), rng.engine());

  const std::size_t L = net.num_layers();
  const bool targetprop = train.updater == Updater::TargetProp;
  std::vector<double> cost_sums(targetprop ? L : 1, 0.0);
  std::size_t correct = 0;
  Vector x(data.feature_dim());

  for (std::size_t n = 0; n < order.size(); ++n) {
    const std::size_t idx = order[n];
    data.copy_features(idx, x.span());
    const Vector label = one_hot(data.label(idx), data.num_classes());
    const ForwardTrace trace = forward(net, x);
    if (argmax(trace.output()) == data.label(idx)) ++correct;

    WeightDeltas deltas;
    try {
      if (targetprop) {
        StepResult step = targetprop_step(net, trace, label, solver, train);
        for (std::size_t l = 0; l < L; ++l) cost_sums[l] += step.local_costs[l];
        deltas = std::move(step.deltas);
      } else {
        cost_sums[0] += local_cost(label, trace.output());
        deltas = backprop_step(net, trace, label, train);
      }
    } catch (const DivergenceError& e) {
      throw DivergenceError(e.layer(), e.step(), "example " + std::to_string(idx) + ": " + e.what());
    }
    for (std::size_t l = 1; l <= L; ++l) {
      if (!all_finite(deltas.post[l - 1].span()) || !all_finite(trace.y(l).span())) {
        throw DivergenceError(l, 0, "example " + std::to_string(idx) + ": non-finite weight update");
      }
    }
    apply_deltas(net, deltas);
  }
  for (std::size_t l = 1; l <= L; ++l) {
    if (!all_finite(net.weights(l).span())) throw DivergenceError(l, 0, "non-finite weights after epoch");
  }

  EpochStats s;
  s.examples = data.size();
  s.train_accuracy = static_cast<double>(correct) / static_cast<double>(data.size());
  for (double c : cost_sums) s.mean_layer_costs.push_back(c / static_cast<double>(data.size()));
  s.mean_output_cost = s.mean_layer_costs.back();
  s.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return s;
}

std::size_t count_correct(const Network& net, const Dataset& data, std::size_t workers) {
  if (data.empty()) throw ConfigError("evaluation split is empty");
  if (data.feature_dim() != net.input_size() || data.num_classes() != net.output_size()) {
    throw ConfigError("dataset shape does not match network " + format_architecture(net.layer_sizes()));
  }
  kernels::active();  // resolve the dispatch table before fanning out
  workers = std::clamp<std::size_t>(workers, 1, data.size());
  std::vector<std::size_t> counts(workers, 0);
  auto score = [&](std::size_t w) {
    const std::size_t begin = data.size() * w / workers;
    const std::size_t end = data.size() * (w + 1) / workers;
    Vector x(data.feature_dim());
    for (std::size_t i = begin; i < end; ++i) {
      data.copy_features(i, x.span());
      if (predict_class(net, x) == data.label(i)) ++counts[w];
    }
  };
  if (workers == 1) {
    score(0);
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(score, w);
  }
  return std::accumulate(counts.begin(), counts.end(), std::size_t{0});
}

double evaluate_accuracy(const Network& net, const Dataset& data, std::size_t workers) {
  const std::size_t correct = count_correct(net, data, workers);
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

}  // namespace gradprop
