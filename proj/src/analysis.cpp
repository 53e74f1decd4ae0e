#include "gradprop/analysis.hpp"

#include <algorithm>
#include <cmath>

#include "gradprop/data.hpp"
#include "gradprop/error.hpp"
#include "gradprop/netinit.hpp"

namespace gradprop {

namespace {

void check_layer(const Network& net, std::size_t layer) {
  if (layer < 1 || layer > net.num_layers()) {
    throw ConfigError("layer " + std::to_string(layer) + " outside 1.." + std::to_string(net.num_layers()));
  }
}

// Adjoint at layer m-1 from the adjoint at layer m: W_m^T (adj * f'(z_m)).
Vector pull_back(const Network& net, const ForwardTrace& tr, std::size_t m, const Vector& adj) {
  const Matrix& w = net.weights(m);
  const Vector& z = tr.z(m);
  const Vector& y = tr.y(m);
  Vector out(w.cols());
  for (std::size_t i = 0; i < w.rows(); ++i) {
    const double s = adj[i] * activate_deriv(net.activation(m), z[i], y[i]);
    for (std::size_t j = 0; j < w.cols(); ++j) out[j] += w(i, j) * s;
  }
  return out;
}

// Gradient with respect to W_l given the adjoint of y_l: (adj * f'(z_l)) y_{l-1}^T.
Matrix weight_gradient(const Network& net, const ForwardTrace& tr, std::size_t l, const Vector& adj) {
  const Vector& z = tr.z(l);
  const Vector& y = tr.y(l);
  const Vector& prev = tr.y(l - 1);
  Matrix g(y.size(), prev.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double s = adj[i] * activate_deriv(net.activation(l), z[i], y[i]);
    for (std::size_t j = 0; j < prev.size(); ++j) g(i, j) = s * prev[j];
  }
  return g;
}

// Plain-loop forward pass for the oracles.
std::vector<Vector> reference_forward(const Network& net, const Vector& x) {
  std::vector<Vector> ys{x};
  for (std::size_t l = 1; l <= net.num_layers(); ++l) {
    const Matrix& w = net.weights(l);
    Vector y(w.rows());
    for (std::size_t i = 0; i < w.rows(); ++i) {
      double z = 0.0;
      for (std::size_t j = 0; j < w.cols(); ++j) z += w(i, j) * ys.back()[j];
      y[i] = activate(net.activation(l), z);
    }
    ys.push_back(std::move(y));
  }
  return ys;
}

double squared_half(const Vector& v) {
  double s = 0.0;
  for (double e : v) s += 0.5 * e * e;
  return s;
}

Vector layer_output(const Matrix& w, ActivationKind kind, std::span<const double> w_data, const Vector& input) {
  Vector y(w.rows());
  for (std::size_t i = 0; i < w.rows(); ++i) {
    double z = 0.0;
    for (std::size_t j = 0; j < w.cols(); ++j) z += w_data[i * w.cols() + j] * input[j];
    y[i] = activate(kind, z);
  }
  return y;
}

double negated_rel_error(const Matrix& delta, const std::vector<double>& numeric_grad) {
  std::vector<double> analytic(delta.span().begin(), delta.span().end());
  for (auto& v : analytic) v = -v;
  return relative_error(analytic, numeric_grad);
}

}  // namespace

std::vector<double> fd_gradient(const std::function<double(std::span<const double>)>& cost,
                                std::span<const double> params, const FdOracleConfig& cfg) {
  if (!(cfg.step > 0.0)) throw ConfigError("finite-difference step must be positive");
  std::vector<double> p(params.begin(), params.end());
  std::vector<double> grad(p.size());
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double orig = p[k];
    p[k] = orig + cfg.step;
    const double up = cost(p);
    p[k] = orig - cfg.step;
    const double down = cost(p);
    p[k] = orig;
    if (!std::isfinite(up) || !std::isfinite(down)) {
      throw OracleError("non-finite cost while probing coordinate " + std::to_string(k));
    }
    grad[k] = (up - down) / (2.0 * cfg.step);
  }
  return grad;
}

Matrix hebbian_term(const Network& net, const ForwardTrace& trace, std::size_t layer) {
  check_layer(net, layer);
  return weight_gradient(net, trace, layer, trace.y(layer));
}

Matrix backprop_term(const Network& net, const ForwardTrace& trace, const Vector& label_onehot, std::size_t layer) {
  check_layer(net, layer);
  const std::size_t L = net.num_layers();
  Vector adj(label_onehot.size());
  for (std::size_t i = 0; i < adj.size(); ++i) adj[i] = label_onehot[i] - trace.output()[i];
  for (std::size_t m = L; m > layer; --m) adj = pull_back(net, trace, m, adj);
  return weight_gradient(net, trace, layer, adj);
}

Matrix activity_gradient(const Network& net, const ForwardTrace& trace, std::size_t activity_layer, std::size_t layer) {
  check_layer(net, layer);
  check_layer(net, activity_layer);
  if (activity_layer < layer) throw ConfigError("activity layer lies below the weights; gradient is zero");
  Vector adj = trace.y(activity_layer);
  for (std::size_t m = activity_layer; m > layer; --m) adj = pull_back(net, trace, m, adj);
  return weight_gradient(net, trace, layer, adj);
}

Matrix closed_form_delta(const Network& net, const ForwardTrace& trace, const Vector& label_onehot, std::size_t layer,
                         double potential_sign) {
  check_layer(net, layer);
  const std::size_t L = net.num_layers();
  if (label_onehot.size() != net.output_size()) throw ConfigError("label length does not match output layer");
  // adj_i = -d/dy_i (C_L + sign * sum_{k=layer}^{L-1} |y_k|^2 / 2)
  Vector adj(label_onehot.size());
  for (std::size_t i = 0; i < adj.size(); ++i) adj[i] = label_onehot[i] - trace.output()[i];
  for (std::size_t i = L - 1; i >= layer; --i) {
    adj = pull_back(net, trace, i + 1, adj);
    const Vector& y = trace.y(i);
    for (std::size_t j = 0; j < adj.size(); ++j) adj[j] -= potential_sign * y[j];
  }
  return weight_gradient(net, trace, layer, adj);
}

double potential(const Network& net, const Vector& x, const Vector& label_onehot, std::size_t layer) {
  check_layer(net, layer);
  const auto ys = reference_forward(net, x);
  double p = local_cost(label_onehot, ys.back());
  for (std::size_t i = layer; i < net.num_layers(); ++i) p += squared_half(ys[i]);
  return p;
}

double max_abs_diff(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw ConfigError("max_abs_diff: shape mismatch");
  double m = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a.data()[k] - b.data()[k]));
  return m;
}

double relative_error(std::span<const double> analytic, std::span<const double> numeric) {
  if (analytic.size() != numeric.size()) throw ConfigError("relative_error: length mismatch");
  double diff = 0.0, na = 0.0, nn = 0.0;
  for (std::size_t k = 0; k < analytic.size(); ++k) {
    diff += (analytic[k] - numeric[k]) * (analytic[k] - numeric[k]);
    na += analytic[k] * analytic[k];
    nn += numeric[k] * numeric[k];
  }
  const double scale = std::sqrt(std::max(na, nn));
  if (scale == 0.0) return 0.0;
  return std::sqrt(diff) / scale;
}

DecompositionReport verify_decomposition(const Network& net, const Vector& x, const Vector& label_onehot,
                                         const DecompositionOptions& options) {
  TargetSolverConfig single_step;
  single_step.tau = 1.0;
  single_step.steps = 1;
  single_step.readout = TargetReadout::Displacement;
  TrainConfig unit_rate;
  unit_rate.eta = 1.0;

  const ForwardTrace trace = forward(net, x);
  const StepResult step = targetprop_step(net, trace, label_onehot, single_step, unit_rate);
  const double sign = options.mutate_hebbian_sign ? -1.0 : 1.0;

  DecompositionReport report;
  report.tolerance = options.tolerance;
  const std::size_t L = net.num_layers();
  for (std::size_t l = 1; l <= L; ++l) {
    LayerDecomposition d;
    d.layer = l;
    d.backprop_term = backprop_term(net, trace, label_onehot, l);
    for (std::size_t i = l; i < L; ++i) d.hebbian_terms.push_back(activity_gradient(net, trace, i, l));
    d.closed_form_delta = closed_form_delta(net, trace, label_onehot, l, sign);
    d.algorithm_delta = step.deltas.matrix(l);
    d.max_abs_diff = max_abs_diff(d.algorithm_delta, d.closed_form_delta);
    report.max_abs_diff = std::max(report.max_abs_diff, d.max_abs_diff);
    report.layers.push_back(std::move(d));
  }

  TargetSolverConfig endpoint = single_step;
  endpoint.readout = TargetReadout::Endpoint;
  const StepResult ep = targetprop_step(net, trace, label_onehot, endpoint, unit_rate);
  const WeightDeltas bp = backprop_step(net, trace, label_onehot, unit_rate);
  for (std::size_t l = 1; l <= L; ++l) {
    report.endpoint_vs_backprop_diff = std::max(report.endpoint_vs_backprop_diff,
                                                max_abs_diff(ep.deltas.matrix(l), bp.matrix(l)));
  }
  report.passed = report.max_abs_diff < options.tolerance && report.endpoint_vs_backprop_diff < options.tolerance;
  return report;
}

GradientCheckReport check_gradients(const Network& net, const Vector& x, const Vector& label_onehot,
                                    const TargetSolverConfig& solver, const FdOracleConfig& fd, double tolerance) {
  const std::size_t L = net.num_layers();
  TrainConfig unit_rate;
  unit_rate.eta = 1.0;
  const ForwardTrace trace = forward(net, x);
  const StepResult step = targetprop_step(net, trace, label_onehot, solver, unit_rate);
  const WeightDeltas bp = backprop_step(net, trace, label_onehot, unit_rate);

  GradientCheckReport r;
  r.tolerance = tolerance;
  for (std::size_t l = 1; l <= L; ++l) {
    const Matrix& w = net.weights(l);
    const ActivationKind kind = net.activation(l);
    const Vector& y_hat = step.targets.at(l);
    const Vector& input = trace.y(l - 1);

    // Local cost C_l as a function of W_l, target frozen.
    const auto local = [&](std::span<const double> wd) { return local_cost(y_hat, layer_output(w, kind, wd, input)); };
    r.weight_rel_error = std::max(r.weight_rel_error, negated_rel_error(step.deltas.matrix(l), fd_gradient(local, w.span(), fd)));

    // C_{l+1} as a function of y_l.
    if (l < L) {
      const Matrix& w_up = net.weights(l + 1);
      const ActivationKind kind_up = net.activation(l + 1);
      const Vector& y_hat_up = step.targets.at(l + 1);
      const auto upper = [&](std::span<const double> yd) {
        return local_cost(y_hat_up, layer_output(w_up, kind_up, w_up.span(), Vector(std::vector<double>(yd.begin(), yd.end()))));
      };
      const Vector analytic = target_cost_gradient(trace.y(l), w_up, kind_up, y_hat_up);
      r.target_rel_error =
          std::max(r.target_rel_error, relative_error(analytic.span(), fd_gradient(upper, trace.y(l).span(), fd)));
    }

    // Whole-network costs as functions of W_l.
    Network probe = net;
    const auto output_cost = [&](std::span<const double> wd) {
      std::copy(wd.begin(), wd.end(), probe.weights(l).data());
      return local_cost(label_onehot, reference_forward(probe, x).back());
    };
    r.backprop_rel_error = std::max(r.backprop_rel_error, negated_rel_error(bp.matrix(l), fd_gradient(output_cost, w.span(), fd)));
    const auto pot = [&](std::span<const double> wd) {
      std::copy(wd.begin(), wd.end(), probe.weights(l).data());
      return potential(probe, x, label_onehot, l);
    };
    r.potential_rel_error = std::max(
        r.potential_rel_error, negated_rel_error(closed_form_delta(net, trace, label_onehot, l), fd_gradient(pot, w.span(), fd)));
    probe.weights(l) = w;
  }
  r.passed = r.weight_rel_error < tolerance && r.target_rel_error < tolerance && r.backprop_rel_error < tolerance &&
             r.potential_rel_error < tolerance;
  return r;
}

RandomCase random_case(Rng& rng, const RandomCaseSpec& spec) {
  if (spec.min_depth < 1 || spec.min_depth > spec.max_depth || spec.min_width < 1 || spec.min_width > spec.max_width) {
    throw ConfigError("random_case: bad depth/width ranges");
  }
  const auto pick = [&](std::size_t lo, std::size_t hi) { return lo + rng.index(hi - lo + 1); };
  for (int attempt = 0; attempt < 1000; ++attempt) {
    const std::size_t depth = pick(spec.min_depth, spec.max_depth);
    std::vector<std::size_t> sizes;
    for (std::size_t i = 0; i <= depth; ++i) sizes.push_back(pick(spec.min_width, spec.max_width));
    std::vector<ActivationKind> kinds(depth, ActivationKind::Sigmoid);
    if (spec.relu_first) kinds.front() = ActivationKind::ReLU;
    Network net = initialize_network(sizes, kinds, rng);
    Vector x(sizes.front());
    for (auto& v : x) v = rng.uniform(0.0, 1.0);
    Vector label = one_hot(rng.index(sizes.back()), sizes.back());
    const ForwardTrace tr = forward(net, x);
    bool clear_of_kinks = true;
    for (std::size_t l = 1; l <= depth; ++l) {
      if (net.activation(l) != ActivationKind::ReLU) continue;
      for (double z : tr.z(l)) clear_of_kinks = clear_of_kinks && std::abs(z) > spec.kink_margin;
    }
    if (clear_of_kinks) return {std::move(net), std::move(x), std::move(label)};
  }
  throw ConfigError("random_case: could not draw a case clear of ReLU kinks");
}

SuiteReport run_verification_suite(const SuiteOptions& options) {
  SuiteReport report;
  for (std::size_t k = 0; k < options.decomposition_cases; ++k) {
    SuiteCase c;
    c.seed = options.seed + k;
    c.relu_first = (k % 2) == 1;
    Rng rng(c.seed);
    RandomCaseSpec spec;
    spec.relu_first = c.relu_first;
    const RandomCase rc = random_case(rng, spec);
    c.architecture = format_architecture(rc.net.layer_sizes());
    DecompositionOptions opt;
    opt.mutate_hebbian_sign = options.mutate_hebbian_sign;
    const DecompositionReport d = verify_decomposition(rc.net, rc.x, rc.label, opt);
    c.value = d.max_abs_diff;
    c.passed = d.passed;
    report.worst_decomposition = std::max(report.worst_decomposition, c.value);
    report.decomposition.push_back(std::move(c));
  }
  for (std::size_t k = 0; k < options.gradient_cases; ++k) {
    SuiteCase c;
    c.seed = options.seed + k;
    c.relu_first = (k % 2) == 1;
    Rng rng(c.seed);
    RandomCaseSpec spec;
    spec.max_depth = 4;
    spec.max_width = 6;
    spec.relu_first = c.relu_first;
    const RandomCase rc = random_case(rng, spec);
    c.architecture = format_architecture(rc.net.layer_sizes());
    TargetSolverConfig solver;
    solver.tau = 0.5;
    solver.steps = 3;
    const GradientCheckReport g = check_gradients(rc.net, rc.x, rc.label, solver);
    c.value = std::max({g.weight_rel_error, g.target_rel_error, g.backprop_rel_error, g.potential_rel_error});
    c.passed = g.passed;
    report.worst_gradient = std::max(report.worst_gradient, c.value);
    report.gradients.push_back(std::move(c));
  }
  report.passed = true;
  for (const auto& c : report.decomposition) report.passed = report.passed && c.passed;
  for (const auto& c : report.gradients) report.passed = report.passed && c.passed;
  return report;
}

}  // namespace gradprop
