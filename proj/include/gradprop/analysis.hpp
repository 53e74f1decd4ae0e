#pragma once

// Machine checks of the target-propagation algebra.
//
// With a single Euler step, tau = eta = 1, and the displacement readout
// (yhat_l = -dC_{l+1}/dy_l), the weight change of layer l is
//
//   dW_l = -d/dW_l ( C_L + sum_{i=l}^{L-1} |y_i|^2 / 2 )
//
// i.e. the backprop gradient of the output cost minus the gradients of the
// quadratic activity of every layer from l up to L-1. The i = l member of that
// sum is the Hebbian product y_l f'(z_l) y_{l-1}^T.
//
// Everything here walks the forward graph with plain loops so it stays
// independent of the kernel-dispatched training path it checks.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "gradprop/learning.hpp"
#include "gradprop/mathcore.hpp"
#include "gradprop/network.hpp"

namespace gradprop {

struct FdOracleConfig {
  double step = 1e-5;
};

/// Central differences (f(p + h e_k) - f(p - h e_k)) / 2h for every k.
/// Throws OracleError if the cost is non-finite at a probe point.
std::vector<double> fd_gradient(const std::function<double(std::span<const double>)>& cost,
                                std::span<const double> params, const FdOracleConfig& cfg = {});

/// y_l f'(z_l) y_{l-1}^T, the gradient of |y_l|^2 / 2 with respect to W_l.
Matrix hebbian_term(const Network& net, const ForwardTrace& trace, std::size_t layer);

/// -dC_L/dW_l.
Matrix backprop_term(const Network& net, const ForwardTrace& trace, const Vector& label_onehot, std::size_t layer);

/// d(|y_i|^2 / 2)/dW_l for a layer i >= l.
Matrix activity_gradient(const Network& net, const ForwardTrace& trace, std::size_t activity_layer, std::size_t layer);

/// -d/dW_l (C_L + potential_sign * sum_{i=l}^{L-1} |y_i|^2 / 2). The true
/// identity has potential_sign = +1; -1 is the sign-flipped mutant.
Matrix closed_form_delta(const Network& net, const ForwardTrace& trace, const Vector& label_onehot, std::size_t layer,
                         double potential_sign = 1.0);

/// C_L + sum_{i=l}^{L-1} |y_i|^2 / 2 evaluated by a fresh forward pass.
double potential(const Network& net, const Vector& x, const Vector& label_onehot, std::size_t layer);

double max_abs_diff(const Matrix& a, const Matrix& b);

/// ||a - b|| / max(||a||, ||b||), or 0 when both are zero.
double relative_error(std::span<const double> analytic, std::span<const double> numeric);

struct LayerDecomposition {
  std::size_t layer = 0;
  Matrix backprop_term;
  /// One matrix per i = layer..L-1: d(|y_i|^2 / 2)/dW_layer.
  std::vector<Matrix> hebbian_terms;
  Matrix closed_form_delta;
  Matrix algorithm_delta;
  double max_abs_diff = 0.0;
};

struct DecompositionReport {
  std::vector<LayerDecomposition> layers;
  double max_abs_diff = 0.0;
  /// Endpoint readout under the same settings, compared with pure backprop.
  double endpoint_vs_backprop_diff = 0.0;
  double tolerance = 1e-10;
  bool passed = false;
};

struct DecompositionOptions {
  /// Negative control: flip the sign of the activity potential in the closed form.
  bool mutate_hebbian_sign = false;
  double tolerance = 1e-10;
};

/// Runs targetprop_step with T = 1, tau = eta = 1 and the displacement readout
/// and compares every layer's delta with closed_form_delta.
DecompositionReport verify_decomposition(const Network& net, const Vector& x, const Vector& label_onehot,
                                         const DecompositionOptions& options = {});

struct GradientCheckReport {
  /// Worst relative error of -dW_l from targetprop_step vs finite differences of C_l.
  double weight_rel_error = 0.0;
  /// Worst relative error of dC_{l+1}/dy_l vs finite differences.
  double target_rel_error = 0.0;
  /// Worst relative error of backprop deltas vs finite differences of C_L.
  double backprop_rel_error = 0.0;
  /// Worst relative error of closed_form_delta vs finite differences of the potential.
  double potential_rel_error = 0.0;
  double tolerance = 1e-6;
  bool passed = false;
};

GradientCheckReport check_gradients(const Network& net, const Vector& x, const Vector& label_onehot,
                                    const TargetSolverConfig& solver, const FdOracleConfig& fd = {},
                                    double tolerance = 1e-6);

/// Random test case for the checkers.
struct RandomCase {
  Network net;
  Vector x;
  Vector label;
};

struct RandomCaseSpec {
  std::size_t min_depth = 2;  // weighted layers
  std::size_t max_depth = 5;
  std::size_t min_width = 1;
  std::size_t max_width = 8;
  bool relu_first = false;
  /// Redraw until every ReLU pre-activation has |z| > kink_margin.
  double kink_margin = 1e-3;
};

RandomCase random_case(Rng& rng, const RandomCaseSpec& spec);

struct SuiteOptions {
  std::uint64_t seed = 1;
  std::size_t decomposition_cases = 100;
  std::size_t gradient_cases = 50;
  bool mutate_hebbian_sign = false;
};

struct SuiteCase {
  std::uint64_t seed = 0;
  std::string architecture;
  bool relu_first = false;
  double value = 0.0;  // max abs diff or worst relative error
  bool passed = false;
};

struct SuiteReport {
  std::vector<SuiteCase> decomposition;
  std::vector<SuiteCase> gradients;
  double worst_decomposition = 0.0;
  double worst_gradient = 0.0;
  bool passed = false;
};

/// Decomposition identity over random nets of depth 2-5 and width 1-8, and
/// finite-difference gradient checks over nets of depth 2-4 and width 1-6.
/// Case k of each family draws from Rng(seed + k); even cases are all-sigmoid,
/// odd cases have a ReLU first layer.
SuiteReport run_verification_suite(const SuiteOptions& options);

}  // namespace gradprop
