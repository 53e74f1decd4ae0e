#pragma once

// Weight initialization that keeps every neuron at maximal uncertainty.
//
// For a sigmoid neuron the uncertainty density is U(y) = 6 y (1 - y) on [0, 1],
// whose moments are <y> = 1/2 and VAR(y) = 1/20. Propagating moments through a
// zero-mean layer gives the weight variance
//
//   VAR(w_l) = VAR(y_l) / (N f'(0)^2 (<y_{l-1}> + VAR(y_{l-1})))
//
// which yields 48 / (35 N) for the input layer (uniform data: mean 1/2,
// variance 1/12) and 16 / (11 N) for every later layer.

#include <cstddef>
#include <vector>

#include "gradprop/mathcore.hpp"

namespace gradprop {

class Network;

struct LayerInitSpec {
  std::size_t fan_in = 1;
  double input_mean = 0.0;
  double input_variance = 0.0;
  double deriv_at_mean = 0.0;
  double target_variance = 0.0;
};

struct UncertaintyProfile {
  double mean = 0.0;
  double variance = 0.0;
};

/// Throws ConfigError for a non-positive or non-finite denominator.
double weight_variance(const LayerInitSpec& spec);

/// Closed-form moments of U(y) = 6 y (1 - y): {1/2, 1/20}.
UncertaintyProfile sigmoid_uncertainty_moments();

/// Moments of Uniform[0, 1]: {1/2, 1/12}.
UncertaintyProfile uniform_input_moments();

/// 48 / (35 N) and 16 / (11 N) respectively.
double input_layer_variance(std::size_t fan_in);
double hidden_layer_variance(std::size_t fan_in);

/// Per-layer weight variances for an architecture (entry k is for layer k+1).
std::vector<double> init_variances(const std::vector<std::size_t>& layer_sizes);

/// Zero-mean normal weights with the variances above. Requires at least two
/// layer sizes, all positive, and one activation per non-input layer.
Network initialize_network(const std::vector<std::size_t>& layer_sizes, const std::vector<ActivationKind>& activations,
                           Rng& rng);

}  // namespace gradprop
