#include "gradprop/netinit.hpp"

#include <cmath>
#include <string>

#include "gradprop/error.hpp"
#include "gradprop/network.hpp"

namespace gradprop {

double weight_variance(const LayerInitSpec& spec) {
  if (spec.fan_in == 0) throw ConfigError("weight_variance: fan-in must be at least 1");
  if (!std::isfinite(spec.input_mean) || !std::isfinite(spec.input_variance) || !std::isfinite(spec.deriv_at_mean) ||
      !std::isfinite(spec.target_variance)) {
    throw ConfigError("weight_variance: non-finite moment");
  }
  if (spec.input_variance < 0.0) throw ConfigError("weight_variance: input variance must be >= 0");
  if (!(spec.target_variance > 0.0)) throw ConfigError("weight_variance: target variance must be > 0");
  // First power of the input mean, as in the published constants.
  const double denom = static_cast<double>(spec.fan_in) * spec.deriv_at_mean * spec.deriv_at_mean *
                       (spec.input_mean + spec.input_variance);
  if (!(denom > 0.0)) {
    throw ConfigError("weight_variance: denominator " + std::to_string(denom) +
                      " is not positive (zero activation slope gives infinite variance)");
  }
  return spec.target_variance / denom;
}

UncertaintyProfile sigmoid_uncertainty_moments() { return {0.5, 1.0 / 20.0}; }

UncertaintyProfile uniform_input_moments() { return {0.5, 1.0 / 12.0}; }

double input_layer_variance(std::size_t fan_in) {
  const auto in = uniform_input_moments();
  return weight_variance({fan_in, in.mean, in.variance, 0.25, sigmoid_uncertainty_moments().variance});
}

double hidden_layer_variance(std::size_t fan_in) {
  const auto u = sigmoid_uncertainty_moments();
  return weight_variance({fan_in, u.mean, u.variance, 0.25, u.variance});
}

std::vector<double> init_variances(const std::vector<std::size_t>& layer_sizes) {
  if (layer_sizes.size() < 2) throw ConfigError("a network needs at least an input and an output layer");
  std::vector<double> out;
  for (std::size_t l = 1; l < layer_sizes.size(); ++l) {
    const std::size_t fan_in = layer_sizes[l - 1];
    if (fan_in == 0 || layer_sizes[l] == 0) throw ConfigError("layer sizes must be positive");
    out.push_back(l == 1 ? input_layer_variance(fan_in) : hidden_layer_variance(fan_in));
  }
  return out;
}

Network initialize_network(const std::vector<std::size_t>& layer_sizes, const std::vector<ActivationKind>& activations,
                           Rng& rng) {
  const auto variances = init_variances(layer_sizes);
  std::vector<Matrix> weights;
  weights.reserve(variances.size());
  for (std::size_t k = 0; k < variances.size(); ++k) {
    const std::size_t rows = layer_sizes[k + 1];
    const std::size_t cols = layer_sizes[k];
    Vector draws = sample_normal(rng, 0.0, variances[k], rows * cols);
    weights.emplace_back(rows, cols, draws.values());
  }
  return Network(layer_sizes, std::move(weights), activations);
}

}  // namespace gradprop
