#include "gradprop/network.hpp"

#include <charconv>
#include <sstream>

#include "gradprop/error.hpp"

namespace gradprop {

std::vector<ActivationKind> parse_activations(const std::string& text, std::size_t num_layers) {
  if (num_layers == 0) throw ConfigError("network has no weighted layers");
  if (text == "sigmoid") return std::vector<ActivationKind>(num_layers, ActivationKind::Sigmoid);
  if (text == "relu-first") {
    std::vector<ActivationKind> kinds(num_layers, ActivationKind::Sigmoid);
    kinds.front() = ActivationKind::ReLU;
    return kinds;
  }
  std::vector<ActivationKind> kinds;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) kinds.push_back(parse_activation(item));
  if (kinds.size() != num_layers) {
    throw ConfigError("activation list '" + text + "' has " + std::to_string(kinds.size()) + " entries, expected " +
                      std::to_string(num_layers));
  }
  return kinds;
}

std::vector<std::size_t> parse_architecture(const std::string& text) {
  std::vector<std::size_t> sizes;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t dash = text.find('-', start);
    const std::string part = text.substr(start, dash == std::string::npos ? std::string::npos : dash - start);
    std::size_t value = 0;
    const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), value);
    if (part.empty() || ec != std::errc() || ptr != part.data() + part.size() || value == 0) {
      throw ConfigError("bad architecture '" + text + "': expected positive sizes joined by '-'");
    }
    sizes.push_back(value);
    if (dash == std::string::npos) break;
    start = dash + 1;
  }
  if (sizes.size() < 2) throw ConfigError("architecture '" + text + "' needs at least two layers");
  return sizes;
}

std::string format_architecture(const std::vector<std::size_t>& layer_sizes) {
  std::string out;
  for (std::size_t i = 0; i < layer_sizes.size(); ++i) {
    if (i) out += '-';
    out += std::to_string(layer_sizes[i]);
  }
  return out;
}

Network::Network(std::vector<std::size_t> layer_sizes, std::vector<Matrix> weights,
                 std::vector<ActivationKind> activations)
    : sizes_(std::move(layer_sizes)), weights_(std::move(weights)), activations_(std::move(activations)) {
  if (sizes_.size() < 2) throw ConfigError("a network needs at least an input and an output layer");
  if (weights_.size() != sizes_.size() - 1) throw ConfigError("one weight matrix per non-input layer is required");
  if (activations_.size() != weights_.size()) throw ConfigError("one activation per non-input layer is required");
  for (std::size_t k = 0; k < weights_.size(); ++k) {
    if (sizes_[k] == 0 || sizes_[k + 1] == 0) throw ConfigError("layer sizes must be positive");
    if (weights_[k].rows() != sizes_[k + 1] || weights_[k].cols() != sizes_[k]) {
      throw ConfigError("weights of layer " + std::to_string(k + 1) + " are " + std::to_string(weights_[k].rows()) +
                        "x" + std::to_string(weights_[k].cols()) + ", expected " + std::to_string(sizes_[k + 1]) +
                        "x" + std::to_string(sizes_[k]));
    }
    if (!all_finite(weights_[k].span())) {
      throw ConfigError("weights of layer " + std::to_string(k + 1) + " contain non-finite values");
    }
  }
}

ForwardTrace forward(const Network& net, const Vector& x) {
  if (x.size() != net.input_size()) {
    throw ConfigError("input has " + std::to_string(x.size()) + " features, network expects " +
                      std::to_string(net.input_size()));
  }
  ForwardTrace trace;
  trace.activations.reserve(net.num_layers() + 1);
  trace.pre_activations.reserve(net.num_layers());
  trace.activations.push_back(x);
  for (std::size_t l = 1; l <= net.num_layers(); ++l) {
    trace.pre_activations.push_back(matvec(net.weights(l), trace.activations.back()));
    trace.activations.push_back(activate(net.activation(l), trace.pre_activations.back()));
  }
  return trace;
}

std::size_t argmax(const Vector& v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

std::size_t predict_class(const Network& net, const Vector& x) { return argmax(forward(net, x).output()); }

}  // namespace gradprop
