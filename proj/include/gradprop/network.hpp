#pragma once

// Feed-forward network without biases: z_l = W_l y_{l-1}, y_l = f_l(z_l).
//
// Layers are numbered as in the math: layer 0 is the raw input, layers 1..L
// carry weights and activations. Accessors take that layer number.

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "gradprop/mathcore.hpp"

namespace gradprop {

/// "sigmoid" (every layer sigmoid) or "relu-first" (layer 1 ReLU, rest
/// sigmoid), or an explicit comma list such as "relu,sigmoid".
std::vector<ActivationKind> parse_activations(const std::string& text, std::size_t num_layers);

/// Parses "784-100-10".
std::vector<std::size_t> parse_architecture(const std::string& text);
std::string format_architecture(const std::vector<std::size_t>& layer_sizes);

class Network {
 public:
  /// Validates shapes: weights[k] is sizes[k+1] x sizes[k]; entries finite.
  Network(std::vector<std::size_t> layer_sizes, std::vector<Matrix> weights, std::vector<ActivationKind> activations);

  /// Number of weighted layers L.
  std::size_t num_layers() const noexcept { return weights_.size(); }
  const std::vector<std::size_t>& layer_sizes() const noexcept { return sizes_; }
  std::size_t input_size() const noexcept { return sizes_.front(); }
  std::size_t output_size() const noexcept { return sizes_.back(); }

  const Matrix& weights(std::size_t layer) const { return weights_.at(layer - 1); }
  Matrix& weights(std::size_t layer) { return weights_.at(layer - 1); }
  ActivationKind activation(std::size_t layer) const { return activations_.at(layer - 1); }
  const std::vector<ActivationKind>& activations() const noexcept { return activations_; }
  const std::vector<Matrix>& all_weights() const noexcept { return weights_; }

  bool operator==(const Network&) const = default;

 private:
  std::vector<std::size_t> sizes_;
  std::vector<Matrix> weights_;
  std::vector<ActivationKind> activations_;
};

/// Cached forward state for one example: y(0) is the input, z(l) and y(l) for
/// l = 1..L satisfy y(l) = f_l(z(l)), z(l) = W_l y(l-1).
struct ForwardTrace {
  std::vector<Vector> activations;      // L + 1 entries
  std::vector<Vector> pre_activations;  // L entries, index l - 1

  std::size_t num_layers() const noexcept { return pre_activations.size(); }
  const Vector& y(std::size_t layer) const { return activations.at(layer); }
  const Vector& z(std::size_t layer) const { return pre_activations.at(layer - 1); }
  const Vector& output() const { return activations.back(); }
};

ForwardTrace forward(const Network& net, const Vector& x);

/// Index of the largest entry; ties go to the lowest index.
std::size_t argmax(const Vector& v);
std::size_t predict_class(const Network& net, const Vector& x);

/// Binary checkpoint, little-endian:
///   "GTPNET1\0" | u64 count | count x u64 layer sizes |
///   (count - 1) x u8 activation tags | each weight matrix as row-major f64.
void write_checkpoint(const Network& net, std::ostream& out);
Network read_checkpoint(std::istream& in, const std::string& source_name = "<stream>");

/// Writes atomically through a temporary file. An existing checkpoint at the
/// same path is kept as "<path>.prev".
void save_checkpoint(const Network& net, const std::filesystem::path& path);
Network load_checkpoint(const std::filesystem::path& path);

}  // namespace gradprop
