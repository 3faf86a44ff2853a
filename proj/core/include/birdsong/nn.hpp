// Copyright 2026 The Birdsong Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Dense softmax classifier: (dense -> ReLU -> dropout) for every hidden
// layer, then dense -> softmax. Trained with cross-entropy and Adam.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "birdsong/matrix.hpp"

namespace birdsong {

using Rng = std::mt19937_64;

inline constexpr int kModelFormatVersion = 1;

struct ModelConfig {
  std::vector<std::size_t> layer_sizes{80, 256, 256, 256, 5};
  double dropout_rate = 0.5;  // after every hidden layer

  std::size_t input_size() const { return layer_sizes.front(); }
  std::size_t output_size() const { return layer_sizes.back(); }
  void validate() const;

  friend bool operator==(const ModelConfig&, const ModelConfig&) = default;
};

struct DenseLayer {
  Matrix weights;  // n_out x n_in
  std::vector<double> bias;

  DenseLayer() = default;
  DenseLayer(std::size_t n_in, std::size_t n_out) : weights(n_out, n_in), bias(n_out, 0.0) {}

  std::size_t inputs() const { return weights.cols(); }
  std::size_t outputs() const { return weights.rows(); }
  std::size_t parameter_count() const { return weights.size() + bias.size(); }

  friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

/// Parameter-shaped buffers: gradients and Adam moments share this layout.
using Gradients = std::vector<DenseLayer>;

class Network {
 public:
  Network() = default;
  Network(ModelConfig config, std::vector<DenseLayer> layers,
          std::vector<std::string> labels = {});

  /// Glorot-uniform weights, zero biases.
  static Network initialize(const ModelConfig& config, Rng& rng);

  const ModelConfig& config() const { return config_; }
  const std::vector<DenseLayer>& layers() const { return layers_; }
  std::vector<DenseLayer>& layers() { return layers_; }

  /// Class names indexed by output unit; may be empty.
  const std::vector<std::string>& labels() const { return labels_; }
  void set_labels(std::vector<std::string> labels);

  std::size_t input_size() const { return config_.input_size(); }
  std::size_t output_size() const { return config_.output_size(); }
  std::size_t parameter_count() const;

  /// Stable content hash of architecture, labels and parameters.
  std::string model_id() const;

  friend bool operator==(const Network&, const Network&) = default;

 private:
  ModelConfig config_;
  std::vector<DenseLayer> layers_;
  std::vector<std::string> labels_;
};

/// Sum over layers of (n_in + 1) * n_out.
std::size_t parameter_count(std::span<const std::size_t> layer_sizes);

double relu(double x);
void relu_in_place(std::span<double> values);

/// exp(x_i - max x) / sum; throws on empty or non-finite input.
std::vector<double> softmax(std::span<const double> logits);

/// -ln(p[target]) with p clipped to [1e-12, 1].
double cross_entropy(std::span<const double> probs, std::size_t target);
/// One-hot target variant; throws if `target` is not one-hot or lengths differ.
double cross_entropy(std::span<const double> probs, std::span<const double> target);

/// Activations recorded by a training-mode forward pass.
struct ForwardCache {
  std::vector<std::vector<double>> layer_inputs;     // input seen by each dense layer
  std::vector<std::vector<double>> pre_activations;  // hidden layers only
  std::vector<std::vector<double>> dropout_scales;   // 0 or 1/(1-rate) per hidden unit
  std::vector<double> probs;

  bool empty() const { return probs.empty(); }
};

/// Deterministic inference: dropout disabled.
std::vector<double> infer(const Network& net, std::span<const double> input);

/// Training pass: inverted dropout with masks drawn from `rng`, activations
/// stored in `cache` for backward().
std::vector<double> forward_train(const Network& net, std::span<const double> input, Rng& rng,
                                  ForwardCache& cache);

/// Same as forward_train with dropout forced off; used for gradient checks.
std::vector<double> forward_train_no_dropout(const Network& net, std::span<const double> input,
                                             ForwardCache& cache);

Gradients zero_gradients(const Network& net);

/// Gradient of cross_entropy(softmax(net(x)), target) for every parameter,
/// reusing the dropout masks from the cached forward pass. Results are
/// multiplied by `scale` and added to `grads`.
void backward_accumulate(const Network& net, const ForwardCache& cache, std::size_t target,
                         Gradients& grads, double scale = 1.0);
Gradients backward(const Network& net, const ForwardCache& cache, std::size_t target);

struct AdamOptions {
  double learning_rate = 0.001;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  AdamOptions options;
  Gradients m;
  Gradients v;
  std::uint64_t step = 0;

  static AdamState for_network(const Network& net, AdamOptions options = {});
};

/// One bias-corrected Adam update over a flat parameter block. `step` is the
/// already-incremented step counter.
void adam_update(std::span<double> params, std::span<const double> grads, std::span<double> m,
                 std::span<double> v, std::uint64_t step, const AdamOptions& options);

/// Increments state.step and updates every parameter of `net`. Throws
/// kNonFinite (leaving net and state untouched) if any gradient is NaN/inf.
void adam_step(AdamState& state, Network& net, const Gradients& grads);

/// Versioned JSON with full round-trip precision.
std::string model_to_json(const Network& net);
Network model_from_json(const std::string& text);
void save_model(const Network& net, const std::filesystem::path& path);
Network load_model(const std::filesystem::path& path);

}  // namespace birdsong
