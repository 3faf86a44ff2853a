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

#include "birdsong/nn.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <nlohmann/json.hpp>
#include <numeric>

#include "birdsong/error.hpp"
#include "file_util.hpp"

namespace birdsong {
namespace {

constexpr double kProbFloor = 1e-12;
constexpr const char* kFormatName = "birdsong-mlp";

void dense_forward(const DenseLayer& layer, std::span<const double> in, std::span<double> out) {
  const std::size_t n_in = layer.inputs();
  for (std::size_t o = 0; o < layer.outputs(); ++o) {
    const double* w = layer.weights.data().data() + o * n_in;
    double acc = layer.bias[o];
    for (std::size_t i = 0; i < n_in; ++i) acc += w[i] * in[i];
    out[o] = acc;
  }
}

void check_input(const Network& net, std::span<const double> input) {
  if (net.layers().empty()) throw Error(ErrorKind::kInvalidArgument, "network has no layers");
  if (input.size() != net.input_size())
    throw Error(ErrorKind::kShapeMismatch, "input has " + std::to_string(input.size()) +
                                               " features, network expects " +
                                               std::to_string(net.input_size()));
}

// Shared by all forward variants. `rng` null means dropout disabled.
std::vector<double> run_forward(const Network& net, std::span<const double> input, Rng* rng,
                                ForwardCache* cache) {
  check_input(net, input);
  const auto& layers = net.layers();
  const std::size_t n_hidden = layers.size() - 1;
  const double rate = net.config().dropout_rate;
  const double keep_scale = 1.0 / (1.0 - rate);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  if (cache) {
    cache->layer_inputs.assign(1, std::vector<double>(input.begin(), input.end()));
    cache->pre_activations.clear();
    cache->dropout_scales.clear();
  }

  std::vector<double> current(input.begin(), input.end());
  for (std::size_t l = 0; l < n_hidden; ++l) {
    std::vector<double> pre(layers[l].outputs());
    dense_forward(layers[l], current, pre);
    std::vector<double> act = pre;
    relu_in_place(act);
    std::vector<double> scales;
    if (rng && rate > 0.0) {
      scales.resize(act.size());
      for (std::size_t i = 0; i < act.size(); ++i) {
        scales[i] = uniform(*rng) < rate ? 0.0 : keep_scale;
        act[i] *= scales[i];
      }
    } else {
      scales.assign(act.size(), 1.0);
    }
    if (cache) {
      cache->pre_activations.push_back(std::move(pre));
      cache->dropout_scales.push_back(std::move(scales));
      cache->layer_inputs.push_back(act);
    }
    current = std::move(act);
  }

  std::vector<double> logits(layers.back().outputs());
  dense_forward(layers.back(), current, logits);
  auto probs = softmax(logits);
  if (cache) cache->probs = probs;
  return probs;
}

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t fnv1a_u64(std::uint64_t h, std::uint64_t v) {
  unsigned char bytes[8];
  for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>((v >> (8 * i)) & 0xFF);
  return fnv1a(h, bytes, 8);
}

bool all_finite(std::span<const double> values) {
  return std::all_of(values.begin(), values.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

void ModelConfig::validate() const {
  if (layer_sizes.size() < 2)
    throw Error(ErrorKind::kInvalidArgument, "need at least an input and an output layer");
  if (std::any_of(layer_sizes.begin(), layer_sizes.end(), [](std::size_t s) { return s == 0; }))
    throw Error(ErrorKind::kInvalidArgument, "layer sizes must be positive");
  if (!(dropout_rate >= 0.0 && dropout_rate < 1.0))
    throw Error(ErrorKind::kInvalidArgument, "dropout_rate must be in [0, 1)");
}

Network::Network(ModelConfig config, std::vector<DenseLayer> layers,
                 std::vector<std::string> labels)
    : config_(std::move(config)), layers_(std::move(layers)) {
  config_.validate();
  if (layers_.size() != config_.layer_sizes.size() - 1)
    throw Error(ErrorKind::kShapeMismatch, "layer count disagrees with layer_sizes");
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& layer = layers_[l];
    if (layer.inputs() != config_.layer_sizes[l] || layer.outputs() != config_.layer_sizes[l + 1] ||
        layer.bias.size() != layer.outputs())
      throw Error(ErrorKind::kShapeMismatch,
                  "layer " + std::to_string(l) + " shape disagrees with layer_sizes");
  }
  set_labels(std::move(labels));
}

Network Network::initialize(const ModelConfig& config, Rng& rng) {
  config.validate();
  std::vector<DenseLayer> layers;
  for (std::size_t l = 0; l + 1 < config.layer_sizes.size(); ++l) {
    const std::size_t n_in = config.layer_sizes[l];
    const std::size_t n_out = config.layer_sizes[l + 1];
    DenseLayer layer(n_in, n_out);
    const double limit = std::sqrt(6.0 / static_cast<double>(n_in + n_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (double& w : layer.weights.data()) w = dist(rng);
    layers.push_back(std::move(layer));
  }
  return Network(config, std::move(layers));
}

void Network::set_labels(std::vector<std::string> labels) {
  if (!labels.empty() && labels.size() != config_.output_size())
    throw Error(ErrorKind::kShapeMismatch, "label count disagrees with output size");
  labels_ = std::move(labels);
}

std::size_t Network::parameter_count() const {
  std::size_t total = 0;
  for (const auto& layer : layers_) total += layer.parameter_count();
  return total;
}

std::string Network::model_id() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t s : config_.layer_sizes) h = fnv1a_u64(h, s);
  h = fnv1a_u64(h, std::bit_cast<std::uint64_t>(config_.dropout_rate));
  for (const auto& label : labels_) {
    h = fnv1a(h, label.data(), label.size());
    h = fnv1a_u64(h, label.size());
  }
  for (const auto& layer : layers_) {
    for (double w : layer.weights.data()) h = fnv1a_u64(h, std::bit_cast<std::uint64_t>(w));
    for (double b : layer.bias) h = fnv1a_u64(h, std::bit_cast<std::uint64_t>(b));
  }
  char buf[24];
  std::snprintf(buf, sizeof(buf), "mlp-%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::size_t parameter_count(std::span<const std::size_t> layer_sizes) {
  std::size_t total = 0;
  for (std::size_t l = 0; l + 1 < layer_sizes.size(); ++l)
    total += (layer_sizes[l] + 1) * layer_sizes[l + 1];
  return total;
}

double relu(double x) { return std::max(0.0, x); }

void relu_in_place(std::span<double> values) {
  for (double& v : values) v = relu(v);
}

std::vector<double> softmax(std::span<const double> logits) {
  if (logits.empty()) throw Error(ErrorKind::kInvalidArgument, "softmax of an empty vector");
  if (!all_finite(logits)) throw Error(ErrorKind::kNonFinite, "softmax input is not finite");
  const double peak = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - peak);
    sum += out[i];
  }
  for (double& p : out) p /= sum;
  return out;
}

double cross_entropy(std::span<const double> probs, std::size_t target) {
  if (target >= probs.size())
    throw Error(ErrorKind::kLengthMismatch, "target index outside probability vector");
  return -std::log(std::clamp(probs[target], kProbFloor, 1.0));
}

double cross_entropy(std::span<const double> probs, std::span<const double> target) {
  if (probs.size() != target.size())
    throw Error(ErrorKind::kLengthMismatch, "probability and target lengths differ");
  std::size_t hot = target.size();
  for (std::size_t i = 0; i < target.size(); ++i) {
    if (target[i] == 1.0 && hot == target.size()) {
      hot = i;
    } else if (target[i] != 0.0) {
      throw Error(ErrorKind::kInvalidArgument, "target is not one-hot");
    }
  }
  if (hot == target.size()) throw Error(ErrorKind::kInvalidArgument, "target is not one-hot");
  return cross_entropy(probs, hot);
}

std::vector<double> infer(const Network& net, std::span<const double> input) {
  return run_forward(net, input, nullptr, nullptr);
}

std::vector<double> forward_train(const Network& net, std::span<const double> input, Rng& rng,
                                  ForwardCache& cache) {
  return run_forward(net, input, &rng, &cache);
}

std::vector<double> forward_train_no_dropout(const Network& net, std::span<const double> input,
                                             ForwardCache& cache) {
  return run_forward(net, input, nullptr, &cache);
}

Gradients zero_gradients(const Network& net) {
  Gradients grads;
  grads.reserve(net.layers().size());
  for (const auto& layer : net.layers()) grads.emplace_back(layer.inputs(), layer.outputs());
  return grads;
}

void backward_accumulate(const Network& net, const ForwardCache& cache, std::size_t target,
                         Gradients& grads, double scale) {
  const auto& layers = net.layers();
  if (cache.empty() || cache.layer_inputs.size() != layers.size() ||
      cache.pre_activations.size() + 1 != layers.size())
    throw Error(ErrorKind::kMissingCache, "backward requires a cached training forward pass");
  if (target >= net.output_size())
    throw Error(ErrorKind::kInvalidArgument, "target class outside output range");
  if (grads.size() != layers.size())
    throw Error(ErrorKind::kShapeMismatch, "gradient buffer does not match network");

  // d loss / d logits for softmax + cross-entropy.
  std::vector<double> delta = cache.probs;
  delta[target] -= 1.0;

  for (std::size_t l = layers.size(); l-- > 0;) {
    const DenseLayer& layer = layers[l];
    DenseLayer& grad = grads[l];
    const auto& in = cache.layer_inputs[l];
    const std::size_t n_in = layer.inputs();
    for (std::size_t o = 0; o < layer.outputs(); ++o) {
      const double d = delta[o] * scale;
      if (d == 0.0) continue;
      double* gw = grad.weights.data().data() + o * n_in;
      for (std::size_t i = 0; i < n_in; ++i) gw[i] += d * in[i];
      grad.bias[o] += d;
    }
    if (l == 0) break;

    // Back through dense, dropout and ReLU of the previous hidden layer.
    std::vector<double> upstream(n_in, 0.0);
    for (std::size_t o = 0; o < layer.outputs(); ++o) {
      const double d = delta[o];
      if (d == 0.0) continue;
      const double* w = layer.weights.data().data() + o * n_in;
      for (std::size_t i = 0; i < n_in; ++i) upstream[i] += w[i] * d;
    }
    const auto& pre = cache.pre_activations[l - 1];
    const auto& scales = cache.dropout_scales[l - 1];
    for (std::size_t i = 0; i < n_in; ++i) upstream[i] *= pre[i] > 0.0 ? scales[i] : 0.0;
    delta = std::move(upstream);
  }
}

Gradients backward(const Network& net, const ForwardCache& cache, std::size_t target) {
  Gradients grads = zero_gradients(net);
  backward_accumulate(net, cache, target, grads);
  return grads;
}

AdamState AdamState::for_network(const Network& net, AdamOptions options) {
  AdamState state;
  state.options = options;
  state.m = zero_gradients(net);
  state.v = zero_gradients(net);
  return state;
}

void adam_update(std::span<double> params, std::span<const double> grads, std::span<double> m,
                 std::span<double> v, std::uint64_t step, const AdamOptions& options) {
  if (grads.size() != params.size() || m.size() != params.size() || v.size() != params.size())
    throw Error(ErrorKind::kShapeMismatch, "Adam buffers disagree in size");
  if (step == 0) throw Error(ErrorKind::kInvalidArgument, "Adam step counter starts at 1");
  const double b1 = options.beta1;
  const double b2 = options.beta2;
  const double correction1 = 1.0 - std::pow(b1, static_cast<double>(step));
  const double correction2 = 1.0 - std::pow(b2, static_cast<double>(step));
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double g = grads[i];
    m[i] = b1 * m[i] + (1.0 - b1) * g;
    v[i] = b2 * v[i] + (1.0 - b2) * g * g;
    const double m_hat = m[i] / correction1;
    const double v_hat = v[i] / correction2;
    params[i] -= options.learning_rate * m_hat / (std::sqrt(v_hat) + options.epsilon);
  }
}

void adam_step(AdamState& state, Network& net, const Gradients& grads) {
  auto& layers = net.layers();
  if (grads.size() != layers.size() || state.m.size() != layers.size() ||
      state.v.size() != layers.size())
    throw Error(ErrorKind::kShapeMismatch, "Adam state does not match network");
  for (const auto& g : grads)
    if (!all_finite(g.weights.data()) || !all_finite(g.bias))
      throw Error(ErrorKind::kNonFinite, "non-finite gradient");

  ++state.step;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    adam_update(layers[l].weights.data(), grads[l].weights.data(), state.m[l].weights.data(),
                state.v[l].weights.data(), state.step, state.options);
    adam_update(layers[l].bias, grads[l].bias, state.m[l].bias, state.v[l].bias, state.step,
                state.options);
  }
}

std::string model_to_json(const Network& net) {
  nlohmann::ordered_json doc;
  doc["format"] = kFormatName;
  doc["version"] = kModelFormatVersion;
  doc["model_id"] = net.model_id();
  doc["layer_sizes"] = net.config().layer_sizes;
  doc["hidden_activation"] = "relu";
  doc["output_activation"] = "softmax";
  doc["dropout_rate"] = net.config().dropout_rate;
  doc["labels"] = net.labels();
  auto layers = nlohmann::ordered_json::array();
  for (const auto& layer : net.layers()) {
    auto weights = nlohmann::ordered_json::array();
    for (std::size_t o = 0; o < layer.outputs(); ++o) {
      auto row = layer.weights.row(o);
      weights.push_back(std::vector<double>(row.begin(), row.end()));
    }
    layers.push_back({{"weights", std::move(weights)}, {"bias", layer.bias}});
  }
  doc["layers"] = std::move(layers);
  return doc.dump();
}

Network model_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kCorruptFile, std::string("model file is not valid JSON: ") + e.what());
  }
  try {
    if (!doc.is_object() || doc.value("format", "") != kFormatName)
      throw Error(ErrorKind::kCorruptFile, "not a birdsong model file");
    const int version = doc.at("version").get<int>();
    if (version != kModelFormatVersion)
      throw Error(ErrorKind::kVersionMismatch,
                  "model format version " + std::to_string(version) + ", expected " +
                      std::to_string(kModelFormatVersion));
    if (doc.at("hidden_activation") != "relu" || doc.at("output_activation") != "softmax")
      throw Error(ErrorKind::kCorruptFile, "unsupported activation functions");

    ModelConfig config;
    config.layer_sizes = doc.at("layer_sizes").get<std::vector<std::size_t>>();
    config.dropout_rate = doc.at("dropout_rate").get<double>();
    try {
      config.validate();
    } catch (const Error& e) {
      throw Error(ErrorKind::kCorruptFile, e.what());
    }

    const auto& jlayers = doc.at("layers");
    if (!jlayers.is_array() || jlayers.size() + 1 != config.layer_sizes.size())
      throw Error(ErrorKind::kShapeMismatch, "layer count disagrees with layer_sizes");
    std::vector<DenseLayer> layers;
    for (std::size_t l = 0; l < jlayers.size(); ++l) {
      const std::size_t n_in = config.layer_sizes[l];
      const std::size_t n_out = config.layer_sizes[l + 1];
      const auto& jw = jlayers[l].at("weights");
      const auto& jb = jlayers[l].at("bias");
      if (!jw.is_array() || jw.size() != n_out || !jb.is_array() || jb.size() != n_out)
        throw Error(ErrorKind::kShapeMismatch,
                    "layer " + std::to_string(l) + " weight/bias array has wrong length");
      DenseLayer layer(n_in, n_out);
      for (std::size_t o = 0; o < n_out; ++o) {
        const auto& jrow = jw[o];
        if (!jrow.is_array() || jrow.size() != n_in)
          throw Error(ErrorKind::kShapeMismatch, "layer " + std::to_string(l) + " row " +
                                                     std::to_string(o) + " has wrong length");
        for (std::size_t i = 0; i < n_in; ++i) layer.weights(o, i) = jrow[i].get<double>();
        layer.bias[o] = jb[o].get<double>();
      }
      layers.push_back(std::move(layer));
    }
    auto labels = doc.value("labels", std::vector<std::string>{});
    return Network(config, std::move(layers), std::move(labels));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kCorruptFile, std::string("malformed model file: ") + e.what());
  }
}

void save_model(const Network& net, const std::filesystem::path& path) {
  detail::write_file_text(path, model_to_json(net));
}

Network load_model(const std::filesystem::path& path) {
  return model_from_json(detail::read_file_text(path));
}

}  // namespace birdsong
