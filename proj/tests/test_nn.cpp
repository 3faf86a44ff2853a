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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <nlohmann/json.hpp>
#include <numeric>

#include "birdsong/error.hpp"
#include "birdsong/nn.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace birdsong {
namespace {

Network small_net(std::vector<std::size_t> sizes, std::uint64_t seed, double dropout = 0.5) {
  Rng rng(seed);
  ModelConfig cfg;
  cfg.layer_sizes = std::move(sizes);
  cfg.dropout_rate = dropout;
  return Network::initialize(cfg, rng);
}

std::vector<double> random_input(Rng& rng, std::size_t n) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> x(n);
  for (auto& v : x) v = g(rng);
  return x;
}

ErrorKind load_error(const std::string& text) {
  try {
    model_from_json(text);
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "model_from_json accepted bad input";
  return ErrorKind::kInvalidArgument;
}

TEST(Network, PaperParameterCount) {
  Network net = small_net({80, 256, 256, 256, 5}, 1);
  ASSERT_EQ(net.layers().size(), 4u);
  EXPECT_EQ(net.layers()[0].parameter_count(), 20736u);
  EXPECT_EQ(net.layers()[1].parameter_count(), 65792u);
  EXPECT_EQ(net.layers()[2].parameter_count(), 65792u);
  EXPECT_EQ(net.layers()[3].parameter_count(), 1285u);
  EXPECT_EQ(net.parameter_count(), 153605u);
  const std::vector<std::size_t> sizes{80, 256, 256, 256, 5};
  EXPECT_EQ(parameter_count(sizes), 153605u);
  EXPECT_EQ(ModelConfig{}.layer_sizes, sizes);
}

TEST(Network, GlorotInitAndZeroBias) {
  Network net = small_net({80, 256, 256, 256, 5}, 2);
  for (const auto& layer : net.layers()) {
    const double limit = std::sqrt(6.0 / (layer.inputs() + layer.outputs()));
    for (double w : layer.weights.data()) EXPECT_LE(std::abs(w), limit);
    for (double b : layer.bias) EXPECT_EQ(b, 0.0);
  }
  EXPECT_EQ(small_net({4, 8, 3}, 7), small_net({4, 8, 3}, 7));
  EXPECT_NE(small_net({4, 8, 3}, 7), small_net({4, 8, 3}, 8));
}

TEST(Network, ConfigValidation) {
  ModelConfig bad;
  bad.dropout_rate = 1.0;
  EXPECT_THROW(bad.validate(), Error);
  ModelConfig shallow;
  shallow.layer_sizes = {4};
  EXPECT_THROW(shallow.validate(), Error);
}

TEST(Activations, Relu) {
  EXPECT_EQ(relu(-3.0), 0.0);
  EXPECT_EQ(relu(5.0), 5.0);
  EXPECT_EQ(relu(0.0), 0.0);
  std::vector<double> v{-1, 2, -0.5, 0};
  relu_in_place(v);
  EXPECT_EQ(v, (std::vector<double>{0, 2, 0, 0}));
}

TEST(Activations, Softmax) {
  for (double p : softmax(std::vector<double>(5, 0.0))) EXPECT_NEAR(p, 0.2, 1e-15);
  const double peaked = softmax(std::vector<double>{10, 0, 0, 0, 0})[0];
  EXPECT_NEAR(peaked, 1.0 / (1.0 + 4.0 * std::exp(-10.0)), 1e-15);
  EXPECT_GT(peaked, 0.9998);

  const std::vector<double> x{1.5, -2.0, 0.3, 7.0, 7.5};
  auto p = softmax(x);
  std::vector<double> shifted(x);
  for (auto& v : shifted) v += 1000.0;
  auto q = softmax(shifted);
  for (std::size_t i = 0; i < x.size(); ++i) EXPECT_NEAR(p[i], q[i], 1e-12);
  EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-12);
  EXPECT_EQ(std::max_element(p.begin(), p.end()) - p.begin(), 4);
  EXPECT_LT(p[1], p[2]);
}

TEST(Loss, CrossEntropy) {
  const std::vector<double> uniform(5, 0.2);
  EXPECT_NEAR(cross_entropy(uniform, 3), std::log(5.0), 1e-12);
  const std::vector<double> perfect{0, 1, 0};
  EXPECT_LE(cross_entropy(perfect, std::vector<double>{0, 1, 0}), 1e-12);
  EXPECT_NEAR(cross_entropy(perfect, 0), std::log(1e12), 1e-9);
  EXPECT_THROW(cross_entropy(perfect, std::vector<double>{1, 0}), Error);
  EXPECT_THROW(cross_entropy(perfect, 3), Error);
}

TEST(Forward, InferenceIsAProbabilityVectorAndPure) {
  Network net = small_net({80, 256, 256, 256, 5}, 3);
  Rng rng(4);
  auto x = random_input(rng, 80);
  auto p = infer(net, x);
  ASSERT_EQ(p.size(), 5u);
  EXPECT_NEAR(std::accumulate(p.begin(), p.end(), 0.0), 1.0, 1e-12);
  for (double v : p) {
    EXPECT_GT(v, 0.0);
    EXPECT_LT(v, 1.0);
  }
  EXPECT_EQ(infer(net, x), p);
  EXPECT_THROW(infer(net, std::vector<double>(79, 0.0)), Error);
}

TEST(Forward, DropoutPreservesExpectation) {
  Network net = small_net({6, 32, 3}, 5);
  Rng rng(6);
  auto x = random_input(rng, 6);
  ForwardCache cache;
  forward_train_no_dropout(net, x, cache);
  std::vector<double> deterministic = cache.layer_inputs[1];

  const int trials = 20000;
  std::vector<double> mean(deterministic.size(), 0.0);
  for (int t = 0; t < trials; ++t) {
    forward_train(net, x, rng, cache);
    for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += cache.layer_inputs[1][i] / trials;
    for (double s : cache.dropout_scales[0]) EXPECT_TRUE(s == 0.0 || s == 2.0);
  }
  double det_sum = 0.0, mean_sum = 0.0;
  for (std::size_t i = 0; i < mean.size(); ++i) {
    det_sum += deterministic[i];
    mean_sum += mean[i];
  }
  ASSERT_GT(det_sum, 0.0);
  EXPECT_LT(std::abs(mean_sum - det_sum) / det_sum, 0.02);
}

TEST(Backward, OutputGradientIsProbsMinusTarget) {
  Network net = small_net({4, 8, 3}, 9);
  Rng rng(10);
  auto x = random_input(rng, 4);
  ForwardCache cache;
  auto probs = forward_train_no_dropout(net, x, cache);
  Gradients g = backward(net, cache, 1);
  // Bias gradient of the output layer is exactly dL/dz.
  for (std::size_t k = 0; k < 3; ++k)
    EXPECT_NEAR(g.back().bias[k], probs[k] - (k == 1 ? 1.0 : 0.0), 1e-15);
}

TEST(Backward, DeadUnitHasZeroIncomingGradient) {
  Network net = small_net({4, 8, 3}, 11);
  Rng rng(12);
  auto x = random_input(rng, 4);
  ForwardCache cache;
  forward_train_no_dropout(net, x, cache);
  Gradients g = backward(net, cache, 0);
  bool saw_dead = false;
  for (std::size_t u = 0; u < 8; ++u) {
    if (cache.pre_activations[0][u] >= 0.0) continue;
    saw_dead = true;
    for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(g[0].weights(u, i), 0.0);
    EXPECT_EQ(g[0].bias[u], 0.0);
  }
  EXPECT_TRUE(saw_dead);
}

TEST(Backward, MatchesFiniteDifferences) {
  Rng rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    Network net = small_net({4, 8, 3}, 100 + trial);
    auto x = random_input(rng, 4);
    const std::size_t target = static_cast<std::size_t>(trial % 3);
    ForwardCache cache;
    forward_train_no_dropout(net, x, cache);
    Gradients analytic = backward(net, cache, target);
    Gradients numeric = oracle::finite_difference_gradients(net, x, target);
    EXPECT_LT(oracle::max_relative_error(analytic, numeric), 1e-4) << "trial " << trial;
  }
}

TEST(Backward, ReusesDropoutMaskAndNeedsCache) {
  Network net = small_net({4, 8, 3}, 14);
  Rng rng(15);
  auto x = random_input(rng, 4);
  ForwardCache cache;
  forward_train(net, x, rng, cache);
  Gradients g = backward(net, cache, 2);
  for (std::size_t u = 0; u < 8; ++u)
    if (cache.dropout_scales[0][u] == 0.0)
      for (std::size_t i = 0; i < 4; ++i) EXPECT_EQ(g[0].weights(u, i), 0.0);

  EXPECT_THROW(backward(net, ForwardCache{}, 0), Error);
}

TEST(Adam, FirstStepMovesByLearningRate) {
  std::vector<double> p{1.0, -2.0}, g{1.0, 1.0}, m(2, 0.0), v(2, 0.0);
  AdamOptions opt;
  adam_update(p, g, m, v, 1, opt);
  EXPECT_NEAR(p[0], 1.0 - 0.001 / (1.0 + 1e-8), 1e-15);
  EXPECT_NEAR(p[1], -2.0 - 0.001 / (1.0 + 1e-8), 1e-15);
  EXPECT_NEAR(m[0], 0.1, 1e-15);
  EXPECT_NEAR(v[0], 0.001, 1e-15);
}

TEST(Adam, ZeroGradientLeavesParameters) {
  Network net = small_net({4, 8, 3}, 16);
  Network before = net;
  AdamState state = AdamState::for_network(net);
  adam_step(state, net, zero_gradients(net));
  EXPECT_EQ(state.step, 1u);
  EXPECT_EQ(net, before);
}

TEST(Adam, RejectsNonFiniteWithoutMutating) {
  Network net = small_net({4, 8, 3}, 17);
  Network before = net;
  AdamState state = AdamState::for_network(net);
  Gradients g = zero_gradients(net);
  g[1].bias[0] = std::numeric_limits<double>::quiet_NaN();
  try {
    adam_step(state, net, g);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kNonFinite);
  }
  EXPECT_EQ(net, before);
  EXPECT_EQ(state.step, 0u);
}

TEST(Adam, DeterministicTrajectories) {
  auto run = [] {
    Network net = small_net({4, 8, 3}, 18);
    AdamState state = AdamState::for_network(net);
    Rng rng(19);
    for (int step = 0; step < 50; ++step) {
      auto x = random_input(rng, 4);
      ForwardCache cache;
      forward_train(net, x, rng, cache);
      adam_step(state, net, backward(net, cache, step % 3));
    }
    return net;
  };
  EXPECT_EQ(run(), run());
}

TEST(ModelFile, RoundTripIsExact) {
  testing::TempDir dir;
  Network net = small_net({80, 256, 256, 256, 5}, 20);
  net.set_labels({"a", "b", "c", "d", "e"});
  save_model(net, dir / "m.json");
  Network back = load_model(dir / "m.json");
  EXPECT_EQ(back, net);
  EXPECT_EQ(back.model_id(), net.model_id());
  EXPECT_EQ(back.parameter_count(), 153605u);

  auto doc = nlohmann::json::parse(testing::read_text(dir / "m.json"));
  EXPECT_EQ(doc["version"], kModelFormatVersion);
  EXPECT_EQ(doc["hidden_activation"], "relu");
  EXPECT_EQ(doc["output_activation"], "softmax");
  EXPECT_EQ(doc["dropout_rate"], 0.5);
  EXPECT_EQ(doc["layer_sizes"], nlohmann::json({80, 256, 256, 256, 5}));
}

TEST(ModelFile, Errors) {
  Network net = small_net({4, 8, 3}, 21);
  auto doc = nlohmann::json::parse(model_to_json(net));

  auto versioned = doc;
  versioned["version"] = 99;
  EXPECT_EQ(load_error(versioned.dump()), ErrorKind::kVersionMismatch);

  auto truncated = doc;
  truncated["layers"][0]["weights"][0].erase(0);
  EXPECT_EQ(load_error(truncated.dump()), ErrorKind::kShapeMismatch);

  auto short_bias = doc;
  short_bias["layers"][1]["bias"].erase(0);
  EXPECT_EQ(load_error(short_bias.dump()), ErrorKind::kShapeMismatch);

  const std::string text = model_to_json(net);
  EXPECT_EQ(load_error(text.substr(0, text.size() / 2)), ErrorKind::kCorruptFile);
  EXPECT_EQ(load_error("[]"), ErrorKind::kCorruptFile);

  testing::TempDir dir;
  EXPECT_THROW(load_model(dir / "absent.json"), Error);
}

TEST(ModelFile, IdTracksContent) {
  Network a = small_net({4, 8, 3}, 22);
  Network b = a;
  EXPECT_EQ(a.model_id(), b.model_id());
  b.layers()[0].bias[0] = 1e-9;
  EXPECT_NE(a.model_id(), b.model_id());
  EXPECT_EQ(a.model_id().rfind("mlp-", 0), 0u);
}

}  // namespace
}  // namespace birdsong
