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

// Application configuration: built-in defaults, overlaid by an optional JSON
// file, overlaid by command-line flags.
//
// {
//   "features": { "n_mfcc": 80, "n_mels": 128, "frame_ms": 40, "hop_ms": 20,
//                 "f_min_hz": 0, "f_max_hz": null, "mel_constant": 2595,
//                 "sample_rate_hz": 44100, "clip_seconds": 15 },
//   "model":    { "hidden_layers": [256, 256, 256], "dropout_rate": 0.5 },
//   "training": { "epochs": 100, "batch_size": 32, "test_fraction": 0.1,
//                 "seed": 0, "shuffle": true, "learning_rate": 0.001,
//                 "beta1": 0.9, "beta2": 0.999, "epsilon": 1e-8 },
//   "pipeline": { "window_seconds": 15, "min_tail_seconds": 3,
//                 "confidence_threshold": 0.5 },
//   "server":   { "host": "127.0.0.1", "port": 8080 },
//   "paths":    { "model": "model.json" }
// }
//
// Every section and key is optional; unknown keys are rejected.

#pragma once

#include <cstddef>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "birdsong/mfcc.hpp"
#include "birdsong/nn.hpp"
#include "birdsong/pipeline.hpp"
#include "birdsong/train_eval.hpp"

namespace birdsong::cli {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ServerConfig {
  std::string host = "127.0.0.1";
  int port = 8080;
};

struct AppConfig {
  FeatureConfig features;
  std::vector<std::size_t> hidden_layers{256, 256, 256};
  double dropout_rate = 0.5;
  TrainingConfig training;
  PipelineConfig pipeline;
  ServerConfig server;
  std::string model_path;

  /// Model architecture for a given input dimension and class count.
  ModelConfig model_config(std::size_t n_inputs, std::size_t n_classes) const;

  /// Throws ConfigError when a field is outside its module's range.
  void validate() const;
};

AppConfig parse_app_config(const std::string& json_text);
AppConfig load_app_config(const std::filesystem::path& path);

}  // namespace birdsong::cli
