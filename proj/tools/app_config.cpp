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

#include "app_config.hpp"

#include <fstream>
#include <functional>
#include <map>
#include <nlohmann/json.hpp>
#include <sstream>

#include "birdsong/error.hpp"

namespace birdsong::cli {
namespace {

using json = nlohmann::json;
using Setter = std::function<void(const json&)>;

void apply_section(const json& section, const std::string& name,
                   const std::map<std::string, Setter>& setters) {
  if (!section.is_object()) throw ConfigError("config section '" + name + "' must be an object");
  for (const auto& [key, value] : section.items()) {
    auto it = setters.find(key);
    if (it == setters.end()) throw ConfigError("unknown config key '" + name + "." + key + "'");
    try {
      it->second(value);
    } catch (const json::exception&) {
      throw ConfigError("config key '" + name + "." + key + "' has the wrong type");
    }
  }
}

}  // namespace

ModelConfig AppConfig::model_config(std::size_t n_inputs, std::size_t n_classes) const {
  ModelConfig mc;
  mc.layer_sizes.clear();
  mc.layer_sizes.push_back(n_inputs);
  mc.layer_sizes.insert(mc.layer_sizes.end(), hidden_layers.begin(), hidden_layers.end());
  mc.layer_sizes.push_back(n_classes);
  mc.dropout_rate = dropout_rate;
  return mc;
}

void AppConfig::validate() const {
  try {
    features.validate();
    training.validate();
    PipelineConfig p = pipeline;
    p.features = features;
    p.validate();
    model_config(features.n_mfcc, 2).validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  if (server.port < 0 || server.port > 65535) throw ConfigError("server.port must be in [0, 65535]");
}

AppConfig parse_app_config(const std::string& json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");

  AppConfig cfg;
  for (const auto& [name, section] : doc.items()) {
    if (name == "features") {
      try {
        cfg.features = feature_config_from_json(section.dump(), cfg.features);
      } catch (const Error& e) {
        throw ConfigError(std::string("features: ") + e.what());
      }
    } else if (name == "model") {
      apply_section(section, name,
                    {{"hidden_layers",
                      [&](const json& v) { cfg.hidden_layers = v.get<std::vector<std::size_t>>(); }},
                     {"dropout_rate", [&](const json& v) { cfg.dropout_rate = v.get<double>(); }}});
    } else if (name == "training") {
      auto& t = cfg.training;
      apply_section(section, name,
                    {{"epochs", [&](const json& v) { t.epochs = v.get<std::size_t>(); }},
                     {"batch_size", [&](const json& v) { t.batch_size = v.get<std::size_t>(); }},
                     {"test_fraction", [&](const json& v) { t.test_fraction = v.get<double>(); }},
                     {"seed", [&](const json& v) { t.seed = v.get<std::uint64_t>(); }},
                     {"shuffle", [&](const json& v) { t.shuffle = v.get<bool>(); }},
                     {"learning_rate", [&](const json& v) { t.adam.learning_rate = v.get<double>(); }},
                     {"beta1", [&](const json& v) { t.adam.beta1 = v.get<double>(); }},
                     {"beta2", [&](const json& v) { t.adam.beta2 = v.get<double>(); }},
                     {"epsilon", [&](const json& v) { t.adam.epsilon = v.get<double>(); }}});
    } else if (name == "pipeline") {
      auto& p = cfg.pipeline;
      apply_section(section, name,
                    {{"window_seconds", [&](const json& v) { p.window_seconds = v.get<double>(); }},
                     {"min_tail_seconds", [&](const json& v) { p.min_tail_seconds = v.get<double>(); }},
                     {"confidence_threshold",
                      [&](const json& v) { p.confidence_threshold = v.get<double>(); }}});
    } else if (name == "server") {
      apply_section(section, name,
                    {{"host", [&](const json& v) { cfg.server.host = v.get<std::string>(); }},
                     {"port", [&](const json& v) { cfg.server.port = v.get<int>(); }}});
    } else if (name == "paths") {
      apply_section(section, name,
                    {{"model", [&](const json& v) { cfg.model_path = v.get<std::string>(); }}});
    } else {
      throw ConfigError("unknown config section '" + name + "'");
    }
  }
  cfg.validate();
  return cfg;
}

AppConfig load_app_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_app_config(buf.str());
}

}  // namespace birdsong::cli
