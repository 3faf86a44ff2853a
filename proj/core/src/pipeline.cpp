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

#include "birdsong/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <nlohmann/json.hpp>
#include <sstream>

#include "birdsong/error.hpp"
#include "file_util.hpp"

namespace birdsong {
namespace {

std::string label_for(const Network& net, std::size_t index) {
  if (index < net.labels().size()) return net.labels()[index];
  return "class_" + std::to_string(index);
}

std::string shortest(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return {buf, end};
}

std::string csv_field(const std::string& v) {
  if (v.find_first_of(",\"\r\n") == std::string::npos) return v;
  std::string out = "\"";
  for (char c : v) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void check_compatible(const Network& net, const FeatureConfig& features) {
  if (net.input_size() != features.n_mfcc)
    throw Error(ErrorKind::kShapeMismatch,
                "model expects " + std::to_string(net.input_size()) +
                    " features but the feature config produces " + std::to_string(features.n_mfcc));
}

std::vector<Detection> classify_with(const AudioClip& clip, const std::string& source,
                                     const Network& net, const PipelineConfig& config,
                                     const MfccExtractor& extractor) {
  const AudioClip prepared = resample(clip, extractor.sample_rate_hz());
  std::vector<Detection> detections;
  for (const Segment& window :
       segment(prepared, config.window_seconds, config.min_tail_seconds)) {
    const FeatureVector features = clip_features(window.clip, extractor);
    auto probs = infer(net, features.coeffs);
    const auto best = static_cast<std::size_t>(
        std::max_element(probs.begin(), probs.end()) - probs.begin());
    if (probs[best] < config.confidence_threshold) continue;
    Detection d;
    d.source = source;
    d.window = window.index;
    d.start_s = window.start_seconds;
    d.end_s = window.end_seconds;
    d.label = label_for(net, best);
    d.confidence = probs[best];
    d.probs = std::move(probs);
    detections.push_back(std::move(d));
  }
  return detections;
}

nlohmann::ordered_json features_json(const FeatureConfig& c) {
  nlohmann::ordered_json j;
  j["n_mfcc"] = c.n_mfcc;
  j["n_mels"] = c.n_mels;
  j["frame_ms"] = c.frame_ms;
  j["hop_ms"] = c.hop_ms;
  j["f_min_hz"] = c.f_min_hz;
  j["f_max_hz"] = c.f_max_hz ? nlohmann::ordered_json(*c.f_max_hz) : nlohmann::ordered_json(nullptr);
  j["mel_constant"] = c.mel_constant;
  j["sample_rate_hz"] = c.sample_rate_hz;
  j["clip_seconds"] = c.clip_seconds;
  return j;
}

}  // namespace

std::string feature_config_to_json(const FeatureConfig& config) {
  return features_json(config).dump(2);
}

FeatureConfig feature_config_from_json(const std::string& text, FeatureConfig base) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorKind::kInvalidArgument, std::string("feature config is not JSON: ") + e.what());
  }
  if (!j.is_object()) throw Error(ErrorKind::kInvalidArgument, "feature config must be an object");
  FeatureConfig c = base;
  for (const auto& [key, value] : j.items()) {
    try {
      if (key == "n_mfcc") c.n_mfcc = value.get<std::size_t>();
      else if (key == "n_mels") c.n_mels = value.get<std::size_t>();
      else if (key == "frame_ms") c.frame_ms = value.get<double>();
      else if (key == "hop_ms") c.hop_ms = value.get<double>();
      else if (key == "f_min_hz") c.f_min_hz = value.get<double>();
      else if (key == "f_max_hz")
        c.f_max_hz = value.is_null() ? std::nullopt : std::optional<double>(value.get<double>());
      else if (key == "mel_constant") c.mel_constant = value.get<double>();
      else if (key == "sample_rate_hz") c.sample_rate_hz = value.get<int>();
      else if (key == "clip_seconds") c.clip_seconds = value.get<double>();
      else throw Error(ErrorKind::kInvalidArgument, "unknown feature setting '" + key + "'");
    } catch (const nlohmann::json::exception&) {
      throw Error(ErrorKind::kInvalidArgument, "feature setting '" + key + "' has the wrong type");
    }
  }
  c.validate();
  return c;
}

void save_classifier(const std::filesystem::path& path, const Network& net,
                     const FeatureConfig& features) {
  auto doc = nlohmann::ordered_json::parse(model_to_json(net));
  doc["features"] = features_json(features);
  detail::write_file_text(path, doc.dump());
}

Classifier load_classifier(const std::filesystem::path& path) {
  const std::string text = detail::read_file_text(path);
  Classifier out{model_from_json(text), FeatureConfig{}};
  auto doc = nlohmann::json::parse(text);
  if (doc.contains("features")) out.features = feature_config_from_json(doc["features"].dump());
  return out;
}

void PipelineConfig::validate() const {
  if (!(window_seconds > 0.0)) throw Error(ErrorKind::kInvalidArgument, "window_seconds must be positive");
  if (min_tail_seconds < 0.0)
    throw Error(ErrorKind::kInvalidArgument, "min_tail_seconds must be non-negative");
  if (!(confidence_threshold >= 0.0 && confidence_threshold < 1.0))
    throw Error(ErrorKind::kInvalidArgument, "confidence_threshold must be in [0, 1)");
  features.validate();
}

FeatureTable featurize_manifest(const DatasetManifest& manifest, const FeatureConfig& config) {
  config.validate();
  const MfccExtractor extractor(config, config.sample_rate_hz);
  FeatureTable table;
  table.label_names = manifest.labels;
  for (const auto& entry : manifest.entries) {
    const auto path = manifest.resolve(entry);
    AudioClip clip;
    try {
      clip = load_clip(path);
    } catch (const Error& e) {
      throw Error(e.kind(), path.string() + ": " + e.what());
    }
    table.ids.push_back(entry.path);
    table.labels.push_back(manifest.label_index(entry.label));
    table.features.push_back(clip_features(clip, extractor));
  }
  return table;
}

std::vector<Detection> classify_clip(const AudioClip& clip, const std::string& source,
                                     const Network& net, const PipelineConfig& config) {
  config.validate();
  check_compatible(net, config.features);
  const MfccExtractor extractor(config.features, config.features.sample_rate_hz);
  return classify_with(clip, source, net, config, extractor);
}

std::vector<Detection> classify_recording(const std::filesystem::path& audio_path,
                                          const Network& net, const PipelineConfig& config) {
  return classify_clip(load_clip(audio_path), audio_path.filename().string(), net, config);
}

std::vector<LabelSummary> summarize(std::span<const Detection> detections) {
  std::map<std::string, std::vector<double>> grouped;
  for (const auto& d : detections) grouped[d.label].push_back(d.confidence);
  std::vector<LabelSummary> out;
  for (auto& [label, confidences] : grouped) {
    std::sort(confidences.begin(), confidences.end());
    double sum = 0.0;
    for (double c : confidences) sum += c;
    out.push_back({label, confidences.size(), sum / static_cast<double>(confidences.size())});
  }
  return out;
}

Report make_report(std::string source, const Network& net, const PipelineConfig& config,
                   std::vector<Detection> detections) {
  Report report;
  report.source = std::move(source);
  report.model_id = net.model_id();
  report.config = config;
  report.summary = summarize(detections);
  report.detections = std::move(detections);
  return report;
}

Report classify_wav_bytes(std::span<const std::uint8_t> wav, const std::string& source,
                          const Network& net, const PipelineConfig& config) {
  AudioClip clip = decode_clip(wav);
  return make_report(source, net, config, classify_clip(clip, source, net, config));
}

std::string report_to_json(const Report& report) {
  nlohmann::ordered_json doc;
  doc["source"] = report.source;
  doc["model_id"] = report.model_id;
  const auto& cfg = report.config;
  doc["config"] = {{"sample_rate_hz", cfg.features.sample_rate_hz},
                   {"window_seconds", cfg.window_seconds},
                   {"min_tail_seconds", cfg.min_tail_seconds},
                   {"confidence_threshold", cfg.confidence_threshold},
                   {"n_mfcc", cfg.features.n_mfcc},
                   {"n_mels", cfg.features.n_mels},
                   {"frame_ms", cfg.features.frame_ms},
                   {"hop_ms", cfg.features.hop_ms},
                   {"model_id", report.model_id}};
  auto detections = nlohmann::ordered_json::array();
  for (const auto& d : report.detections) {
    detections.push_back({{"window", d.window},
                          {"start_s", d.start_s},
                          {"end_s", d.end_s},
                          {"label", d.label},
                          {"confidence", d.confidence},
                          {"probs", d.probs}});
  }
  doc["detections"] = std::move(detections);
  auto summary = nlohmann::ordered_json::array();
  for (const auto& s : report.summary)
    summary.push_back({{"label", s.label}, {"count", s.count}, {"mean_confidence", s.mean_confidence}});
  doc["summary"] = std::move(summary);
  return doc.dump(2) + "\n";
}

std::string report_to_csv(const Report& report) {
  std::ostringstream out;
  out << "source,window,start_s,end_s,label,confidence";
  const std::size_t n_probs = report.detections.empty() ? 0 : report.detections.front().probs.size();
  for (std::size_t i = 0; i < n_probs; ++i) out << ",p" << i;
  out << '\n';
  for (const auto& d : report.detections) {
    out << csv_field(report.source) << ',' << d.window << ',' << shortest(d.start_s) << ','
        << shortest(d.end_s) << ',' << csv_field(d.label) << ',' << shortest(d.confidence);
    for (double p : d.probs) out << ',' << shortest(p);
    out << '\n';
  }
  return out.str();
}

}  // namespace birdsong
