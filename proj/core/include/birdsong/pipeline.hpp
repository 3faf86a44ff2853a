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

// Windowed inference over long recordings and detection reports.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "birdsong/audio_io.hpp"
#include "birdsong/mfcc.hpp"
#include "birdsong/nn.hpp"
#include "birdsong/train_eval.hpp"

namespace birdsong {

struct PipelineConfig {
  double window_seconds = 15.0;
  double min_tail_seconds = 3.0;
  double confidence_threshold = 0.5;
  FeatureConfig features;
  std::string model_path;

  void validate() const;
};

struct Detection {
  std::string source;
  std::size_t window = 0;
  double start_s = 0.0;
  double end_s = 0.0;
  std::string label;
  double confidence = 0.0;  // max of probs
  std::vector<double> probs;
};

struct LabelSummary {
  std::string label;
  std::size_t count = 0;
  double mean_confidence = 0.0;
};

struct Report {
  std::string source;
  std::string model_id;
  PipelineConfig config;
  std::vector<Detection> detections;
  std::vector<LabelSummary> summary;  // sorted by label
};

/// JSON object with the FeatureConfig fields. Parsing starts from defaults,
/// rejects unknown keys and wrong types (kInvalidArgument) and validates.
std::string feature_config_to_json(const FeatureConfig& config);
FeatureConfig feature_config_from_json(const std::string& text, FeatureConfig base = {});

/// A trained network plus the feature settings it was trained on. Stored as
/// the model JSON with an extra "features" object.
struct Classifier {
  Network net;
  FeatureConfig features;
};

void save_classifier(const std::filesystem::path& path, const Network& net,
                     const FeatureConfig& features);
/// Loads a model file; when the "features" object is absent the defaults
/// are used.
Classifier load_classifier(const std::filesystem::path& path);

/// Reads a manifest's clips and computes one clip-level feature vector per
/// entry, in manifest order.
FeatureTable featurize_manifest(const DatasetManifest& manifest, const FeatureConfig& config);

/// Resample -> segment -> per window MFCC mean -> inference. Windows whose
/// top probability is below the threshold produce no detection.
std::vector<Detection> classify_clip(const AudioClip& clip, const std::string& source,
                                     const Network& net, const PipelineConfig& config);
std::vector<Detection> classify_recording(const std::filesystem::path& audio_path,
                                          const Network& net, const PipelineConfig& config);

/// Groups by label: count and mean confidence. Confidences are summed in
/// sorted order so the result does not depend on detection order.
std::vector<LabelSummary> summarize(std::span<const Detection> detections);

Report make_report(std::string source, const Network& net, const PipelineConfig& config,
                   std::vector<Detection> detections);

/// Full pipeline from in-memory WAV bytes to a report; the CLI and the HTTP
/// service both go through here.
Report classify_wav_bytes(std::span<const std::uint8_t> wav, const std::string& source,
                          const Network& net, const PipelineConfig& config);

std::string report_to_json(const Report& report);
std::string report_to_csv(const Report& report);

}  // namespace birdsong
