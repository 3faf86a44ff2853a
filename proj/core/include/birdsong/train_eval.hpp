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

// Datasets, the training loop and classification metrics.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "birdsong/mfcc.hpp"
#include "birdsong/nn.hpp"

namespace birdsong {

struct ManifestEntry {
  std::string path;
  std::string label;
};

/// Clip list loaded from a `path,label` CSV. Relative paths are resolved
/// against `base_dir` (the manifest's directory).
struct DatasetManifest {
  std::vector<ManifestEntry> entries;
  std::vector<std::string> labels;  // first-appearance order
  std::filesystem::path base_dir;

  std::size_t label_index(const std::string& label) const;
  std::filesystem::path resolve(const ManifestEntry& entry) const;
  std::vector<std::size_t> label_indices() const;
};

DatasetManifest load_manifest(const std::filesystem::path& csv_path);
void write_manifest(const std::filesystem::path& csv_path, const DatasetManifest& manifest);

/// Splits a comma-separated line; double-quoted fields may contain commas
/// and "" escapes.
std::vector<std::string> split_csv_line(const std::string& line);

struct TrainingConfig {
  std::size_t epochs = 100;
  std::size_t batch_size = 32;
  double test_fraction = 0.10;
  std::uint64_t seed = 0;
  bool shuffle = true;
  AdamOptions adam;

  void validate() const;
};

struct DatasetSplit {
  std::vector<std::size_t> train;  // ascending indices
  std::vector<std::size_t> test;
};

/// Per class: floor(test_fraction * n_c) items (at least 1) go to test, chosen
/// by a seeded shuffle. Every class needs at least 2 items.
DatasetSplit split_stratified(std::span<const std::size_t> labels, std::size_t n_classes,
                              double test_fraction, std::uint64_t seed);
DatasetSplit split_dataset(const DatasetManifest& manifest, const TrainingConfig& config);

/// One row per clip: id, label, then the feature vector.
struct FeatureTable {
  std::vector<std::string> ids;
  std::vector<std::size_t> labels;
  std::vector<std::string> label_names;
  std::vector<FeatureVector> features;

  std::size_t size() const { return features.size(); }
  std::size_t dimension() const { return features.empty() ? 0 : features.front().size(); }
  FeatureTable subset(std::span<const std::size_t> indices) const;
};

/// CSV with header `id,label,c0..c{d-1}`; numbers written with round-trip
/// precision.
void write_feature_csv(const std::filesystem::path& path, const FeatureTable& table);
FeatureTable read_feature_csv(const std::filesystem::path& path);

struct EpochRecord {
  double train_loss = 0.0;
  double train_accuracy = 0.0;
  double val_loss = 0.0;
  double val_accuracy = 0.0;
};

struct TrainingHistory {
  std::vector<EpochRecord> epochs;
};

struct Evaluation {
  double loss = 0.0;
  double accuracy = 0.0;
  std::vector<std::size_t> predictions;
};

/// Inference-mode loss/accuracy over a table.
Evaluation evaluate(const Network& net, const FeatureTable& table);

using EpochCallback = std::function<void(std::size_t epoch, const EpochRecord&)>;

/// Mini-batch Adam over `train_set` for config.epochs epochs. Train loss and
/// accuracy are averaged over the epoch's training-mode passes; validation
/// figures come from an inference pass over `val_set` at the end of each
/// epoch (NaN when val_set is empty). Throws kNonFinite if the loss diverges.
TrainingHistory train(Network& net, const FeatureTable& train_set, const FeatureTable& val_set,
                      const TrainingConfig& config, const EpochCallback& on_epoch = {});

class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(std::size_t n_classes)
      : n_(n_classes), counts_(n_classes * n_classes, 0) {}

  std::size_t n_classes() const { return n_; }
  std::uint64_t& at(std::size_t truth, std::size_t predicted) { return counts_[truth * n_ + predicted]; }
  std::uint64_t at(std::size_t truth, std::size_t predicted) const {
    return counts_[truth * n_ + predicted];
  }
  std::uint64_t total() const;
  std::uint64_t trace() const;

 private:
  std::size_t n_;
  std::vector<std::uint64_t> counts_;
};

/// Rows = true class, columns = predicted class.
ConfusionMatrix confusion_matrix(std::span<const std::size_t> predicted,
                                 std::span<const std::size_t> truth, std::size_t n_classes);

struct ClassMetrics {
  std::uint64_t tp = 0, fp = 0, tn = 0, fn = 0;
  double sensitivity = 0.0;
  double specificity = 0.0;
  double precision = 0.0;
  double f1 = 0.0;
  bool degenerate = false;  // some ratio was 0/0 and reported as 0
};

struct MetricsReport {
  std::vector<ClassMetrics> classes;
  double accuracy = 0.0;
  std::uint64_t total = 0;
};

/// One-vs-rest sensitivity, specificity, precision and F1 per class.
MetricsReport compute_metrics(const ConfusionMatrix& cm);

/// F1 as the harmonic mean of precision and recall (0 when both are 0).
double f1_score(double precision, double recall);

std::string metrics_to_json(const MetricsReport& report, const ConfusionMatrix& cm,
                            std::span<const std::string> labels);
std::string format_metrics_table(const MetricsReport& report, std::span<const std::string> labels);

/// Writes `csv_path` (epoch,train_loss,val_loss,train_acc,val_acc) and a PNG
/// line plot next to it (same stem, .png extension). Returns the PNG path.
std::filesystem::path export_history(const TrainingHistory& history,
                                     const std::filesystem::path& csv_path);
TrainingHistory read_history_csv(const std::filesystem::path& csv_path);

}  // namespace birdsong
