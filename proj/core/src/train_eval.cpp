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

#include "birdsong/train_eval.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <nlohmann/json.hpp>
#include <numeric>
#include <set>
#include <sstream>

#include "birdsong/error.hpp"
#include "birdsong/image.hpp"
#include "file_util.hpp"

namespace birdsong {
namespace {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return {buf, end};
}

double parse_double(const std::string& s, const std::string& where) {
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size())
    throw Error(ErrorKind::kCorruptFile, "bad number '" + s + "' in " + where);
  return v;
}

std::string trim_ws(std::string s) {
  auto not_space = [](unsigned char c) { return !std::isspace(c); };
  s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
  s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
  return s;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + path.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
  }
  return lines;
}

double safe_ratio(std::uint64_t num, std::uint64_t den, bool& degenerate) {
  if (den == 0) {
    degenerate = true;
    return 0.0;
  }
  return static_cast<double>(num) / static_cast<double>(den);
}

std::size_t argmax(std::span<const double> v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

// Plot helpers for the training-curve image.
using Rgb = std::array<std::uint8_t, 3>;

void put_pixel(Image& img, long x, long y, const Rgb& c) {
  if (x < 0 || y < 0 || x >= static_cast<long>(img.width) || y >= static_cast<long>(img.height))
    return;
  std::copy(c.begin(), c.end(), img.at(static_cast<std::size_t>(x), static_cast<std::size_t>(y)));
}

void draw_line(Image& img, long x0, long y0, long x1, long y1, const Rgb& c) {
  const long dx = std::abs(x1 - x0);
  const long dy = -std::abs(y1 - y0);
  const long sx = x0 < x1 ? 1 : -1;
  const long sy = y0 < y1 ? 1 : -1;
  long err = dx + dy;
  while (true) {
    put_pixel(img, x0, y0, c);
    put_pixel(img, x0, y0 + 1, c);
    if (x0 == x1 && y0 == y1) break;
    const long e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

struct Panel {
  long left, top, width, height;
};

void plot_series(Image& img, const Panel& p, std::span<const double> series, double lo, double hi,
                 const Rgb& color) {
  if (series.empty()) return;
  const double span = hi > lo ? hi - lo : 1.0;
  const std::size_t n = series.size();
  auto to_xy = [&](std::size_t i) {
    double fx = n > 1 ? static_cast<double>(i) / static_cast<double>(n - 1) : 0.5;
    double fy = (series[i] - lo) / span;
    return std::pair<long, long>{p.left + std::lround(fx * (p.width - 1)),
                                 p.top + p.height - 1 - std::lround(fy * (p.height - 1))};
  };
  auto [px, py] = to_xy(0);
  for (std::size_t i = 1; i < n; ++i) {
    if (!std::isfinite(series[i]) || !std::isfinite(series[i - 1])) continue;
    auto [x, y] = to_xy(i);
    draw_line(img, px, py, x, y, color);
    px = x;
    py = y;
  }
}

void draw_frame(Image& img, const Panel& p) {
  const Rgb axis{60, 60, 60};
  const Rgb grid{225, 225, 225};
  for (int k = 1; k < 4; ++k) {
    long y = p.top + k * p.height / 4;
    draw_line(img, p.left, y, p.left + p.width - 1, y, grid);
  }
  draw_line(img, p.left, p.top + p.height - 1, p.left + p.width - 1, p.top + p.height - 1, axis);
  draw_line(img, p.left, p.top, p.left, p.top + p.height - 1, axis);
}

}  // namespace

// ---------------------------------------------------------------------------
// Manifest

std::size_t DatasetManifest::label_index(const std::string& label) const {
  auto it = std::find(labels.begin(), labels.end(), label);
  if (it == labels.end()) throw Error(ErrorKind::kManifest, "unknown label '" + label + "'");
  return static_cast<std::size_t>(it - labels.begin());
}

std::filesystem::path DatasetManifest::resolve(const ManifestEntry& entry) const {
  std::filesystem::path p(entry.path);
  return p.is_absolute() ? p : base_dir / p;
}

std::vector<std::size_t> DatasetManifest::label_indices() const {
  std::vector<std::size_t> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(label_index(e.label));
  return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

DatasetManifest load_manifest(const std::filesystem::path& csv_path) {
  if (!std::filesystem::exists(csv_path))
    throw Error(ErrorKind::kIo, "manifest not found: " + csv_path.string());
  auto lines = read_lines(csv_path);
  if (lines.empty()) throw Error(ErrorKind::kManifest, "manifest is empty");
  std::string header = lines.front();
  if (header.rfind("\xEF\xBB\xBF", 0) == 0) header.erase(0, 3);
  auto columns = split_csv_line(header);
  if (columns.size() != 2 || trim_ws(columns[0]) != "path" || trim_ws(columns[1]) != "label")
    throw Error(ErrorKind::kManifest, "manifest header must be 'path,label'");

  DatasetManifest manifest;
  manifest.base_dir = csv_path.parent_path();
  std::set<std::string> seen;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (trim_ws(lines[i]).empty()) continue;
    const std::size_t row = i + 1;  // 1-based file line
    auto fields = split_csv_line(lines[i]);
    if (fields.size() != 2)
      throw Error(ErrorKind::kManifest, "row " + std::to_string(row) + ": expected 2 fields");
    ManifestEntry entry{trim_ws(fields[0]), trim_ws(fields[1])};
    if (entry.path.empty())
      throw Error(ErrorKind::kManifest, "row " + std::to_string(row) + ": empty path");
    if (entry.label.empty())
      throw Error(ErrorKind::kManifest, "row " + std::to_string(row) + ": empty label");
    if (!seen.insert(entry.path).second)
      throw Error(ErrorKind::kManifest,
                  "row " + std::to_string(row) + ": duplicate path '" + entry.path + "'");
    if (std::find(manifest.labels.begin(), manifest.labels.end(), entry.label) ==
        manifest.labels.end())
      manifest.labels.push_back(entry.label);
    manifest.entries.push_back(std::move(entry));
  }
  if (manifest.entries.empty()) throw Error(ErrorKind::kManifest, "manifest has no entries");
  return manifest;
}

void write_manifest(const std::filesystem::path& csv_path, const DatasetManifest& manifest) {
  std::ostringstream out;
  out << "path,label\n";
  for (const auto& e : manifest.entries) out << csv_field(e.path) << ',' << csv_field(e.label) << '\n';
  detail::write_file_text(csv_path, out.str());
}

// ---------------------------------------------------------------------------
// Splitting

void TrainingConfig::validate() const {
  if (epochs == 0) throw Error(ErrorKind::kInvalidArgument, "epochs must be at least 1");
  if (batch_size == 0) throw Error(ErrorKind::kInvalidArgument, "batch_size must be at least 1");
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw Error(ErrorKind::kInvalidArgument, "test_fraction must be in (0, 1)");
}

DatasetSplit split_stratified(std::span<const std::size_t> labels, std::size_t n_classes,
                              double test_fraction, std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0))
    throw Error(ErrorKind::kInvalidArgument, "test_fraction must be in (0, 1)");
  std::vector<std::vector<std::size_t>> by_class(n_classes);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] >= n_classes) throw Error(ErrorKind::kInvalidArgument, "label out of range");
    by_class[labels[i]].push_back(i);
  }
  Rng rng(seed);
  DatasetSplit split;
  for (std::size_t c = 0; c < n_classes; ++c) {
    auto& members = by_class[c];
    if (members.size() < 2)
      throw Error(ErrorKind::kInvalidArgument,
                  "class " + std::to_string(c) + " has fewer than 2 entries");
    std::shuffle(members.begin(), members.end(), rng);
    auto n_test = static_cast<std::size_t>(
        std::floor(test_fraction * static_cast<double>(members.size())));
    n_test = std::max<std::size_t>(n_test, 1);
    split.test.insert(split.test.end(), members.begin(),
                      members.begin() + static_cast<std::ptrdiff_t>(n_test));
    split.train.insert(split.train.end(), members.begin() + static_cast<std::ptrdiff_t>(n_test),
                       members.end());
  }
  std::sort(split.train.begin(), split.train.end());
  std::sort(split.test.begin(), split.test.end());
  return split;
}

DatasetSplit split_dataset(const DatasetManifest& manifest, const TrainingConfig& config) {
  auto labels = manifest.label_indices();
  return split_stratified(labels, manifest.labels.size(), config.test_fraction, config.seed);
}

// ---------------------------------------------------------------------------
// Feature tables

FeatureTable FeatureTable::subset(std::span<const std::size_t> indices) const {
  FeatureTable out;
  out.label_names = label_names;
  for (std::size_t i : indices) {
    if (i >= size()) throw Error(ErrorKind::kInvalidArgument, "subset index out of range");
    out.ids.push_back(ids[i]);
    out.labels.push_back(labels[i]);
    out.features.push_back(features[i]);
  }
  return out;
}

void write_feature_csv(const std::filesystem::path& path, const FeatureTable& table) {
  std::ostringstream out;
  out << "id,label";
  for (std::size_t c = 0; c < table.dimension(); ++c) out << ",c" << c;
  out << '\n';
  for (std::size_t r = 0; r < table.size(); ++r) {
    out << csv_field(table.ids[r]) << ',' << csv_field(table.label_names.at(table.labels[r]));
    for (double v : table.features[r].coeffs) out << ',' << format_double(v);
    out << '\n';
  }
  detail::write_file_text(path, out.str());
}

FeatureTable read_feature_csv(const std::filesystem::path& path) {
  auto lines = read_lines(path);
  if (lines.empty()) throw Error(ErrorKind::kCorruptFile, "feature CSV is empty: " + path.string());
  auto header = split_csv_line(lines.front());
  if (header.size() < 3 || header[0] != "id" || header[1] != "label")
    throw Error(ErrorKind::kCorruptFile, "feature CSV header must start with 'id,label,c0'");
  const std::size_t dim = header.size() - 2;

  FeatureTable table;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (trim_ws(lines[i]).empty()) continue;
    auto fields = split_csv_line(lines[i]);
    const std::string where = path.string() + " row " + std::to_string(i + 1);
    if (fields.size() != dim + 2)
      throw Error(ErrorKind::kShapeMismatch, where + ": expected " + std::to_string(dim + 2) +
                                                 " fields, got " + std::to_string(fields.size()));
    const std::string& label = fields[1];
    auto it = std::find(table.label_names.begin(), table.label_names.end(), label);
    if (it == table.label_names.end()) {
      table.label_names.push_back(label);
      it = table.label_names.end() - 1;
    }
    FeatureVector fv{std::vector<double>(dim)};
    for (std::size_t c = 0; c < dim; ++c) fv.coeffs[c] = parse_double(fields[c + 2], where);
    table.ids.push_back(fields[0]);
    table.labels.push_back(static_cast<std::size_t>(it - table.label_names.begin()));
    table.features.push_back(std::move(fv));
  }
  return table;
}

// ---------------------------------------------------------------------------
// Training

Evaluation evaluate(const Network& net, const FeatureTable& table) {
  Evaluation ev;
  if (table.size() == 0) {
    ev.loss = ev.accuracy = std::numeric_limits<double>::quiet_NaN();
    return ev;
  }
  std::size_t correct = 0;
  double loss = 0.0;
  ev.predictions.reserve(table.size());
  for (std::size_t i = 0; i < table.size(); ++i) {
    auto probs = infer(net, table.features[i].coeffs);
    const std::size_t pred = argmax(probs);
    ev.predictions.push_back(pred);
    correct += pred == table.labels[i];
    loss += cross_entropy(probs, table.labels[i]);
  }
  ev.loss = loss / static_cast<double>(table.size());
  ev.accuracy = static_cast<double>(correct) / static_cast<double>(table.size());
  return ev;
}

TrainingHistory train(Network& net, const FeatureTable& train_set, const FeatureTable& val_set,
                      const TrainingConfig& config, const EpochCallback& on_epoch) {
  config.validate();
  if (train_set.size() == 0) throw Error(ErrorKind::kInvalidArgument, "training set is empty");
  if (train_set.dimension() != net.input_size())
    throw Error(ErrorKind::kShapeMismatch,
                "feature dimension " + std::to_string(train_set.dimension()) +
                    " does not match network input " + std::to_string(net.input_size()));
  for (std::size_t y : train_set.labels)
    if (y >= net.output_size())
      throw Error(ErrorKind::kShapeMismatch, "training label outside network output range");

  Rng rng(config.seed);
  AdamState adam = AdamState::for_network(net, config.adam);
  std::vector<std::size_t> order(train_set.size());
  std::iota(order.begin(), order.end(), 0);
  ForwardCache cache;
  TrainingHistory history;
  history.epochs.reserve(config.epochs);

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    if (config.shuffle) std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    std::size_t correct = 0;
    for (std::size_t start = 0; start < order.size(); start += config.batch_size) {
      const std::size_t end = std::min(order.size(), start + config.batch_size);
      const double scale = 1.0 / static_cast<double>(end - start);
      Gradients grads = zero_gradients(net);
      for (std::size_t b = start; b < end; ++b) {
        const std::size_t idx = order[b];
        const std::size_t target = train_set.labels[idx];
        auto probs = forward_train(net, train_set.features[idx].coeffs, rng, cache);
        const double loss = cross_entropy(probs, target);
        if (!std::isfinite(loss))
          throw Error(ErrorKind::kNonFinite, "loss diverged at epoch " + std::to_string(epoch + 1) +
                                                 ", sample " + train_set.ids[idx]);
        loss_sum += loss;
        correct += argmax(probs) == target;
        backward_accumulate(net, cache, target, grads, scale);
      }
      try {
        adam_step(adam, net, grads);
      } catch (const Error& e) {
        throw Error(e.kind(), std::string(e.what()) + " at epoch " + std::to_string(epoch + 1));
      }
    }
    EpochRecord rec;
    rec.train_loss = loss_sum / static_cast<double>(order.size());
    rec.train_accuracy = static_cast<double>(correct) / static_cast<double>(order.size());
    Evaluation val = evaluate(net, val_set);
    rec.val_loss = val.loss;
    rec.val_accuracy = val.accuracy;
    history.epochs.push_back(rec);
    if (on_epoch) on_epoch(epoch + 1, rec);
  }
  return history;
}

// ---------------------------------------------------------------------------
// Metrics

std::uint64_t ConfusionMatrix::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

std::uint64_t ConfusionMatrix::trace() const {
  std::uint64_t t = 0;
  for (std::size_t i = 0; i < n_; ++i) t += at(i, i);
  return t;
}

ConfusionMatrix confusion_matrix(std::span<const std::size_t> predicted,
                                 std::span<const std::size_t> truth, std::size_t n_classes) {
  if (predicted.size() != truth.size())
    throw Error(ErrorKind::kLengthMismatch, "prediction and truth lengths differ");
  ConfusionMatrix cm(n_classes);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    if (truth[i] >= n_classes || predicted[i] >= n_classes)
      throw Error(ErrorKind::kInvalidArgument,
                  "label out of range at sample " + std::to_string(i));
    ++cm.at(truth[i], predicted[i]);
  }
  return cm;
}

double f1_score(double precision, double recall) {
  const double denom = precision + recall;
  return denom > 0.0 ? 2.0 * precision * recall / denom : 0.0;
}

MetricsReport compute_metrics(const ConfusionMatrix& cm) {
  const std::size_t n = cm.n_classes();
  const std::uint64_t total = cm.total();
  if (n == 0 || total == 0) throw Error(ErrorKind::kInvalidArgument, "confusion matrix is empty");

  MetricsReport report;
  report.total = total;
  report.accuracy = static_cast<double>(cm.trace()) / static_cast<double>(total);
  report.classes.resize(n);
  std::vector<std::uint64_t> row_sum(n, 0), col_sum(n, 0);
  for (std::size_t t = 0; t < n; ++t)
    for (std::size_t p = 0; p < n; ++p) {
      row_sum[t] += cm.at(t, p);
      col_sum[p] += cm.at(t, p);
    }
  for (std::size_t c = 0; c < n; ++c) {
    ClassMetrics& m = report.classes[c];
    m.tp = cm.at(c, c);
    m.fn = row_sum[c] - m.tp;
    m.fp = col_sum[c] - m.tp;
    m.tn = total - m.tp - m.fn - m.fp;
    m.sensitivity = safe_ratio(m.tp, m.tp + m.fn, m.degenerate);
    m.specificity = safe_ratio(m.tn, m.tn + m.fp, m.degenerate);
    m.precision = safe_ratio(m.tp, m.tp + m.fp, m.degenerate);
    if (m.precision + m.sensitivity > 0.0) {
      m.f1 = f1_score(m.precision, m.sensitivity);
    } else {
      m.f1 = 0.0;
      m.degenerate = true;
    }
  }
  return report;
}

std::string metrics_to_json(const MetricsReport& report, const ConfusionMatrix& cm,
                            std::span<const std::string> labels) {
  nlohmann::ordered_json doc;
  doc["accuracy"] = report.accuracy;
  doc["total"] = report.total;
  auto classes = nlohmann::ordered_json::array();
  for (std::size_t c = 0; c < report.classes.size(); ++c) {
    const auto& m = report.classes[c];
    classes.push_back({{"label", c < labels.size() ? labels[c] : std::to_string(c)},
                       {"sensitivity", m.sensitivity},
                       {"specificity", m.specificity},
                       {"precision", m.precision},
                       {"f1", m.f1},
                       {"tp", m.tp},
                       {"fp", m.fp},
                       {"tn", m.tn},
                       {"fn", m.fn},
                       {"degenerate", m.degenerate}});
  }
  doc["classes"] = std::move(classes);
  auto matrix = nlohmann::ordered_json::array();
  for (std::size_t t = 0; t < cm.n_classes(); ++t) {
    std::vector<std::uint64_t> row(cm.n_classes());
    for (std::size_t p = 0; p < cm.n_classes(); ++p) row[p] = cm.at(t, p);
    matrix.push_back(row);
  }
  doc["confusion_matrix"] = std::move(matrix);
  return doc.dump(2);
}

std::string format_metrics_table(const MetricsReport& report, std::span<const std::string> labels) {
  std::size_t width = 7;
  for (const auto& l : labels) width = std::max(width, l.size());
  std::ostringstream out;
  out << std::left << std::setw(static_cast<int>(width)) << "Class" << std::right
      << "  Sensitivity  Specificity     F1  Precision\n";
  out << std::fixed << std::setprecision(2);
  for (std::size_t c = 0; c < report.classes.size(); ++c) {
    const auto& m = report.classes[c];
    out << std::left << std::setw(static_cast<int>(width))
        << (c < labels.size() ? labels[c] : std::to_string(c)) << std::right << std::setw(13)
        << m.sensitivity << std::setw(13) << m.specificity << std::setw(7) << m.f1
        << std::setw(11) << m.precision << (m.degenerate ? "  (degenerate)" : "") << '\n';
  }
  out << "Accuracy: " << std::setprecision(4) << report.accuracy << " (" << report.total
      << " samples)\n";
  return out.str();
}

// ---------------------------------------------------------------------------
// History export

std::filesystem::path export_history(const TrainingHistory& history,
                                     const std::filesystem::path& csv_path) {
  if (history.epochs.empty()) throw Error(ErrorKind::kInvalidArgument, "history is empty");
  std::ostringstream out;
  out << "epoch,train_loss,val_loss,train_acc,val_acc\n";
  for (std::size_t e = 0; e < history.epochs.size(); ++e) {
    const auto& r = history.epochs[e];
    out << e + 1 << ',' << format_double(r.train_loss) << ',' << format_double(r.val_loss) << ','
        << format_double(r.train_accuracy) << ',' << format_double(r.val_accuracy) << '\n';
  }
  detail::write_file_text(csv_path, out.str());

  // Two stacked panels: loss on top, accuracy below. Blue = train, orange = val.
  constexpr long kWidth = 800, kHeight = 600, kMargin = 40;
  Image img(kWidth, kHeight, 3, 255);
  const Panel loss_panel{kMargin, kMargin / 2, kWidth - 2 * kMargin, kHeight / 2 - kMargin};
  const Panel acc_panel{kMargin, kHeight / 2 + kMargin / 2, kWidth - 2 * kMargin,
                        kHeight / 2 - kMargin};
  draw_frame(img, loss_panel);
  draw_frame(img, acc_panel);

  std::vector<double> tl, vl, ta, va;
  for (const auto& r : history.epochs) {
    tl.push_back(r.train_loss);
    vl.push_back(r.val_loss);
    ta.push_back(r.train_accuracy);
    va.push_back(r.val_accuracy);
  }
  double loss_hi = 0.0;
  for (double v : tl) if (std::isfinite(v)) loss_hi = std::max(loss_hi, v);
  for (double v : vl) if (std::isfinite(v)) loss_hi = std::max(loss_hi, v);
  const Rgb train_color{31, 119, 180};
  const Rgb val_color{255, 127, 14};
  plot_series(img, loss_panel, tl, 0.0, loss_hi, train_color);
  plot_series(img, loss_panel, vl, 0.0, loss_hi, val_color);
  plot_series(img, acc_panel, ta, 0.0, 1.0, train_color);
  plot_series(img, acc_panel, va, 0.0, 1.0, val_color);

  img.text["Title"] = "Training history";
  img.text["Description"] =
      "top: loss (0 to " + format_double(loss_hi) + "), bottom: accuracy (0 to 1); "
      "blue = train, orange = validation; x = epoch 1.." + std::to_string(history.epochs.size());
  img.text["Software"] = "birdsong";
  auto png_path = csv_path;
  png_path.replace_extension(".png");
  write_png(png_path, img);
  return png_path;
}

TrainingHistory read_history_csv(const std::filesystem::path& csv_path) {
  auto lines = read_lines(csv_path);
  if (lines.empty() || lines.front() != "epoch,train_loss,val_loss,train_acc,val_acc")
    throw Error(ErrorKind::kCorruptFile, "unexpected history CSV header");
  TrainingHistory history;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    auto f = split_csv_line(lines[i]);
    if (f.size() != 5) throw Error(ErrorKind::kCorruptFile, "history row has wrong field count");
    const std::string where = csv_path.string();
    history.epochs.push_back({parse_double(f[1], where), parse_double(f[3], where),
                              parse_double(f[2], where), parse_double(f[4], where)});
  }
  return history;
}

}  // namespace birdsong
