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

#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <atomic>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>

#include "app_config.hpp"
#include "birdsong/dsp.hpp"
#include "birdsong/error.hpp"
#include "birdsong/fixtures.hpp"
#include "birdsong/pipeline.hpp"
#include "birdsong/train_eval.hpp"
#include "service.hpp"

namespace birdsong::cli {
namespace {

// Flag values; unset flags leave the config-file/default value in place.
struct Flags {
  std::string config_path;

  std::optional<std::size_t> per_class;
  std::optional<std::uint64_t> seed;
  std::string out;

  std::string manifest;
  std::string features;
  std::optional<std::size_t> epochs;
  std::optional<std::size_t> batch_size;
  std::optional<double> test_fraction;
  std::optional<double> learning_rate;
  std::string history;
  std::string test_out;
  bool quiet = false;

  std::string model;
  std::string split = "all";

  std::string audio;
  std::string format = "json";
  std::string source;
  std::optional<double> threshold;
  std::optional<double> window;

  std::optional<double> frame_ms;
  std::optional<double> hop_ms;

  std::optional<std::string> host;
  std::optional<int> port;
};

template <typename T, typename U>
void overlay(const std::optional<T>& flag, U& target) {
  if (flag) target = *flag;
}

std::string resolve_model_path(const Flags& flags, const AppConfig& cfg) {
  std::string path = flags.model.empty() ? cfg.model_path : flags.model;
  if (path.empty()) throw ConfigError("no model given (use --model or paths.model in the config)");
  return path;
}

std::size_t argmax(const std::vector<double>& v) {
  return static_cast<std::size_t>(std::max_element(v.begin(), v.end()) - v.begin());
}

// Maps the table's label indices onto the model's label order by name.
FeatureTable align_labels(FeatureTable table, const Network& net) {
  if (net.labels().empty()) return table;
  std::vector<std::size_t> remap(table.label_names.size());
  for (std::size_t i = 0; i < table.label_names.size(); ++i) {
    auto it = std::find(net.labels().begin(), net.labels().end(), table.label_names[i]);
    if (it == net.labels().end())
      throw Error(ErrorKind::kShapeMismatch,
                  "label '" + table.label_names[i] + "' is not known to the model");
    remap[i] = static_cast<std::size_t>(it - net.labels().begin());
  }
  for (auto& y : table.labels) y = remap[y];
  table.label_names = net.labels();
  return table;
}

int cmd_synth(const Flags& f, const AppConfig& cfg, std::ostream& out) {
  const std::size_t per_class = f.per_class.value_or(40);
  const std::uint64_t seed = f.seed.value_or(cfg.training.seed);
  FixtureOptions options;
  options.sample_rate_hz = cfg.features.sample_rate_hz;
  options.seconds = cfg.features.clip_seconds;
  auto manifest = generate_fixtures(per_class, seed, f.out, options);
  out << "wrote " << manifest.entries.size() << " clips (" << manifest.labels.size()
      << " classes) and " << (std::filesystem::path(f.out) / "manifest.csv").string() << '\n';
  return kExitOk;
}

int cmd_featurize(const Flags& f, const AppConfig& cfg, std::ostream& out) {
  auto manifest = load_manifest(f.manifest);
  auto table = featurize_manifest(manifest, cfg.features);
  write_feature_csv(f.out, table);
  out << "featurized " << table.size() << " clips into " << f.out << " (" << table.dimension()
      << " coefficients)\n";
  return kExitOk;
}

int cmd_train(const Flags& f, const AppConfig& cfg, std::ostream& out) {
  auto table = read_feature_csv(f.features);
  if (table.size() == 0) throw Error(ErrorKind::kInvalidArgument, "feature file has no rows");
  if (table.dimension() != cfg.features.n_mfcc)
    throw ConfigError("feature file has " + std::to_string(table.dimension()) +
                      " columns but features.n_mfcc is " + std::to_string(cfg.features.n_mfcc));

  const auto& tc = cfg.training;
  auto split = split_stratified(table.labels, table.label_names.size(), tc.test_fraction, tc.seed);
  auto train_set = table.subset(split.train);
  auto test_set = table.subset(split.test);

  Rng init_rng(tc.seed);
  Network net = Network::initialize(cfg.model_config(table.dimension(), table.label_names.size()),
                                    init_rng);
  net.set_labels(table.label_names);

  auto before = evaluate(net, test_set);
  out << "model: " << net.parameter_count() << " parameters; train " << train_set.size()
      << ", test " << test_set.size() << '\n';
  out << std::fixed << std::setprecision(4) << "pre-training accuracy: " << before.accuracy << '\n';

  auto history = train(net, train_set, test_set, tc, [&](std::size_t epoch, const EpochRecord& r) {
    if (f.quiet) return;
    if (epoch == 1 || epoch % 10 == 0 || epoch == tc.epochs)
      out << "epoch " << epoch << ": loss " << r.train_loss << " acc " << r.train_accuracy
          << " | val_loss " << r.val_loss << " val_acc " << r.val_accuracy << '\n';
  });

  save_classifier(f.out, net, cfg.features);
  if (!f.history.empty()) {
    auto png = export_history(history, f.history);
    out << "history: " << f.history << ", plot: " << png.string() << '\n';
  }
  if (!f.test_out.empty()) write_feature_csv(f.test_out, test_set);
  const auto& last = history.epochs.back();
  out << "final: train_loss " << last.train_loss << " (initial " << history.epochs.front().train_loss
      << "), test accuracy " << last.val_accuracy << '\n';
  out << "saved " << f.out << " (" << net.model_id() << ")\n";
  return kExitOk;
}

int cmd_evaluate(const Flags& f, const AppConfig& cfg, std::ostream& out) {
  auto classifier = load_classifier(resolve_model_path(f, cfg));
  auto table = align_labels(read_feature_csv(f.features), classifier.net);
  if (f.split != "all") {
    const auto& tc = cfg.training;
    auto split = split_stratified(table.labels, table.label_names.size(), tc.test_fraction, tc.seed);
    table = table.subset(f.split == "test" ? split.test : split.train);
  }
  if (table.size() == 0) throw Error(ErrorKind::kInvalidArgument, "no samples to evaluate");
  auto ev = evaluate(classifier.net, table);
  auto cm = confusion_matrix(ev.predictions, table.labels, classifier.net.output_size());
  auto report = compute_metrics(cm);
  const auto& labels = classifier.net.labels().empty() ? table.label_names : classifier.net.labels();
  out << format_metrics_table(report, labels);
  if (!f.out.empty()) {
    std::ofstream file(f.out);
    if (!file) throw Error(ErrorKind::kIo, "cannot write " + f.out);
    file << metrics_to_json(report, cm, labels) << '\n';
  }
  return kExitOk;
}

PipelineConfig pipeline_for(const Classifier& classifier, const Flags& f, const AppConfig& cfg) {
  PipelineConfig pc = cfg.pipeline;
  pc.features = classifier.features;
  overlay(f.threshold, pc.confidence_threshold);
  overlay(f.window, pc.window_seconds);
  try {
    pc.validate();
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return pc;
}

int cmd_classify(const Flags& f, const AppConfig& cfg, std::ostream& out) {
  if (f.format != "json" && f.format != "csv") throw ConfigError("--format must be json or csv");
  const std::string model_path = resolve_model_path(f, cfg);
  auto classifier = load_classifier(model_path);
  PipelineConfig pc = pipeline_for(classifier, f, cfg);
  pc.model_path = model_path;

  std::filesystem::path audio(f.audio);
  std::ifstream in(audio, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open " + audio.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  const std::string source = f.source.empty() ? audio.filename().string() : f.source;
  Report report = classify_wav_bytes(bytes, source, classifier.net, pc);
  const std::string text = f.format == "json" ? report_to_json(report) : report_to_csv(report);
  if (f.out.empty()) {
    out << text;
  } else {
    std::ofstream file(f.out, std::ios::binary);
    if (!file) throw Error(ErrorKind::kIo, "cannot write " + f.out);
    file << text;
  }
  return kExitOk;
}

int cmd_spectrogram(const Flags& f, const AppConfig& cfg, std::ostream& out) {
  double frame_ms = cfg.features.frame_ms;
  double hop_ms = cfg.features.hop_ms;
  overlay(f.frame_ms, frame_ms);
  overlay(f.hop_ms, hop_ms);
  if (!(frame_ms > 0.0) || !(hop_ms > 0.0) || hop_ms > frame_ms)
    throw ConfigError("need --frame-ms > 0 and 0 < --hop-ms <= --frame-ms");
  auto spec = compute_spectrogram(load_clip(f.audio), frame_ms, hop_ms);
  render_spectrogram(spec, f.out);
  out << "wrote " << f.out << " (" << spec.n_frames() << "x" << spec.n_bins() << ")\n";
  return kExitOk;
}

std::atomic<InferenceService*> g_running_service{nullptr};

extern "C" void handle_stop_signal(int) {
  if (auto* svc = g_running_service.load()) svc->stop();
}

int cmd_serve(const Flags& f, const AppConfig& cfg, std::ostream& out) {
  auto classifier = load_classifier(resolve_model_path(f, cfg));
  PipelineConfig pc = pipeline_for(classifier, f, cfg);
  InferenceService service(std::move(classifier.net), pc);
  std::string host = cfg.server.host;
  int port = cfg.server.port;
  overlay(f.host, host);
  overlay(f.port, port);
  const int bound = service.bind(host, port);
  out << "serving model " << service.model_id() << " on http://" << host << ':' << bound << '\n'
      << std::flush;
  g_running_service = &service;
  std::signal(SIGINT, handle_stop_signal);
  std::signal(SIGTERM, handle_stop_signal);
  service.listen();
  g_running_service = nullptr;
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"birdsong: bird call classification from MFCC features"};
  app.require_subcommand(1);
  app.fallthrough();
  Flags f;
  app.add_option("--config", f.config_path, "JSON config file (flags override it)")
      ->check(CLI::ExistingFile);

  auto* synth = app.add_subcommand("synth", "Generate the synthetic five-class WAV corpus");
  synth->add_option("--per-class", f.per_class, "Clips per class (default 40)")
      ->check(CLI::PositiveNumber);
  synth->add_option("--seed", f.seed, "Random seed");
  synth->add_option("--out", f.out, "Output directory")->required();

  auto* featurize = app.add_subcommand("featurize", "Compute clip-level MFCC features for a manifest");
  featurize->add_option("--manifest", f.manifest, "CSV with header path,label")
      ->required()
      ->check(CLI::ExistingFile);
  featurize->add_option("--out", f.out, "Feature CSV to write")->required();

  auto* train_cmd = app.add_subcommand("train", "Train the classifier on a feature CSV");
  train_cmd->add_option("--features", f.features, "Feature CSV")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--out", f.out, "Model file to write")->required();
  train_cmd->add_option("--epochs", f.epochs, "Training epochs")->check(CLI::PositiveNumber);
  train_cmd->add_option("--batch-size", f.batch_size, "Mini-batch size")->check(CLI::PositiveNumber);
  train_cmd->add_option("--seed", f.seed, "Seed for split, init, shuffling and dropout");
  train_cmd->add_option("--test-fraction", f.test_fraction, "Held-out fraction per class");
  train_cmd->add_option("--learning-rate", f.learning_rate, "Adam learning rate");
  train_cmd->add_option("--history", f.history, "Write per-epoch history CSV (+ PNG plot)");
  train_cmd->add_option("--test-out", f.test_out, "Write the held-out rows as a feature CSV");
  train_cmd->add_flag("--quiet", f.quiet, "Suppress per-epoch progress");

  auto* eval_cmd = app.add_subcommand("evaluate", "Per-class metrics of a model on a feature CSV");
  eval_cmd->add_option("--model", f.model, "Model file");
  eval_cmd->add_option("--features", f.features, "Feature CSV")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--split", f.split, "Rows to use: all, test or train (seeded split)")
      ->check(CLI::IsMember({"all", "test", "train"}));
  eval_cmd->add_option("--seed", f.seed, "Split seed when --split is test/train");
  eval_cmd->add_option("--test-fraction", f.test_fraction, "Split fraction when --split is test/train");
  eval_cmd->add_option("--out", f.out, "Write the metrics report as JSON");

  auto* classify = app.add_subcommand("classify", "Classify a recording in fixed windows");
  classify->add_option("--model", f.model, "Model file");
  classify->add_option("--audio", f.audio, "WAV recording")->required()->check(CLI::ExistingFile);
  classify->add_option("--out", f.out, "Report file (stdout if omitted)");
  classify->add_option("--format", f.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  classify->add_option("--threshold", f.threshold, "Minimum confidence for a detection");
  classify->add_option("--window", f.window, "Window length in seconds");
  classify->add_option("--source", f.source, "Source name recorded in the report");

  auto* spectro = app.add_subcommand("spectrogram", "Render a recording's spectrogram as PNG");
  spectro->add_option("--audio", f.audio, "WAV recording")->required()->check(CLI::ExistingFile);
  spectro->add_option("--out", f.out, "PNG to write")->required();
  spectro->add_option("--frame-ms", f.frame_ms, "Frame length in milliseconds");
  spectro->add_option("--hop-ms", f.hop_ms, "Hop in milliseconds");

  auto* serve = app.add_subcommand("serve", "Serve POST /classify and GET /healthz over HTTP");
  serve->add_option("--model", f.model, "Model file");
  serve->add_option("--host", f.host, "Listen address");
  serve->add_option("--port", f.port, "Listen port (0 picks a free one)");
  serve->add_option("--threshold", f.threshold, "Minimum confidence for a detection");
  serve->add_option("--window", f.window, "Window length in seconds");

  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a == "--config") ++i;
    if (a.empty() || a.front() == '-') continue;
    if (app.get_subcommands([&](CLI::App* sub) { return sub->get_name() == a; }).empty()) {
      err << "error: unknown subcommand '" << a << "'\n";
      return kExitUsage;
    }
    break;
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      app.exit(e, out, err);
      return kExitOk;
    }
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  AppConfig cfg;
  try {
    if (!f.config_path.empty()) cfg = load_app_config(f.config_path);
    overlay(f.seed, cfg.training.seed);
    overlay(f.epochs, cfg.training.epochs);
    overlay(f.batch_size, cfg.training.batch_size);
    overlay(f.test_fraction, cfg.training.test_fraction);
    overlay(f.learning_rate, cfg.training.adam.learning_rate);
    cfg.validate();
  } catch (const ConfigError& e) {
    err << "error: invalid config: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (synth->parsed()) return cmd_synth(f, cfg, out);
    if (featurize->parsed()) return cmd_featurize(f, cfg, out);
    if (train_cmd->parsed()) return cmd_train(f, cfg, out);
    if (eval_cmd->parsed()) return cmd_evaluate(f, cfg, out);
    if (classify->parsed()) return cmd_classify(f, cfg, out);
    if (spectro->parsed()) return cmd_spectrogram(f, cfg, out);
    if (serve->parsed()) return cmd_serve(f, cfg, out);
  } catch (const ConfigError& e) {
    err << "error: invalid config: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << " [" << to_string(e.kind()) << "]\n";
    return kExitFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  err << "error: no subcommand given\n";
  return kExitUsage;
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace birdsong::cli
