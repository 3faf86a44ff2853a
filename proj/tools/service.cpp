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

#include "service.hpp"

#include <httplib.h>

#include <nlohmann/json.hpp>

#include "birdsong/error.hpp"

namespace birdsong::cli {
namespace {

constexpr const char* kJson = "application/json";

bool is_audio_error(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kMalformedHeader:
    case ErrorKind::kUnsupportedEncoding:
    case ErrorKind::kEmptyData:
    case ErrorKind::kTruncatedData:
    case ErrorKind::kUnsupportedBitDepth:
      return true;
    default:
      return false;
  }
}

std::string error_body(const std::string& code, const std::string& detail) {
  nlohmann::ordered_json j;
  j["error"] = code;
  j["detail"] = detail;
  return j.dump() + "\n";
}

}  // namespace

InferenceService::InferenceService(Network net, PipelineConfig config)
    : net_(std::move(net)),
      config_(std::move(config)),
      model_id_(net_.model_id()),
      server_(std::make_unique<httplib::Server>()) {
  config_.validate();
  if (net_.input_size() != config_.features.n_mfcc)
    throw Error(ErrorKind::kShapeMismatch, "model input size does not match the feature config");

  // SO_REUSEADDR only: with httplib's default SO_REUSEPORT a second server
  // could silently share the port instead of failing to bind.
  server_->set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char*>(&yes), sizeof(yes));
  });

  server_->Post("/classify", [this](const httplib::Request& req, httplib::Response& res) {
    std::string source = req.has_param("source") ? req.get_param_value("source") : "upload";
    auto reply = handle_classify(
        {reinterpret_cast<const std::uint8_t*>(req.body.data()), req.body.size()}, source);
    res.status = reply.status;
    res.set_content(reply.body, kJson);
  });
  server_->Get("/healthz", [this](const httplib::Request&, httplib::Response& res) {
    auto reply = handle_health();
    res.status = reply.status;
    res.set_content(reply.body, kJson);
  });
}

InferenceService::~InferenceService() { stop(); }

HttpResponse InferenceService::handle_classify(std::span<const std::uint8_t> body,
                                               const std::string& source) const {
  try {
    Report report = classify_wav_bytes(body, source, net_, config_);
    return {200, report_to_json(report)};
  } catch (const Error& e) {
    if (is_audio_error(e.kind())) return {400, error_body("malformed-audio", e.what())};
    return {500, error_body(std::string(to_string(e.kind())), e.what())};
  } catch (const std::exception& e) {
    return {500, error_body("internal", e.what())};
  }
}

HttpResponse InferenceService::handle_health() const {
  nlohmann::ordered_json j;
  j["status"] = "ok";
  j["model_id"] = model_id_;
  j["version"] = kVersion;
  j["model_format_version"] = kModelFormatVersion;
  return {200, j.dump() + "\n"};
}

int InferenceService::bind(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = server_->bind_to_any_port(host);
  } else if (!server_->bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound < 0)
    throw Error(ErrorKind::kIo, "cannot bind " + host + ":" + std::to_string(port) +
                                    " (address in use or unavailable)");
  return bound;
}

void InferenceService::listen() {
  if (!server_->listen_after_bind())
    throw Error(ErrorKind::kIo, "HTTP server stopped unexpectedly");
}

void InferenceService::stop() {
  if (server_ && server_->is_running()) server_->stop();
}

bool InferenceService::is_running() const { return server_->is_running(); }

}  // namespace birdsong::cli
