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

// HTTP inference endpoint.
//
//   POST /classify[?source=name]   body: WAV bytes    -> 200 report JSON
//                                  undecodable audio  -> 400 {"error": "malformed-audio", ...}
//   GET  /healthz                                      -> 200 {"status", "model_id", "version"}
//
// The model is loaded once and only read afterwards; requests are served
// concurrently by the server's worker pool.

#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>

#include "birdsong/nn.hpp"
#include "birdsong/pipeline.hpp"

namespace httplib {
class Server;
}

namespace birdsong::cli {

inline constexpr const char* kVersion = BIRDSONG_VERSION;

struct HttpResponse {
  int status = 200;
  std::string body;
};

class InferenceService {
 public:
  InferenceService(Network net, PipelineConfig config);
  ~InferenceService();

  InferenceService(const InferenceService&) = delete;
  InferenceService& operator=(const InferenceService&) = delete;

  const Network& model() const { return net_; }
  const std::string& model_id() const { return model_id_; }

  /// Request handlers, independent of the transport.
  HttpResponse handle_classify(std::span<const std::uint8_t> body, const std::string& source) const;
  HttpResponse handle_health() const;

  /// Binds the listening socket; port 0 picks a free port. Returns the bound
  /// port. Throws birdsong::Error(kIo) if the address is unavailable.
  int bind(const std::string& host, int port);

  /// Serves until stop() is called. bind() must have succeeded.
  void listen();
  void stop();
  bool is_running() const;

 private:
  const Network net_;
  const PipelineConfig config_;
  const std::string model_id_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace birdsong::cli
