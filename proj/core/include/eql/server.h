// Copyright 2026 The Eqlboard Authors.
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

#ifndef EQL_SERVER_H_
#define EQL_SERVER_H_

// HTTP/JSON service backing the leaderboard customization UI.
//
//   GET  /health                              -> 200 "ok"
//   POST /sessions                            -> 201 {"session_id"}
//   GET  /sessions/{id}/models                -> model ids and accuracies
//   POST /sessions/{id}/difficulty            -> difficulty scores
//   POST /sessions/{id}/leaderboard           -> {"view","bundle_id","chart_url"}
//   GET  /sessions/{id}/charts/{bundle_id}    -> chart bundle
//
// Error bodies are {"error": <ErrorName>, "message": ...}. Sessions are
// immutable once created; difficulty scores are computed on first use and
// cached per canonical request.

#include <filesystem>
#include <memory>
#include <string>

#include "eql/session.h"

namespace eql {

struct ServerOptions {
  // When set, sessions and chart bundles are persisted here and reloaded on
  // construction.
  std::filesystem::path state_dir;
};

struct HttpResponse {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

class ApiServer {
 public:
  explicit ApiServer(ServerOptions options = {});
  ~ApiServer();
  ApiServer(const ApiServer&) = delete;
  ApiServer& operator=(const ApiServer&) = delete;

  // Registers a loaded session under `id` (generated when empty).
  std::string AddSession(SessionData data, std::string id = "");
  std::size_t session_count() const;

  // Transport-independent request handling.
  HttpResponse Handle(const std::string& method, const std::string& path,
                      const std::string& body) const;

  // Returns false when the address cannot be bound.
  bool Bind(const std::string& host, int port);
  // Binds an ephemeral port and returns it, or -1.
  int BindToAnyPort(const std::string& host);
  // Blocks serving requests until Stop().
  bool ListenAfterBind();
  void Stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace eql

#endif  // EQL_SERVER_H_
