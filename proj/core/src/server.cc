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

#include "eql/server.h"

#include <fstream>
#include <future>
#include <map>
#include <mutex>
#include <random>
#include <shared_mutex>
#include <sstream>
#include <vector>

#include <httplib.h>
#include <nlohmann/json.hpp>

#include "eql/error.h"

namespace eql {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

using ScoreSet = std::vector<DifficultyScore>;

struct SessionEntry {
  explicit SessionEntry(SessionData d) : data(std::move(d)) {}

  const SessionData data;
  fs::path dir;  // empty when not persisted

  mutable std::mutex mu;
  mutable std::map<std::string, std::shared_future<std::shared_ptr<const ScoreSet>>>
      difficulty;
  mutable std::map<std::string, std::string> bundles;  // bundle id -> body
};

HttpResponse JsonResponse(int status, const json& body) {
  return HttpResponse{status, "application/json", body.dump()};
}

HttpResponse ErrorResponse(int status, std::string_view code,
                           const std::string& message) {
  return JsonResponse(status, {{"error", code}, {"message", message}});
}

int StatusFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotFound: return 404;
    case ErrorCode::kIoError: return 500;
    default: return 422;
  }
}

std::vector<std::string> SplitPath(const std::string& path) {
  std::vector<std::string> parts;
  std::stringstream ss(path);
  std::string part;
  while (std::getline(ss, part, '/')) {
    if (!part.empty()) parts.push_back(part);
  }
  return parts;
}

std::string NewSessionId() {
  static std::mutex mu;
  static std::mt19937_64 rng{std::random_device{}()};
  std::lock_guard<std::mutex> lock(mu);
  return HexDigest(rng());
}

json ScoresToJson(const ScoreSet& scores) {
  json out = json::array();
  for (const DifficultyScore& s : scores) {
    out.push_back({{"method", MethodName(s.method.kind)},
                   {"method_id", s.method.Id()},
                   {"params", s.params},
                   {"values", s.values},
                   {"undefined_ids", s.undefined_ids},
                   {"warnings", s.warnings}});
  }
  return out;
}

}  // namespace

struct ApiServer::Impl {
  ServerOptions options;
  httplib::Server http;

  mutable std::shared_mutex sessions_mu;
  std::map<std::string, std::shared_ptr<SessionEntry>> sessions;

  std::shared_ptr<SessionEntry> Find(const std::string& id) const {
    std::shared_lock lock(sessions_mu);
    auto it = sessions.find(id);
    return it == sessions.end() ? nullptr : it->second;
  }

  std::string Add(SessionData data, std::string id) {
    if (id.empty()) id = NewSessionId();
    auto entry = std::make_shared<SessionEntry>(std::move(data));
    if (!options.state_dir.empty()) {
      entry->dir = options.state_dir / id;
      PersistSession(entry->data, entry->dir);
    }
    std::unique_lock lock(sessions_mu);
    sessions[id] = std::move(entry);
    return id;
  }

  void Restore() {
    if (options.state_dir.empty() || !fs::exists(options.state_dir)) return;
    for (const auto& dirent : fs::directory_iterator(options.state_dir)) {
      if (!dirent.is_directory() || !fs::exists(dirent.path() / "session.json")) {
        continue;
      }
      auto entry =
          std::make_shared<SessionEntry>(LoadPersistedSession(dirent.path()));
      entry->dir = dirent.path();
      sessions[dirent.path().filename().string()] = std::move(entry);
    }
  }

  // Single writer per cache key: the first caller computes, later callers
  // wait on the same future.
  std::shared_ptr<const ScoreSet> Scores(const SessionEntry& entry,
                                         const DifficultyRequest& request) const {
    const std::string key = request.ToJson().dump();
    std::promise<std::shared_ptr<const ScoreSet>> promise;
    std::shared_future<std::shared_ptr<const ScoreSet>> future;
    bool owner = false;
    {
      std::lock_guard<std::mutex> lock(entry.mu);
      auto it = entry.difficulty.find(key);
      if (it == entry.difficulty.end()) {
        future = promise.get_future().share();
        entry.difficulty.emplace(key, future);
        owner = true;
      } else {
        future = it->second;
      }
    }
    if (owner) {
      try {
        promise.set_value(std::make_shared<const ScoreSet>(
            ComputeDifficulty(entry.data, request)));
      } catch (...) {
        promise.set_exception(std::current_exception());
        std::lock_guard<std::mutex> lock(entry.mu);
        entry.difficulty.erase(key);
      }
    }
    return future.get();
  }

  HttpResponse CreateSession(const std::string& body) {
    json j;
    try {
      j = json::parse(body);
    } catch (const json::exception& e) {
      return ErrorResponse(400, "ParseError", e.what());
    }
    if (!j.is_object() || !j.contains("corpus") || !j.contains("predictions") ||
        !j["corpus"].is_string() || !j["predictions"].is_string()) {
      return ErrorResponse(400, "ParseError",
                           "body needs string fields 'corpus' and 'predictions'");
    }
    InputPaths paths;
    paths.corpus = j["corpus"].get<std::string>();
    paths.predictions = j["predictions"].get<std::string>();
    paths.embeddings = j.value("embeddings", std::string());
    paths.holdout = j.value("holdout", std::string());
    const std::uint64_t seed = j.value("seed", std::uint64_t{0});
    const std::string id = Add(LoadSession(paths, seed), "");
    return JsonResponse(201, {{"session_id", id}});
  }

  HttpResponse Models(const SessionEntry& entry) const {
    json models = json::array();
    for (const ModelRun& run : entry.data.runs) {
      models.push_back({{"model_id", run.model_id()},
                        {"accuracy", Accuracy(run, entry.data.corpus)}});
    }
    return JsonResponse(200, {{"models", models}});
  }

  HttpResponse Difficulty(const SessionEntry& entry, const std::string& body) const {
    json j;
    try {
      j = json::parse(body);
    } catch (const json::exception& e) {
      return ErrorResponse(400, "ParseError", e.what());
    }
    const DifficultyRequest request = DifficultyRequest::FromJson(j);
    const auto scores = Scores(entry, request);
    return JsonResponse(200, {{"request", request.ToJson()},
                              {"scores", ScoresToJson(*scores)}});
  }

  HttpResponse Leaderboard(const std::string& session_id,
                           const SessionEntry& entry,
                           const std::string& body) const {
    json j;
    try {
      j = json::parse(body);
    } catch (const json::exception& e) {
      return ErrorResponse(400, "ParseError", e.what());
    }
    const RankRequest request = RankRequest::FromJson(j);
    const auto scores = Scores(entry, request.difficulty);
    const RankOutput out = Rank(entry.data, request, *scores);
    const std::string bundle_id =
        HexDigest(Fnv1a64(request.ToJson().dump()));
    const std::string bundle_body = ToJson(out.bundle).dump();
    {
      std::lock_guard<std::mutex> lock(entry.mu);
      if (entry.bundles.emplace(bundle_id, bundle_body).second &&
          !entry.dir.empty()) {
        fs::create_directories(entry.dir / "charts");
        std::ofstream f(entry.dir / "charts" / (bundle_id + ".json"),
                        std::ios::trunc);
        f << bundle_body;
      }
    }
    return JsonResponse(
        200, {{"view", ToJson(out.view)},
              {"bundle_id", bundle_id},
              {"chart_url",
               "/sessions/" + session_id + "/charts/" + bundle_id}});
  }

  HttpResponse Chart(const SessionEntry& entry, const std::string& bundle_id) const {
    std::lock_guard<std::mutex> lock(entry.mu);
    auto it = entry.bundles.find(bundle_id);
    if (it == entry.bundles.end() && !entry.dir.empty() &&
        bundle_id.find_first_of("/\\.") == std::string::npos) {
      const fs::path file = entry.dir / "charts" / (bundle_id + ".json");
      if (std::ifstream f(file); f) {
        std::stringstream ss;
        ss << f.rdbuf();
        it = entry.bundles.emplace(bundle_id, ss.str()).first;
      }
    }
    if (it == entry.bundles.end()) {
      return ErrorResponse(404, "NotFound", "unknown bundle '" + bundle_id + "'");
    }
    return HttpResponse{200, "application/json", it->second};
  }
};

ApiServer::ApiServer(ServerOptions options) : impl_(std::make_unique<Impl>()) {
  impl_->options = std::move(options);
  impl_->Restore();
  auto forward = [this](const httplib::Request& req, httplib::Response& res) {
    const HttpResponse r = Handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body, r.content_type);
  };
  // httplib's default adds SO_REUSEPORT, which lets a second server share a
  // busy port; an occupied port must be a bind error instead.
  impl_->http.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  impl_->http.Get(R"(/.*)", forward);
  impl_->http.Post(R"(/.*)", forward);
}

ApiServer::~ApiServer() { Stop(); }

std::string ApiServer::AddSession(SessionData data, std::string id) {
  return impl_->Add(std::move(data), std::move(id));
}

std::size_t ApiServer::session_count() const {
  std::shared_lock lock(impl_->sessions_mu);
  return impl_->sessions.size();
}

HttpResponse ApiServer::Handle(const std::string& method,
                               const std::string& path,
                               const std::string& body) const {
  const std::vector<std::string> parts = SplitPath(path);
  try {
    if (method == "GET" && parts.size() == 1 && parts[0] == "health") {
      return HttpResponse{200, "text/plain", "ok"};
    }
    if (parts.empty() || parts[0] != "sessions") {
      return ErrorResponse(404, "NotFound", "no route for " + path);
    }
    if (parts.size() == 1) {
      if (method != "POST") return ErrorResponse(405, "NotFound", "use POST");
      return impl_->CreateSession(body);
    }
    const auto entry = impl_->Find(parts[1]);
    if (!entry) {
      return ErrorResponse(404, "NotFound", "unknown session '" + parts[1] + "'");
    }
    if (parts.size() == 3 && parts[2] == "models" && method == "GET") {
      return impl_->Models(*entry);
    }
    if (parts.size() == 3 && parts[2] == "difficulty" && method == "POST") {
      return impl_->Difficulty(*entry, body);
    }
    if (parts.size() == 3 && parts[2] == "leaderboard" && method == "POST") {
      return impl_->Leaderboard(parts[1], *entry, body);
    }
    if (parts.size() == 4 && parts[2] == "charts" && method == "GET") {
      return impl_->Chart(*entry, parts[3]);
    }
    return ErrorResponse(404, "NotFound", "no route for " + method + " " + path);
  } catch (const Error& e) {
    return ErrorResponse(StatusFor(e.code()), e.name(), e.what());
  } catch (const std::exception& e) {
    return ErrorResponse(500, "IoError", e.what());
  }
}

bool ApiServer::Bind(const std::string& host, int port) {
  return impl_->http.bind_to_port(host, port);
}

int ApiServer::BindToAnyPort(const std::string& host) {
  return impl_->http.bind_to_any_port(host);
}

bool ApiServer::ListenAfterBind() { return impl_->http.listen_after_bind(); }

void ApiServer::Stop() {
  if (impl_ && impl_->http.is_running()) impl_->http.stop();
}

}  // namespace eql
