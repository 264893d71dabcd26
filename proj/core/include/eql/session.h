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

#ifndef EQL_SESSION_H_
#define EQL_SESSION_H_

// End-to-end pipeline shared by the command-line tool and the HTTP server:
// load inputs, compute difficulty scores, rank models, persist sessions.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "eql/difficulty.h"
#include "eql/ingest.h"
#include "eql/leaderboard.h"
#include "eql/plotdata.h"
#include "eql/scoring.h"
#include "eql/types.h"

namespace eql {

struct InputPaths {
  std::filesystem::path corpus;
  std::filesystem::path predictions;
  // A .jsonl/.bin path, "hashed:<dim>" for the fallback featurizer, or empty
  // to use vectors carried by the corpus (when present).
  std::string embeddings;
  std::filesystem::path holdout;  // optional
};

struct SessionData {
  Corpus corpus;
  std::vector<ModelRun> runs;  // sorted by model id
  std::optional<EmbeddingFile> embeddings;
  std::string embedding_source = "none";
  std::optional<HoldoutMask> holdout;
  std::uint64_t seed = 0;
  nlohmann::json inputs = nlohmann::json::object();  // paths and digests
};

SessionData LoadSession(const InputPaths& paths, std::uint64_t seed);

// Throws MissingEmbedding when the session has no vectors.
const EmbeddingFile& RequireEmbeddings(const SessionData& session);

// Session directory: corpus.jsonl, predictions.jsonl, embeddings.jsonl,
// holdout.txt and session.json.
void PersistSession(const SessionData& session, const std::filesystem::path& dir);
SessionData LoadPersistedSession(const std::filesystem::path& dir);

struct DifficultyRequest {
  MethodKind kind = MethodKind::kWsbiasAlg2;
  double sts_pct = 25.0;
  int m = 64;
  int t = 0;
  std::uint64_t seed = 0;

  // Canonical form: only the members the method reads.
  nlohmann::json ToJson() const;
  static DifficultyRequest FromJson(const nlohmann::json& j);
};

// wmprob yields one score per model (in run order); the others yield one.
std::vector<DifficultyScore> ComputeDifficulty(const SessionData& session,
                                               const DifficultyRequest& request);

struct RankRequest {
  DifficultyRequest difficulty;
  SplitConfig split;
  WeightScheme scheme;

  nlohmann::json ToJson() const;
  // {"method","params":{...},"split":{...},"scheme":{...}}
  static RankRequest FromJson(const nlohmann::json& j);
};

struct RankOutput {
  LeaderboardView view;
  ChartBundle bundle;
  std::vector<MetricResult> metrics;  // in run order
};

// `scores` is the output of ComputeDifficulty for request.difficulty.
RankOutput Rank(const SessionData& session, const RankRequest& request,
                std::span<const DifficultyScore> scores);

struct SessionManifest {
  InputPaths inputs;
  std::uint64_t seed = 0;
  RankRequest request;
  std::filesystem::path out;

  // Relative paths resolve against `base_dir`.
  static SessionManifest FromJson(const nlohmann::json& j,
                                  const std::filesystem::path& base_dir = {});
};

SessionManifest LoadManifest(const std::filesystem::path& path);

}  // namespace eql

#endif  // EQL_SESSION_H_
