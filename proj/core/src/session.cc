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

#include "eql/session.h"

#include <charconv>
#include <fstream>
#include <set>

#include "eql/error.h"

namespace eql {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr char kHashedPrefix[] = "hashed:";

json DescribeFile(const fs::path& path) {
  return {{"path", path.generic_string()}, {"digest", FileDigest(path)}};
}

fs::path Resolve(const fs::path& base, const std::string& p) {
  if (p.empty()) return {};
  fs::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

json ReadJsonFile(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kParseError, "cannot open '" + path.string() + "'");
  }
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError,
                "ParseError(" + path.string() + "): " + e.what());
  }
}

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write '" + path.string() + "'");
  out << text;
}

}  // namespace

SessionData LoadSession(const InputPaths& paths, std::uint64_t seed) {
  if (paths.corpus.empty() || paths.predictions.empty()) {
    throw Error(ErrorCode::kConfigError,
                "ConfigError: both a corpus and a predictions file are required");
  }
  SessionData s;
  s.seed = seed;
  s.corpus = LoadCorpus(paths.corpus);
  s.runs = LoadPredictions(paths.predictions,
                           PredictionFormatFor(paths.predictions), s.corpus);
  s.inputs["corpus"] = DescribeFile(paths.corpus);
  s.inputs["predictions"] = DescribeFile(paths.predictions);

  const std::string& emb = paths.embeddings;
  if (emb.rfind(kHashedPrefix, 0) == 0) {
    const std::string dim_text = emb.substr(sizeof(kHashedPrefix) - 1);
    std::size_t dim = 0;
    auto [p, ec] = std::from_chars(dim_text.data(),
                                   dim_text.data() + dim_text.size(), dim);
    if (ec != std::errc() || p != dim_text.data() + dim_text.size()) {
      throw Error(ErrorCode::kConfigError,
                  "ConfigError: bad featurizer spec '" + emb + "'");
    }
    s.embeddings = FallbackFeaturize(s.corpus, dim, seed);
    s.embedding_source = "hashed_bow(dim=" + dim_text + ",seed=" +
                         std::to_string(seed) + ")";
    s.inputs["embeddings"] = {{"featurizer", "hashed_bow"}, {"dim", dim}};
  } else if (!emb.empty()) {
    const fs::path path(emb);
    s.embeddings = LoadEmbeddings(path, EmbeddingFormatFor(path));
    s.embedding_source = "file";
    s.inputs["embeddings"] = DescribeFile(path);
  } else if (auto inline_vectors = EmbeddingsFromCorpus(s.corpus)) {
    s.embeddings = std::move(inline_vectors);
    s.embedding_source = "corpus";
  }
  if (!paths.holdout.empty()) {
    s.holdout = LoadHoldout(paths.holdout, s.corpus);
    s.inputs["holdout"] = DescribeFile(paths.holdout);
  }
  s.inputs["embedding_source"] = s.embedding_source;
  return s;
}

const EmbeddingFile& RequireEmbeddings(const SessionData& session) {
  if (!session.embeddings) {
    throw Error(ErrorCode::kMissingEmbedding,
                "MissingEmbedding: this method needs sample vectors; pass "
                "--embeddings <file> or --embeddings hashed:<dim>");
  }
  return *session.embeddings;
}

void PersistSession(const SessionData& session, const fs::path& dir) {
  fs::create_directories(dir);
  SaveCorpus(session.corpus, dir / "corpus.jsonl");
  SavePredictions(session.runs, session.corpus, dir / "predictions.jsonl",
                  PredictionFormat::kJsonl);
  if (session.embeddings) {
    SaveEmbeddings(*session.embeddings, dir / "embeddings.jsonl",
                   EmbeddingFormat::kJsonl);
  }
  if (session.holdout) {
    std::string ids;
    for (const std::string& id : session.holdout->sample_ids) ids += id + "\n";
    WriteText(dir / "holdout.txt", ids);
  }
  json meta = {{"session_schema", 1},
               {"inputs", session.inputs},
               {"embedding_source", session.embedding_source},
               {"seed", session.seed},
               {"has_embeddings", session.embeddings.has_value()},
               {"has_holdout", session.holdout.has_value()}};
  WriteText(dir / "session.json", meta.dump(2) + "\n");
}

SessionData LoadPersistedSession(const fs::path& dir) {
  const json meta = ReadJsonFile(dir / "session.json");
  SessionData s;
  try {
    s.inputs = meta.at("inputs");
    s.embedding_source = meta.at("embedding_source").get<std::string>();
    s.seed = meta.at("seed").get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError,
                "ParseError(" + (dir / "session.json").string() + "): " + e.what());
  }
  s.corpus = LoadCorpus(dir / "corpus.jsonl");
  s.runs = LoadPredictions(dir / "predictions.jsonl", PredictionFormat::kJsonl,
                           s.corpus);
  if (meta.value("has_embeddings", false)) {
    s.embeddings = LoadEmbeddings(dir / "embeddings.jsonl", EmbeddingFormat::kJsonl);
  }
  if (meta.value("has_holdout", false)) {
    s.holdout = LoadHoldout(dir / "holdout.txt", s.corpus);
  }
  return s;
}

json DifficultyRequest::ToJson() const {
  json j = {{"method", MethodName(kind)}};
  switch (kind) {
    case MethodKind::kWsbiasAlg1:
      j["m"] = m;
      j["t"] = t;
      j["seed"] = seed;
      break;
    case MethodKind::kWood:
      j["sts_pct"] = sts_pct;
      break;
    default:
      break;
  }
  return j;
}

DifficultyRequest DifficultyRequest::FromJson(const json& j) {
  DifficultyRequest r;
  try {
    r.kind = ParseMethodKind(j.at("method").get<std::string>());
    const json params = j.value("params", json::object());
    auto pick = [&](const char* key) -> const json* {
      if (params.contains(key)) return &params[key];
      if (j.contains(key)) return &j[key];
      return nullptr;
    };
    if (const json* v = pick("sts_pct")) r.sts_pct = v->get<double>();
    if (const json* v = pick("m")) r.m = v->get<int>();
    if (const json* v = pick("t")) r.t = v->get<int>();
    if (const json* v = pick("seed")) r.seed = v->get<std::uint64_t>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfigError,
                std::string("ConfigError: bad difficulty request: ") + e.what());
  }
  return r;
}

std::vector<DifficultyScore> ComputeDifficulty(const SessionData& session,
                                               const DifficultyRequest& request) {
  switch (request.kind) {
    case MethodKind::kWsbiasAlg1: {
      WithinTestParams p;
      p.m = request.m;
      p.t = request.t;
      p.seed = request.seed;
      p.holdout = session.holdout;
      p.embedding_source = session.embedding_source;
      return {BiasWithinTest(session.corpus, RequireEmbeddings(session), p)};
    }
    case MethodKind::kWsbiasAlg2: {
      AcrossParams p;
      p.embedding_source = session.embedding_source;
      return {BiasAcrossTrainTest(session.corpus, RequireEmbeddings(session), p)};
    }
    case MethodKind::kWood: {
      if (!(request.sts_pct > 0.0 && request.sts_pct <= 100.0)) {
        throw Error(ErrorCode::kConfigError,
                    "ConfigError: --sts-pct must be in (0, 100]");
      }
      const StsMatrix sts =
          ComputeSts(session.corpus, RequireEmbeddings(session));
      return {WoodDifficulty(sts, request.sts_pct, session.embedding_source)};
    }
    case MethodKind::kWmprob: {
      std::vector<DifficultyScore> out;
      for (const ModelRun& run : session.runs) {
        out.push_back(WmprobDifficulty(run));
      }
      return out;
    }
  }
  return {};
}

json RankRequest::ToJson() const {
  json j = difficulty.ToJson();
  j["split"] = eql::ToJson(split);
  j["scheme"] = eql::ToJson(scheme);
  return j;
}

RankRequest RankRequest::FromJson(const json& j) {
  if (!j.is_object()) {
    throw Error(ErrorCode::kConfigError, "ConfigError: request must be an object");
  }
  RankRequest r;
  r.difficulty = DifficultyRequest::FromJson(j);
  r.split = SplitConfigFromJson(j.value("split", json{{"n", 2}}));
  r.scheme = WeightSchemeFromJson(j.value("scheme", json{{"case", 1}}), r.split.n);
  return r;
}

RankOutput Rank(const SessionData& session, const RankRequest& request,
                std::span<const DifficultyScore> scores) {
  const std::size_t models = session.runs.size();
  const bool per_model = request.difficulty.kind == MethodKind::kWmprob;
  if (scores.empty() || (per_model && scores.size() != models)) {
    throw Error(ErrorCode::kProvenanceError,
                "ProvenanceError: difficulty scores do not match the request");
  }
  WeightScheme scheme = request.scheme;
  // Confidence-based difficulty always uses the reciprocal reading.
  scheme.reciprocate = scores.front().method.ConfidenceBased();

  std::vector<SplitAssignment> splits;
  splits.reserve(scores.size());
  for (const DifficultyScore& s : scores) {
    if (s.method.kind != request.difficulty.kind) {
      throw Error(ErrorCode::kProvenanceError,
                  "ProvenanceError: got " + s.method.Id() + " scores for a " +
                      std::string(MethodName(request.difficulty.kind)) +
                      " request");
    }
    splits.push_back(FormSplits(s, request.split, scheme.reciprocate));
  }
  std::vector<ModelDifficulty> inputs(models);
  for (std::size_t i = 0; i < models; ++i) {
    const std::size_t k = per_model ? i : 0;
    if (per_model && scores[k].method.model_id != session.runs[i].model_id()) {
      throw Error(ErrorCode::kProvenanceError,
                  "ProvenanceError: confidence scores out of model order");
    }
    inputs[i] = ModelDifficulty{&scores[k], &splits[k]};
  }

  json provenance = {{"request", request.ToJson()},
                     {"scheme_applied", eql::ToJson(scheme)},
                     {"seed", session.seed},
                     {"inputs", session.inputs}};
  if (!per_model) {
    provenance["difficulty"] = {{"method_id", scores.front().method.Id()},
                                {"params", scores.front().params},
                                {"undefined", scores.front().undefined_ids.size()},
                                {"warnings", scores.front().warnings}};
  }
  RankOutput out;
  out.view = BuildLeaderboard(session.runs, session.corpus, inputs, scheme,
                              std::move(provenance));
  out.bundle = BuildChartBundle(out.view, session.runs, session.corpus, inputs);
  for (std::size_t i = 0; i < models; ++i) {
    out.metrics.push_back(WeightedMetric(session.runs[i], session.corpus,
                                         *inputs[i].scores, *inputs[i].splits,
                                         scheme));
  }
  return out;
}

SessionManifest SessionManifest::FromJson(const json& j, const fs::path& base_dir) {
  if (!j.is_object()) {
    throw Error(ErrorCode::kConfigError, "ConfigError: manifest must be an object");
  }
  SessionManifest m;
  try {
    m.inputs.corpus = Resolve(base_dir, j.value("corpus", std::string()));
    m.inputs.predictions = Resolve(base_dir, j.value("predictions", std::string()));
    const std::string emb = j.value("embeddings", std::string());
    m.inputs.embeddings = emb.rfind(kHashedPrefix, 0) == 0
                              ? emb
                              : Resolve(base_dir, emb).generic_string();
    m.inputs.holdout = Resolve(base_dir, j.value("holdout", std::string()));
    m.seed = j.value("seed", std::uint64_t{0});
    m.out = Resolve(base_dir, j.value("out", std::string()));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfigError,
                std::string("ConfigError: bad manifest: ") + e.what());
  }
  if (j.contains("method")) {
    json request = j;
    if (!request.contains("seed")) request["seed"] = m.seed;
    m.request = RankRequest::FromJson(request);
  } else {
    m.request.split = SplitConfigFromJson(j.value("split", json{{"n", 2}}));
    m.request.scheme = WeightSchemeFromJson(
        j.value("scheme", json{{"case", 1}}), m.request.split.n);
    m.request.difficulty.seed = m.seed;
  }
  return m;
}

SessionManifest LoadManifest(const fs::path& path) {
  return SessionManifest::FromJson(ReadJsonFile(path), path.parent_path());
}

}  // namespace eql
