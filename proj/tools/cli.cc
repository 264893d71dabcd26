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

#include "cli.h"

#include <cctype>
#include <csignal>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <pthread.h>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "eql/error.h"
#include "eql/server.h"
#include "eql/session.h"

namespace eql {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct Flags {
  std::string manifest, corpus, predictions, embeddings, holdout, out;
  std::string method, split_mode, scale, state_dir, host = "127.0.0.1";
  double sts_pct = 25.0, d = 1.0, e = -1.0;
  int m = 64, t = 0, splits = 2, case_id = 1, port = 8080;
  std::uint64_t seed = 0;
  std::vector<double> thresholds, weights;

  CLI::Option *o_manifest, *o_corpus, *o_predictions, *o_embeddings,
      *o_holdout, *o_out, *o_method, *o_sts_pct, *o_m, *o_t, *o_seed,
      *o_splits, *o_split_mode, *o_thresholds, *o_case, *o_weights, *o_scale,
      *o_d, *o_e;
};

void AddFlags(CLI::App* cmd, Flags& f, bool serve) {
  auto env = [](CLI::Option* o, const char* name) {
    return o->envname(std::string("EQL_") + name);
  };
  f.o_manifest = env(cmd->add_option("--manifest", f.manifest,
                                     "JSON manifest with inputs and settings"),
                     "MANIFEST");
  f.o_corpus = env(cmd->add_option("--corpus", f.corpus, "Corpus JSONL"), "CORPUS");
  f.o_predictions = env(cmd->add_option("--predictions", f.predictions,
                                        "Predictions JSONL or CSV"),
                        "PREDICTIONS");
  f.o_embeddings = env(cmd->add_option("--embeddings", f.embeddings,
                                       "Embeddings .jsonl/.bin or hashed:<dim>"),
                       "EMBEDDINGS");
  f.o_holdout = env(cmd->add_option("--holdout", f.holdout,
                                    "Test ids held out of the within-test bias"),
                    "HOLDOUT");
  f.o_seed = env(cmd->add_option("--seed", f.seed, "Random seed"), "SEED");
  f.o_method = env(cmd->add_option("--method", f.method,
                                   "wsbias1, wsbias2, wood or wmprob")
                       ->check(CLI::IsMember({"wsbias1", "wsbias2", "wood",
                                              "wmprob", "wsbias_alg1",
                                              "wsbias_alg2"})),
                   "METHOD");
  f.o_sts_pct = env(cmd->add_option("--sts-pct", f.sts_pct,
                                    "Percent of most similar training samples"),
                    "STS_PCT");
  f.o_m = env(cmd->add_option("--m", f.m, "Iterations of the within-test bias"),
              "M");
  f.o_t = env(cmd->add_option("--t", f.t, "Training subset size (0 = auto)"), "T");
  f.o_splits = env(cmd->add_option("--splits", f.splits, "Number of splits"),
                   "SPLITS");
  f.o_split_mode = env(cmd->add_option("--split-mode", f.split_mode,
                                       "equal, threshold or manual")
                           ->check(CLI::IsMember({"equal", "threshold", "manual"})),
                       "SPLIT_MODE");
  f.o_thresholds = env(cmd->add_option("--thresholds", f.thresholds,
                                       "Comma separated manual thresholds")
                           ->delimiter(','),
                       "THRESHOLDS");
  f.o_case = env(cmd->add_option("--case", f.case_id, "Weighting preset 1-9"),
                 "CASE");
  f.o_weights = env(cmd->add_option("--weights", f.weights,
                                    "Comma separated split weights b_i")
                        ->delimiter(','),
                    "WEIGHTS");
  f.o_scale = env(cmd->add_option("--scale", f.scale,
                                  "linear_add, linear_sub, log or square"),
                  "SCALE");
  f.o_d = env(cmd->add_option("--d", f.d, "Reward for a correct prediction"), "D");
  f.o_e = env(cmd->add_option("--e", f.e, "Reward for an incorrect prediction"),
              "E");
  f.o_out = env(cmd->add_option("--out", f.out, "Output directory"), "OUT");
  if (serve) {
    env(cmd->add_option("--port", f.port, "Port to listen on (0 = any)"), "PORT");
    env(cmd->add_option("--host", f.host, "Address to bind"), "HOST");
    env(cmd->add_option("--state-dir", f.state_dir,
                        "Directory for persisted sessions"),
        "STATE_DIR");
  }
}

std::string CsvField(const std::string& v) {
  if (v.find_first_of(",\"\r\n") == std::string::npos) return v;
  std::string quoted = "\"";
  for (char c : v) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  return quoted + '"';
}

bool Given(const CLI::Option* o) { return o->count() > 0; }

json ReadJson(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kParseError, "ParseError: cannot open '" +
                                            path.string() + "'");
  }
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError,
                "ParseError(" + path.string() + "): " + e.what());
  }
}

// The manifest document with command-line flags applied on top.
json ManifestJson(const Flags& f, fs::path* base) {
  json j = json::object();
  const bool from_file = Given(f.o_manifest);
  if (from_file) {
    j = ReadJson(f.manifest);
    if (!j.is_object()) {
      throw Error(ErrorCode::kConfigError, "ConfigError: manifest must be an object");
    }
    *base = fs::path(f.manifest).parent_path();
  }
  auto path_flag = [&](const CLI::Option* o, const std::string& v, const char* key) {
    if (!Given(o)) return;
    j[key] = from_file ? fs::absolute(v).lexically_normal().generic_string() : v;
  };
  path_flag(f.o_corpus, f.corpus, "corpus");
  path_flag(f.o_predictions, f.predictions, "predictions");
  path_flag(f.o_holdout, f.holdout, "holdout");
  path_flag(f.o_out, f.out, "out");
  if (Given(f.o_embeddings)) {
    if (f.embeddings.rfind("hashed:", 0) == 0) {
      j["embeddings"] = f.embeddings;
    } else {
      path_flag(f.o_embeddings, f.embeddings, "embeddings");
    }
  }
  if (Given(f.o_seed)) j["seed"] = f.seed;
  if (Given(f.o_method)) j["method"] = f.method;
  auto param = [&](const CLI::Option* o, const char* key, const json& v) {
    if (!Given(o)) return;
    if (!j.contains("params") || !j["params"].is_object()) j["params"] = json::object();
    j["params"][key] = v;
  };
  param(f.o_sts_pct, "sts_pct", f.sts_pct);
  param(f.o_m, "m", f.m);
  param(f.o_t, "t", f.t);

  json split = j.value("split", json{{"n", 2}});
  if (!split.is_object()) split = json::object();
  if (Given(f.o_splits)) split["n"] = f.splits;
  if (Given(f.o_split_mode)) {
    split["mode"] = f.split_mode;
    if (f.split_mode != "manual" && !Given(f.o_thresholds)) split.erase("thresholds");
  }
  if (Given(f.o_thresholds)) split["thresholds"] = f.thresholds;
  j["split"] = split;

  json scheme = j.value("scheme", json{{"case", 1}});
  if (!scheme.is_object()) scheme = json::object();
  if (Given(f.o_case)) scheme = json{{"case", f.case_id}};
  if (Given(f.o_weights)) {
    scheme["b"] = f.weights;
    if (!Given(f.o_scale)) scheme.erase("scale");
  }
  if (Given(f.o_scale)) {
    scheme["scale"] = f.scale;
    if (!Given(f.o_weights)) scheme.erase("b");
  }
  if (Given(f.o_d)) scheme["d"] = f.d;
  if (Given(f.o_e)) scheme["e"] = f.e;
  j["scheme"] = scheme;
  return j;
}

SessionManifest Manifest(const Flags& f, json* raw = nullptr) {
  fs::path base;
  json j = ManifestJson(f, &base);
  if (j.value("corpus", std::string()).empty() ||
      j.value("predictions", std::string()).empty()) {
    throw Error(ErrorCode::kConfigError,
                "ConfigError: --corpus and --predictions are required "
                "(directly or through --manifest)");
  }
  SessionManifest m = SessionManifest::FromJson(j, base);
  if (raw) *raw = std::move(j);
  return m;
}

const fs::path& RequireOut(const SessionManifest& m) {
  if (m.out.empty()) {
    throw Error(ErrorCode::kConfigError, "ConfigError: --out is required");
  }
  return m.out;
}

void WriteText(const fs::path& path, const std::string& text, std::ostream& out) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f || !(f << text) || !f.flush()) {
    throw Error(ErrorCode::kIoError, "IoError: cannot write '" + path.string() + "'");
  }
  out << "wrote " << path.generic_string() << '\n';
}

std::string ScoreFileName(const DifficultyScore& s) {
  std::string name(MethodName(s.method.kind));
  if (s.method.kind == MethodKind::kWood) {
    std::ostringstream pct;
    pct << s.method.sts_pct;
    name += "-p" + pct.str();
  } else if (s.method.kind == MethodKind::kWmprob) {
    name += "-" + s.method.model_id;
  }
  for (char& c : name) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '-' ||
                    c == '_' || c == '.';
    if (!ok) c = '_';
  }
  return name + ".scores.jsonl";
}

int CmdIngest(const Flags& f, std::ostream& out) {
  const SessionManifest m = Manifest(f);
  const SessionData s = LoadSession(m.inputs, m.seed);
  out << "corpus " << s.corpus.name() << ": " << s.corpus.samples().size()
      << " samples (" << s.corpus.Count(Partition::kTrain) << " train, "
      << s.corpus.Count(Partition::kTest) << " test), "
      << s.corpus.label_vocab().size() << " labels\n";
  out << "embeddings: " << s.embedding_source << '\n';
  out << std::fixed << std::setprecision(4);
  for (const ModelRun& run : s.runs) {
    out << "model " << run.model_id() << ": accuracy "
        << Accuracy(run, s.corpus) << '\n';
  }
  if (!m.out.empty()) {
    PersistSession(s, m.out);
    out << "wrote " << m.out.generic_string() << '\n';
  }
  return 0;
}

int CmdDifficulty(const Flags& f, std::ostream& out, std::ostream& err) {
  json raw;
  const SessionManifest m = Manifest(f, &raw);
  const fs::path& dir = RequireOut(m);
  std::vector<DifficultyRequest> requests;
  if (!Given(f.o_method) && raw.contains("methods") && raw["methods"].is_array()) {
    for (json r : raw["methods"]) {
      if (r.is_object() && !r.contains("seed")) r["seed"] = m.seed;
      requests.push_back(DifficultyRequest::FromJson(r));
    }
  } else {
    requests.push_back(m.request.difficulty);
  }
  const SessionData s = LoadSession(m.inputs, m.seed);
  for (const DifficultyRequest& request : requests) {
    for (DifficultyScore& score : ComputeDifficulty(s, request)) {
      for (const std::string& w : score.warnings) err << "warning: " << w << '\n';
      score.provenance = {{"request", request.ToJson()},
                          {"seed", s.seed},
                          {"inputs", s.inputs}};
      std::ostringstream text;
      WriteScores(score, text);
      WriteText(dir / ScoreFileName(score), text.str(), out);
    }
  }
  return 0;
}

void PrintTable(const LeaderboardView& view, std::ostream& out) {
  out << std::fixed << std::setprecision(4);
  out << "rank  model  score  accuracy  baseline_rank\n";
  for (const LeaderboardRow& r : view.rows) {
    out << r.rank << "  " << r.model_id << "  " << r.overall << "  "
        << r.accuracy << "  " << r.baseline_rank << (r.changed ? "  *" : "")
        << '\n';
  }
  out << "changed " << view.changed.size() << " of " << view.rows.size()
      << ", kendall tau " << view.tau << '\n';
}

int CmdRank(const Flags& f, std::ostream& out, bool export_all) {
  const SessionManifest m = Manifest(f);
  const fs::path& dir = RequireOut(m);
  const SessionData s = LoadSession(m.inputs, m.seed);
  const std::vector<DifficultyScore> scores = ComputeDifficulty(s, m.request.difficulty);
  const RankOutput r = Rank(s, m.request, scores);
  const std::string provenance_line = "# provenance " + r.view.provenance.dump() + "\n";

  WriteText(dir / "leaderboard.json", ToJson(r.view).dump(2) + "\n", out);
  WriteText(dir / "leaderboard.csv", provenance_line + ToCsv(r.view), out);
  WriteText(dir / "charts.json", ToJson(r.bundle).dump(2) + "\n", out);
  if (export_all) {
    std::ostringstream csv;
    csv << provenance_line << "model,sample_id,contribution\n";
    for (const MetricResult& mr : r.metrics) {
      for (const auto& [id, c] : mr.per_sample) {
        json cell = c;
        csv << CsvField(mr.model_id) << ',' << CsvField(id) << ',' << cell.dump() << '\n';
      }
    }
    WriteText(dir / "contributions.csv", csv.str(), out);
    const json inflation = {{"provenance", r.view.provenance},
                            {"inflation", ToJson(Inflation(r.view))}};
    WriteText(dir / "inflation.json", inflation.dump(2) + "\n", out);
    for (const DifficultyScore& score : scores) {
      DifficultyScore copy = score;
      copy.provenance = {{"request", m.request.difficulty.ToJson()},
                         {"seed", s.seed},
                         {"inputs", s.inputs}};
      std::ostringstream text;
      WriteScores(copy, text);
      WriteText(dir / ScoreFileName(copy), text.str(), out);
    }
  }
  PrintTable(r.view, out);
  return 0;
}

int CmdServe(const Flags& f, std::ostream& out, std::ostream& err) {
  ServerOptions options;
  options.state_dir = f.state_dir;
  // Fail fast: the default session must load before anything binds.
  std::optional<SessionData> preload;
  if (Given(f.o_manifest) || Given(f.o_corpus) || Given(f.o_predictions)) {
    const SessionManifest m = Manifest(f);
    preload = LoadSession(m.inputs, m.seed);
  }
  ApiServer server(options);
  if (preload) server.AddSession(std::move(*preload), "default");

  int port = f.port;
  if (port == 0) {
    port = server.BindToAnyPort(f.host);
    if (port < 0) {
      err << "IoError: cannot bind " << f.host << '\n';
      return 3;
    }
  } else if (!server.Bind(f.host, port)) {
    err << "IoError: cannot bind " << f.host << ':' << port << '\n';
    return 3;
  }
  out << "listening on " << f.host << ':' << port << std::endl;

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    server.Stop();
  });
  waiter.detach();
  server.ListenAfterBind();
  return 0;
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err) {
  CLI::App app("Difficulty-weighted leaderboards", "eql");
  app.require_subcommand(1);
  app.set_version_flag("--version", "eql 0.1.0");

  Flags ingest_f, difficulty_f, rank_f, export_f, serve_f;
  CLI::App* ingest = app.add_subcommand("ingest", "Validate inputs and write a session");
  CLI::App* difficulty = app.add_subcommand("difficulty", "Compute difficulty scores");
  CLI::App* rank = app.add_subcommand("rank", "Build the weighted leaderboard");
  CLI::App* exp = app.add_subcommand(
      "export", "Leaderboard plus per-sample contributions and inflation report");
  CLI::App* serve = app.add_subcommand("serve", "Run the HTTP API");
  AddFlags(ingest, ingest_f, false);
  AddFlags(difficulty, difficulty_f, false);
  AddFlags(rank, rank_f, false);
  AddFlags(exp, export_f, false);
  AddFlags(serve, serve_f, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (ingest->parsed()) return CmdIngest(ingest_f, out);
    if (difficulty->parsed()) return CmdDifficulty(difficulty_f, out, err);
    if (rank->parsed()) return CmdRank(rank_f, out, false);
    if (exp->parsed()) return CmdRank(export_f, out, true);
    if (serve->parsed()) return CmdServe(serve_f, out, err);
  } catch (const Error& e) {
    const std::string what = e.what();
    if (what.rfind(e.name(), 0) == 0) {
      err << what << '\n';
    } else {
      err << e.name() << ": " << what << '\n';
    }
    return ExitCodeFor(e.code());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 3;
  }
  return 1;
}

}  // namespace eql
