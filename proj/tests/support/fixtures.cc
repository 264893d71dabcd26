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

#include "support/fixtures.h"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

#include "eql/ingest.h"

namespace eql::testing {
namespace fs = std::filesystem;

namespace {

const char* const kWords[3][4] = {{"dull", "awful", "boring", "poor"},
                                  {"great", "lovely", "sharp", "fine"},
                                  {"plain", "mild", "so", "okay"}};

// Box-Muller over the portable uniform draw.
double Gaussian(Rng& rng) {
  const double u = 1.0 - UniformUnit(rng);
  const double v = UniformUnit(rng);
  return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * M_PI * v);
}

std::string IdOf(const char* prefix, std::size_t i, std::size_t width) {
  std::string digits = std::to_string(i);
  if (digits.size() < width) digits.insert(0, width - digits.size(), '0');
  return prefix + digits;
}

}  // namespace

Corpus MakeCorpus(Rng& rng, const CorpusShape& shape, std::string name) {
  std::vector<std::string> vocab;
  for (int l = 0; l < shape.labels; ++l) vocab.push_back("c" + std::to_string(l));
  std::vector<Sample> samples;
  auto add = [&](const char* prefix, std::size_t count, Partition part) {
    for (std::size_t i = 0; i < count; ++i) {
      Sample s;
      s.id = IdOf(prefix, i, 4);
      // Round-robin first so every class is present, random afterwards.
      s.gold_label = i < static_cast<std::size_t>(shape.labels)
                         ? static_cast<LabelId>(i)
                         : static_cast<LabelId>(UniformBelow(
                               rng, static_cast<std::uint64_t>(shape.labels)));
      s.partition = part;
      std::string text;
      for (int w = 0; w < 5; ++w) {
        const int bank = UniformUnit(rng) < 0.7 ? s.gold_label % 3
                                                : static_cast<int>(UniformBelow(rng, 3));
        if (!text.empty()) text += ' ';
        text += kWords[bank][UniformBelow(rng, 4)];
      }
      s.text = text;
      if (shape.vectors) {
        std::vector<double> v(shape.dim);
        for (std::size_t k = 0; k < shape.dim; ++k) v[k] = Gaussian(rng);
        v[s.gold_label % shape.dim] += shape.separation;
        s.vector = v;
      }
      samples.push_back(std::move(s));
    }
  };
  add("tr", shape.train, Partition::kTrain);
  add("te", shape.test, Partition::kTest);
  return Corpus(std::move(name), vocab, std::move(samples));
}

std::vector<ModelRun> MakeRuns(Rng& rng, const Corpus& corpus, int models,
                               double lo, double hi) {
  std::vector<ModelRun> runs;
  const auto labels = static_cast<std::uint64_t>(corpus.label_vocab().size());
  for (int m = 0; m < models; ++m) {
    const double p =
        models == 1 ? hi : lo + (hi - lo) * m / static_cast<double>(models - 1);
    std::vector<PredictionRecord> records;
    for (const std::string& id : corpus.Ids(Partition::kTest)) {
      const LabelId gold = corpus.At(id).gold_label;
      LabelId pred = gold;
      if (UniformUnit(rng) >= p) {
        pred = static_cast<LabelId>((gold + 1 + UniformBelow(rng, labels - 1)) %
                                    labels);
      }
      records.push_back({id, pred, 0.5 + 0.5 * UniformUnit(rng)});
    }
    runs.emplace_back("model" + std::to_string(m), std::move(records), corpus);
  }
  return runs;
}

std::vector<ModelRun> RunsFromPattern(const Corpus& corpus,
                                      const std::vector<std::vector<bool>>& correct,
                                      const std::vector<std::string>& model_ids) {
  const std::vector<std::string> ids = corpus.Ids(Partition::kTest);
  const auto labels = static_cast<LabelId>(corpus.label_vocab().size());
  std::vector<ModelRun> runs;
  for (std::size_t m = 0; m < correct.size(); ++m) {
    if (correct[m].size() != ids.size()) throw std::invalid_argument("pattern size");
    std::vector<PredictionRecord> records;
    for (std::size_t k = 0; k < ids.size(); ++k) {
      const LabelId gold = corpus.At(ids[k]).gold_label;
      records.push_back({ids[k], correct[m][k] ? gold : (gold + 1) % labels, 0.9});
    }
    runs.emplace_back(model_ids[m], std::move(records), corpus);
  }
  return runs;
}

Corpus TestOnlyCorpus(std::size_t n, int labels) {
  std::vector<std::string> vocab;
  for (int l = 0; l < labels; ++l) vocab.push_back("c" + std::to_string(l));
  std::vector<Sample> samples;
  for (std::size_t i = 0; i < n; ++i) {
    Sample s;
    s.id = IdOf("s", i, 2);
    s.text = "sample " + std::to_string(i);
    s.gold_label = static_cast<LabelId>(i % static_cast<std::size_t>(labels));
    s.partition = Partition::kTest;
    samples.push_back(std::move(s));
  }
  return Corpus("test-only", vocab, std::move(samples));
}

DifficultyScore ScoresFor(const Corpus& corpus, std::vector<double> b,
                          MethodKind kind) {
  const std::vector<std::string> ids = corpus.Ids(Partition::kTest);
  if (ids.size() != b.size()) throw std::invalid_argument("score count");
  DifficultyScore s;
  s.method.kind = kind;
  if (kind == MethodKind::kWood) s.method.sts_pct = 25.0;
  for (std::size_t i = 0; i < ids.size(); ++i) s.values[ids[i]] = b[i];
  return s;
}

TempDir::TempDir() {
  std::random_device rd;
  for (int attempt = 0; attempt < 100; ++attempt) {
    fs::path p = fs::temp_directory_path() /
                 ("eql-test-" + std::to_string(rd()) + std::to_string(rd()));
    if (fs::create_directory(p)) {
      path_ = p;
      return;
    }
  }
  throw std::runtime_error("cannot create a temporary directory");
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::string ReadFile(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteFile(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path.string());
}

SessionFiles WriteSessionFiles(const fs::path& dir, std::uint64_t seed,
                               const CorpusShape& shape, int models) {
  Rng rng(seed);
  const Corpus corpus = MakeCorpus(rng, shape, "fixture");
  const auto runs = MakeRuns(rng, corpus, models);
  fs::create_directories(dir);
  SessionFiles files{dir / "corpus.jsonl", dir / "predictions.jsonl"};
  SaveCorpus(corpus, files.corpus);
  SavePredictions(runs, corpus, files.predictions, PredictionFormat::kJsonl);
  return files;
}

}  // namespace eql::testing
