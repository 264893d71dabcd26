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

#ifndef EQL_TESTS_SUPPORT_FIXTURES_H_
#define EQL_TESTS_SUPPORT_FIXTURES_H_

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "eql/difficulty.h"
#include "eql/random.h"
#include "eql/types.h"

namespace eql::testing {

struct CorpusShape {
  std::size_t train = 60;
  std::size_t test = 40;
  int labels = 2;
  std::size_t dim = 4;
  double separation = 1.5;  // distance between class means along axis 0
  bool vectors = true;
};

// Gaussian class clusters with short bag-of-words texts.
Corpus MakeCorpus(Rng& rng, const CorpusShape& shape = {},
                  std::string name = "synthetic");

// Models with accuracy levels spread over [lo, hi]; confidence is uniform in
// [0.5, 1].
std::vector<ModelRun> MakeRuns(Rng& rng, const Corpus& corpus, int models,
                               double lo = 0.5, double hi = 0.95);

// Runs with an exact correctness pattern; correct[i][k] is model i on the
// k-th test id in ascending order.
std::vector<ModelRun> RunsFromPattern(const Corpus& corpus,
                                      const std::vector<std::vector<bool>>& correct,
                                      const std::vector<std::string>& model_ids);

// A test-only corpus (no train samples needed by scoring) with ids s00..sNN.
Corpus TestOnlyCorpus(std::size_t n, int labels = 2);

DifficultyScore ScoresFor(const Corpus& corpus, std::vector<double> b,
                          MethodKind kind = MethodKind::kWsbiasAlg2);

class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const {
    return path_ / name;
  }

 private:
  std::filesystem::path path_;
};

// Writes corpus.jsonl and predictions.jsonl under `dir`.
struct SessionFiles {
  std::filesystem::path corpus;
  std::filesystem::path predictions;
};
SessionFiles WriteSessionFiles(const std::filesystem::path& dir, std::uint64_t seed,
                               const CorpusShape& shape = {}, int models = 3);

std::string ReadFile(const std::filesystem::path& path);
void WriteFile(const std::filesystem::path& path, const std::string& text);

}  // namespace eql::testing

#endif  // EQL_TESTS_SUPPORT_FIXTURES_H_
