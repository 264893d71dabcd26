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

#ifndef EQL_DIFFICULTY_H_
#define EQL_DIFFICULTY_H_

// Per-sample difficulty scores B in [0,1]:
//   wsbias_alg1  fraction of correct predictions by linear learners trained
//                on random subsets of the test set itself (holdout removed)
//   wsbias_alg2  fraction of four learners trained on the train set that
//                solve the sample, in {0, .25, .5, .75, 1}
//   wood         mean similarity to the top-p% most similar train samples
//   wmprob       the model's own prediction confidence
// High B means easy for the bias and similarity families. For wmprob B is a
// confidence; split assignment and weights invert it downstream.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "eql/ingest.h"
#include "eql/learners.h"
#include "eql/types.h"

namespace eql {

enum class MethodKind { kWsbiasAlg1, kWsbiasAlg2, kWood, kWmprob };

std::string_view MethodName(MethodKind kind);
// Accepts the canonical names and the CLI spellings wsbias1/wsbias2.
MethodKind ParseMethodKind(std::string_view name);

struct DifficultyMethod {
  MethodKind kind = MethodKind::kWsbiasAlg2;
  double sts_pct = 0.0;  // wood only
  std::string model_id;  // wmprob only

  // e.g. "wsbias_alg1", "wood(p=25)", "wmprob(roberta)".
  std::string Id() const;
  bool ConfidenceBased() const { return kind == MethodKind::kWmprob; }
  bool operator==(const DifficultyMethod&) const = default;
};

struct DifficultyScore {
  DifficultyMethod method;
  nlohmann::json params = nlohmann::json::object();
  std::map<std::string, double> values;
  std::set<std::string> undefined_ids;
  std::vector<std::string> warnings;
  // Free-form run context (seed, input digests); written when not null.
  nlohmann::json provenance;

  std::optional<double> Find(std::string_view sample_id) const;
  bool operator==(const DifficultyScore&) const = default;
};

struct WithinTestParams {
  int m = 64;
  int t = 0;  // 0 selects max(2, floor(1% of |R|))
  std::uint64_t seed = 0;
  // When unset, a stratified random `holdout_fraction` of the test set.
  std::optional<HoldoutMask> holdout;
  double holdout_fraction = 0.1;
  std::string embedding_source = "unspecified";
};

// Redraws allowed per iteration when a subset holds a single class.
inline constexpr int kMaxSubsetRedraws = 100;

// Training subset for one iteration: `t` indices into the (id-sorted)
// scoring population, containing at least two labels. Empty when no such
// subset turned up within kMaxSubsetRedraws draws.
std::vector<std::size_t> DrawTrainingSubset(std::uint64_t seed, int iteration,
                                            std::span<const LabelId> labels,
                                            std::size_t t);

// The two learners trained on every subset, in order.
std::vector<LearnerSpec> WithinTestLearners(std::uint64_t seed, int iteration);

DifficultyScore BiasWithinTest(const Corpus& corpus, const EmbeddingFile& emb,
                               const WithinTestParams& params);

struct AcrossParams {
  std::vector<LearnerSpec> learners;  // empty selects the four defaults
  std::string embedding_source = "unspecified";
};

std::vector<LearnerSpec> DefaultAcrossLearners();

DifficultyScore BiasAcrossTrainTest(const Corpus& corpus,
                                    const EmbeddingFile& emb,
                                    const AcrossParams& params = {});

// Remapped cosine similarity (cos + 1) / 2 between every test sample (rows)
// and every train sample (columns). Zero vectors score 0.5.
class StsMatrix {
 public:
  StsMatrix(std::vector<std::string> test_ids,
            std::vector<std::string> train_ids, std::vector<double> values);

  const std::vector<std::string>& test_ids() const { return test_ids_; }
  const std::vector<std::string>& train_ids() const { return train_ids_; }
  std::span<const double> Row(std::size_t test_index) const {
    return {values_.data() + test_index * train_ids_.size(),
            train_ids_.size()};
  }
  double At(std::size_t test_index, std::size_t train_index) const {
    return values_[test_index * train_ids_.size() + train_index];
  }

 private:
  std::vector<std::string> test_ids_;
  std::vector<std::string> train_ids_;
  std::vector<double> values_;
};

double RemappedCosine(std::span<const double> u, std::span<const double> v);

StsMatrix ComputeSts(const Corpus& corpus, const EmbeddingFile& emb);

// Number of leading similarities averaged at `pct` percent of `n`.
std::size_t TopCount(double pct, std::size_t n);
// Mean of the first k entries of a descending sequence. Evaluated as a
// running mean clamped into [v_k, m_{k-1}], so it never increases with k.
double TopMean(std::span<const double> descending, std::size_t k);

DifficultyScore WoodDifficulty(const StsMatrix& sts, double pct,
                               std::string embedding_source = "unspecified");

DifficultyScore WmprobDifficulty(const ModelRun& run);

// JSONL: one header object, then {"sample_id","B"} per defined sample in id
// order.
void WriteScores(const DifficultyScore& score, std::ostream& out);
DifficultyScore ReadScores(std::istream& in);
void SaveScores(const DifficultyScore& score, const std::filesystem::path& path);
DifficultyScore LoadScores(const std::filesystem::path& path);

}  // namespace eql

#endif  // EQL_DIFFICULTY_H_
