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

#ifndef EQL_LEADERBOARD_H_
#define EQL_LEADERBOARD_H_

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "eql/difficulty.h"
#include "eql/scoring.h"
#include "eql/types.h"

namespace eql {

// Difficulty inputs for one model. Model-independent methods share one
// score/split pair across all models; wmprob has one per model.
struct ModelDifficulty {
  const DifficultyScore* scores = nullptr;
  const SplitAssignment* splits = nullptr;
};

struct LeaderboardRow {
  int rank = 0;  // 1-based
  std::string model_id;
  double overall = 0.0;
  bool normalized = true;
  std::vector<std::optional<double>> split_scores;
  double accuracy = 0.0;
  int baseline_rank = 0;
  bool changed = false;
  double inflation = 0.0;  // accuracy * 100 - overall
};

struct LeaderboardView {
  nlohmann::json provenance = nlohmann::json::object();
  std::string method_kind;
  int n_splits = 0;
  std::vector<LeaderboardRow> rows;  // by overall desc, then model id
  std::map<std::string, int> baseline_ranks;
  std::set<std::string> changed;
  double tau = 1.0;  // tau-b of (accuracy, overall) over models

  const LeaderboardRow* Find(const std::string& model_id) const;
  std::vector<std::string> Order() const;
};

// Throws DuplicateModel.
LeaderboardView BuildLeaderboard(std::span<const ModelRun> runs,
                                 const Corpus& corpus,
                                 std::span<const ModelDifficulty> difficulty,
                                 const WeightScheme& scheme,
                                 nlohmann::json provenance = {});

LeaderboardView BuildLeaderboard(std::span<const ModelRun> runs,
                                 const Corpus& corpus,
                                 const DifficultyScore& scores,
                                 const SplitAssignment& splits,
                                 const WeightScheme& scheme,
                                 nlohmann::json provenance = {});

// Kendall tau between two rankings of the same models. Throws SetMismatch.
double KendallTau(std::span<const std::string> order_a,
                  std::span<const std::string> order_b);

// Tie-adjusted Kendall tau-b of paired scores. Returns 1 when fewer than two
// items exist or when both sides are entirely tied, 0 when only one is.
double KendallTauB(std::span<const double> x, std::span<const double> y);

struct InflationReport {
  std::map<std::string, double> per_model;
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;
};

InflationReport Inflation(const LeaderboardView& view);

nlohmann::json ToJson(const LeaderboardView& view);
nlohmann::json ToJson(const InflationReport& report);
// rank,model,score,split_1..split_n,baseline_rank,changed,inflation
std::string ToCsv(const LeaderboardView& view);

}  // namespace eql

#endif  // EQL_LEADERBOARD_H_
