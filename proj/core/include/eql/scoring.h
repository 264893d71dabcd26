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

#ifndef EQL_SCORING_H_
#define EQL_SCORING_H_

// Split formation and the weighted metric.
//
// Each included sample gets a weight W (continuous a/B, or the weight b_i of
// its split) and a reward d or penalty e depending on whether the model got
// it right. The metric is
//
//   overall = 100 * sum(K * W) / sum(d * W),   K = d if correct else e
//
// and is reported raw (normalized = false) when sum(d * W) is not positive.
// For confidence-based difficulty (`reciprocate`), continuous weights become
// B/a and the split order flips so split 1 still reads as "easiest".

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "eql/difficulty.h"
#include "eql/types.h"

namespace eql {

inline constexpr int kMinSplits = 2;
inline constexpr int kMaxSplits = 7;
// Floor applied to B (or B/a) before it is inverted or used as a weight.
inline constexpr double kWeightEpsilon = 1e-6;

enum class SplitMode { kEqualPopulation, kEqualThresholds, kManual };

std::string_view SplitModeName(SplitMode mode);
SplitMode ParseSplitMode(std::string_view name);

struct SplitConfig {
  int n = 2;
  SplitMode mode = SplitMode::kEqualPopulation;
  std::vector<double> thresholds;  // manual mode: n-1 ascending values in (0,1)

  void Validate() const;
  // i/n for equal thresholds, the given list for manual, empty otherwise.
  std::vector<double> ResolvedThresholds() const;
  bool operator==(const SplitConfig&) const = default;
};

struct SplitAssignment {
  SplitConfig config;
  bool reciprocate = false;
  std::vector<double> thresholds;
  std::map<std::string, int> assignment;  // sample id -> split in [1, n]
  std::vector<std::size_t> sizes;         // sizes[i] is split i+1

  std::optional<int> SplitOf(std::string_view sample_id) const;
};

// Throws ConfigError when equal-population splitting has fewer defined
// scores than splits.
SplitAssignment FormSplits(const DifficultyScore& scores,
                           const SplitConfig& config, bool reciprocate);

enum class WeightKind { kContinuous, kSplitWise };
enum class WeightScale { kExplicit, kLinearAdd, kLinearSub, kLog, kSquare };
// kPerSampleDifficulty multiplies d and e by 1/B (or by B when reciprocated).
enum class RewardMode { kConstant, kPerSampleDifficulty };

std::string_view WeightKindName(WeightKind kind);
std::string_view WeightScaleName(WeightScale scale);
std::string_view RewardModeName(RewardMode mode);

struct WeightScheme {
  WeightKind kind = WeightKind::kSplitWise;
  double a = 1.0;
  std::vector<double> b;  // explicit scale only
  WeightScale scale = WeightScale::kLinearAdd;
  double d = 1.0;
  double e = -1.0;
  RewardMode reward = RewardMode::kConstant;
  std::optional<int> case_id;
  bool reciprocate = false;

  void Validate(int n) const;
  bool operator==(const WeightScheme&) const = default;
};

// b_1..b_n for a split-wise scheme.
std::vector<double> ExpandWeights(const WeightScheme& scheme, int n);

// W for one sample. `split_weights` is ExpandWeights(scheme, n).
double SampleWeight(double b_value, int split, const WeightScheme& scheme,
                    std::span<const double> split_weights);

// Per-sample multiplier of d and e (1 unless reward is per-sample).
double RewardFactor(double b_value, const WeightScheme& scheme);

// The weighting presets of the nine reference cases, generalized to n splits
// with b_i = i.
WeightScheme TableOnePreset(int case_id, int n);

struct MetricResult {
  std::string model_id;
  std::string method;
  double overall = 0.0;
  bool normalized = true;
  double numerator = 0.0;    // sum K*W
  double denominator = 0.0;  // sum d*W
  std::vector<std::optional<double>> split_scores;  // nullopt for empty splits
  std::map<std::string, double> per_sample;         // K*W
  std::set<std::string> excluded;
  std::size_t included = 0;
  std::size_t correct = 0;
};

MetricResult WeightedMetric(const ModelRun& run, const Corpus& corpus,
                            const DifficultyScore& scores,
                            const SplitAssignment& splits,
                            const WeightScheme& scheme);

nlohmann::json ToJson(const SplitConfig& config);
SplitConfig SplitConfigFromJson(const nlohmann::json& j);
// A {"case": k} member expands to that preset before other members apply;
// the preset needs the split count, so `n` is passed in.
nlohmann::json ToJson(const WeightScheme& scheme);
WeightScheme WeightSchemeFromJson(const nlohmann::json& j, int n);

}  // namespace eql

#endif  // EQL_SCORING_H_
