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

#include "eql/scoring.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "eql/error.h"

namespace eql {
namespace {

using nlohmann::json;

[[noreturn]] void ConfigFail(const std::string& message) {
  throw Error(ErrorCode::kConfigError, "ConfigError: " + message);
}

template <typename T>
T Get(const json& j, const char* key) {
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    ConfigFail(std::string("field '") + key + "' is missing or has the wrong type");
  }
}

}  // namespace

std::string_view SplitModeName(SplitMode mode) {
  switch (mode) {
    case SplitMode::kEqualPopulation: return "equal";
    case SplitMode::kEqualThresholds: return "threshold";
    case SplitMode::kManual: return "manual";
  }
  return "unknown";
}

SplitMode ParseSplitMode(std::string_view name) {
  if (name == "equal" || name == "equal_population") {
    return SplitMode::kEqualPopulation;
  }
  if (name == "threshold" || name == "equal_thresholds") {
    return SplitMode::kEqualThresholds;
  }
  if (name == "manual") return SplitMode::kManual;
  ConfigFail("unknown split mode '" + std::string(name) + "'");
}

void SplitConfig::Validate() const {
  if (n < kMinSplits || n > kMaxSplits) {
    ConfigFail("split count " + std::to_string(n) +
               " outside the supported range 2-7");
  }
  if (mode != SplitMode::kManual) {
    if (!thresholds.empty()) {
      ConfigFail("thresholds are only accepted with --split-mode manual");
    }
    return;
  }
  if (thresholds.size() != static_cast<std::size_t>(n - 1)) {
    ConfigFail("manual mode needs " + std::to_string(n - 1) +
               " thresholds for " + std::to_string(n) + " splits");
  }
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    if (!(thresholds[i] > 0.0 && thresholds[i] < 1.0)) {
      ConfigFail("manual thresholds must lie in (0,1)");
    }
    if (i > 0 && !(thresholds[i] > thresholds[i - 1])) {
      ConfigFail("manual thresholds must be strictly ascending");
    }
  }
}

std::vector<double> SplitConfig::ResolvedThresholds() const {
  switch (mode) {
    case SplitMode::kEqualPopulation:
      return {};
    case SplitMode::kEqualThresholds: {
      std::vector<double> th;
      for (int i = 1; i < n; ++i) th.push_back(static_cast<double>(i) / n);
      return th;
    }
    case SplitMode::kManual:
      return thresholds;
  }
  return {};
}

std::optional<int> SplitAssignment::SplitOf(std::string_view sample_id) const {
  auto it = assignment.find(std::string(sample_id));
  if (it == assignment.end()) return std::nullopt;
  return it->second;
}

SplitAssignment FormSplits(const DifficultyScore& scores,
                           const SplitConfig& config, bool reciprocate) {
  config.Validate();
  SplitAssignment out;
  out.config = config;
  out.reciprocate = reciprocate;
  out.thresholds = config.ResolvedThresholds();
  out.sizes.assign(static_cast<std::size_t>(config.n), 0);

  if (config.mode == SplitMode::kEqualPopulation) {
    const std::size_t total = scores.values.size();
    if (total < static_cast<std::size_t>(config.n)) {
      ConfigFail("equal-population splitting needs at least " +
                 std::to_string(config.n) + " scored samples, have " +
                 std::to_string(total));
    }
    std::vector<std::pair<std::string, double>> order(scores.values.begin(),
                                                      scores.values.end());
    // Easiest first: high B, or low confidence when reciprocated. The map
    // already yields ids ascending, so a stable sort keeps id tie order.
    std::stable_sort(order.begin(), order.end(),
                     [reciprocate](const auto& l, const auto& r) {
                       return reciprocate ? l.second < r.second
                                          : l.second > r.second;
                     });
    const std::size_t n = static_cast<std::size_t>(config.n);
    const std::size_t base = total / n;
    const std::size_t extra = total % n;
    std::size_t pos = 0;
    for (std::size_t s = 0; s < n; ++s) {
      const std::size_t size = base + (s < extra ? 1 : 0);
      for (std::size_t k = 0; k < size; ++k, ++pos) {
        out.assignment[order[pos].first] = static_cast<int>(s + 1);
      }
      out.sizes[s] = size;
    }
    return out;
  }

  for (const auto& [id, b] : scores.values) {
    // Strictly-greater banding: B > th_i counts toward the easier side.
    const int above = static_cast<int>(
        std::count_if(out.thresholds.begin(), out.thresholds.end(),
                      [b](double th) { return b > th; }));
    const int split = reciprocate ? 1 + above : config.n - above;
    out.assignment[id] = split;
    ++out.sizes[static_cast<std::size_t>(split - 1)];
  }
  return out;
}

std::string_view WeightKindName(WeightKind kind) {
  return kind == WeightKind::kContinuous ? "continuous" : "split_wise";
}

std::string_view WeightScaleName(WeightScale scale) {
  switch (scale) {
    case WeightScale::kExplicit: return "explicit";
    case WeightScale::kLinearAdd: return "linear_add";
    case WeightScale::kLinearSub: return "linear_sub";
    case WeightScale::kLog: return "log";
    case WeightScale::kSquare: return "square";
  }
  return "unknown";
}

std::string_view RewardModeName(RewardMode mode) {
  return mode == RewardMode::kConstant ? "constant" : "difficulty";
}

namespace {

WeightKind ParseWeightKind(std::string_view s) {
  if (s == "continuous") return WeightKind::kContinuous;
  if (s == "split_wise" || s == "split") return WeightKind::kSplitWise;
  ConfigFail("unknown weight kind '" + std::string(s) + "'");
}

WeightScale ParseWeightScale(std::string_view s) {
  for (WeightScale v : {WeightScale::kExplicit, WeightScale::kLinearAdd,
                        WeightScale::kLinearSub, WeightScale::kLog,
                        WeightScale::kSquare}) {
    if (WeightScaleName(v) == s) return v;
  }
  if (s == "linear") return WeightScale::kLinearAdd;
  ConfigFail("unknown weight scale '" + std::string(s) + "'");
}

RewardMode ParseRewardMode(std::string_view s) {
  if (s == "constant") return RewardMode::kConstant;
  if (s == "difficulty") return RewardMode::kPerSampleDifficulty;
  ConfigFail("unknown reward mode '" + std::string(s) + "'");
}

}  // namespace

void WeightScheme::Validate(int n) const {
  if (!(a > 0.0) || !std::isfinite(a)) ConfigFail("a must be positive");
  if (!std::isfinite(d) || !std::isfinite(e)) ConfigFail("d and e must be finite");
  if (d < e) ConfigFail("reward d must be at least penalty e");
  if (case_id && (*case_id < 1 || *case_id > 9)) {
    ConfigFail("case must be between 1 and 9");
  }
  if (kind == WeightKind::kSplitWise && scale == WeightScale::kExplicit) {
    if (b.size() != static_cast<std::size_t>(n)) {
      ConfigFail("explicit weights need " + std::to_string(n) +
                 " values, got " + std::to_string(b.size()));
    }
    for (double v : b) {
      if (!(v > 0.0) || !std::isfinite(v)) {
        ConfigFail("split weights must be positive");
      }
    }
  }
}

std::vector<double> ExpandWeights(const WeightScheme& scheme, int n) {
  std::vector<double> b(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i) {
    double& v = b[static_cast<std::size_t>(i - 1)];
    switch (scheme.scale) {
      case WeightScale::kLinearAdd: v = i; break;
      case WeightScale::kLinearSub: v = n + 1 - i; break;
      case WeightScale::kSquare: v = static_cast<double>(i) * i; break;
      case WeightScale::kLog: v = std::log2(static_cast<double>(i) + 1.0); break;
      case WeightScale::kExplicit:
        if (scheme.b.size() != static_cast<std::size_t>(n)) {
          ConfigFail("explicit weights need " + std::to_string(n) +
                     " values, got " + std::to_string(scheme.b.size()));
        }
        return scheme.b;
    }
  }
  return b;
}

double SampleWeight(double b_value, int split, const WeightScheme& scheme,
                    std::span<const double> split_weights) {
  if (scheme.kind == WeightKind::kContinuous) {
    if (scheme.reciprocate) {
      return std::max(b_value, kWeightEpsilon) / scheme.a;
    }
    return scheme.a / std::max(b_value, kWeightEpsilon);
  }
  return split_weights[static_cast<std::size_t>(split - 1)];
}

double RewardFactor(double b_value, const WeightScheme& scheme) {
  if (scheme.reward == RewardMode::kConstant) return 1.0;
  if (scheme.reciprocate) return std::max(b_value, kWeightEpsilon);
  return 1.0 / std::max(b_value, kWeightEpsilon);
}

WeightScheme TableOnePreset(int case_id, int n) {
  WeightScheme s;
  s.case_id = case_id;
  s.kind = WeightKind::kSplitWise;
  s.scale = WeightScale::kLinearAdd;
  switch (case_id) {
    case 1: s.d = 1.0; s.e = -1.0; break;   // reward = penalty
    case 2: s.d = 1.0; s.e = 0.0; break;    // reward only
    case 3: s.d = 0.0; s.e = -1.0; break;   // penalty only
    case 4: s.d = 1.0; s.e = -0.5; break;   // reward > penalty
    case 5: s.d = 0.5; s.e = -1.0; break;   // penalty > reward
    case 6:
    case 7:
      s.kind = WeightKind::kContinuous;
      s.reciprocate = case_id == 7;
      break;
    case 8:
    case 9:
      s.reward = RewardMode::kPerSampleDifficulty;
      s.reciprocate = case_id == 9;
      break;
    default:
      ConfigFail("case must be between 1 and 9, got " + std::to_string(case_id));
  }
  s.Validate(n);
  return s;
}

MetricResult WeightedMetric(const ModelRun& run, const Corpus& corpus,
                            const DifficultyScore& scores,
                            const SplitAssignment& splits,
                            const WeightScheme& scheme) {
  const int n = splits.config.n;
  scheme.Validate(n);
  const std::vector<double> split_weights =
      scheme.kind == WeightKind::kSplitWise ? ExpandWeights(scheme, n)
                                            : std::vector<double>{};
  MetricResult result;
  result.model_id = run.model_id();
  result.method = scores.method.Id();
  std::vector<double> num(static_cast<std::size_t>(n), 0.0);
  std::vector<double> den(static_cast<std::size_t>(n), 0.0);
  std::vector<std::size_t> count(static_cast<std::size_t>(n), 0);

  for (const std::string& id : corpus.Ids(Partition::kTest)) {
    const std::optional<double> b = scores.Find(id);
    if (!b) {
      result.excluded.insert(id);
      continue;
    }
    const std::optional<int> split = splits.SplitOf(id);
    if (!split) {
      throw Error(ErrorCode::kProvenanceError,
                  "sample '" + id + "' has a score but no split");
    }
    const PredictionRecord* rec = run.Find(id);
    if (!rec) {
      throw Error(ErrorCode::kMissingPrediction,
                  "MissingPrediction(" + run.model_id() + ", " + id + ")");
    }
    const bool correct = rec->predicted_label == corpus.At(id).gold_label;
    const double w = SampleWeight(*b, *split, scheme, split_weights);
    const double factor = RewardFactor(*b, scheme);
    const double reward = scheme.d * factor;
    const double k = correct ? reward : scheme.e * factor;
    const double contribution = k * w;
    const std::size_t s = static_cast<std::size_t>(*split - 1);
    num[s] += contribution;
    den[s] += reward * w;
    ++count[s];
    result.numerator += contribution;
    result.denominator += reward * w;
    result.per_sample[id] = contribution;
    ++result.included;
    if (correct) ++result.correct;
  }

  result.normalized = result.denominator > 0.0;
  result.overall = result.normalized
                       ? 100.0 * result.numerator / result.denominator
                       : result.numerator;
  result.split_scores.resize(static_cast<std::size_t>(n));
  for (std::size_t s = 0; s < num.size(); ++s) {
    if (count[s] == 0) continue;
    result.split_scores[s] = den[s] > 0.0 ? 100.0 * num[s] / den[s] : num[s];
  }
  return result;
}

json ToJson(const SplitConfig& config) {
  json j = {{"n", config.n}, {"mode", SplitModeName(config.mode)}};
  if (config.mode == SplitMode::kManual) j["thresholds"] = config.thresholds;
  return j;
}

SplitConfig SplitConfigFromJson(const json& j) {
  if (!j.is_object()) ConfigFail("split config must be an object");
  for (const auto& [key, _] : j.items()) {
    if (key != "n" && key != "mode" && key != "thresholds") {
      ConfigFail("unknown split field '" + key + "'");
    }
  }
  SplitConfig c;
  c.n = Get<int>(j, "n");
  if (j.contains("mode")) c.mode = ParseSplitMode(Get<std::string>(j, "mode"));
  if (j.contains("thresholds")) {
    c.thresholds = Get<std::vector<double>>(j, "thresholds");
  }
  c.Validate();
  return c;
}

json ToJson(const WeightScheme& s) {
  json j = {{"kind", WeightKindName(s.kind)},
            {"a", s.a},
            {"scale", WeightScaleName(s.scale)},
            {"d", s.d},
            {"e", s.e},
            {"reward", RewardModeName(s.reward)},
            {"reciprocate", s.reciprocate}};
  if (s.scale == WeightScale::kExplicit) j["b"] = s.b;
  if (s.case_id) j["case"] = *s.case_id;
  return j;
}

WeightScheme WeightSchemeFromJson(const json& j, int n) {
  if (!j.is_object()) ConfigFail("weight scheme must be an object");
  static const std::set<std::string> kKeys = {
      "case", "kind", "a", "b", "scale", "d", "e", "reward", "reciprocate"};
  for (const auto& [key, _] : j.items()) {
    if (!kKeys.contains(key)) ConfigFail("unknown scheme field '" + key + "'");
  }
  WeightScheme s;
  if (j.contains("case")) s = TableOnePreset(Get<int>(j, "case"), n);
  if (j.contains("kind")) s.kind = ParseWeightKind(Get<std::string>(j, "kind"));
  if (j.contains("a")) s.a = Get<double>(j, "a");
  if (j.contains("b")) {
    s.b = Get<std::vector<double>>(j, "b");
    s.scale = WeightScale::kExplicit;
  }
  if (j.contains("scale")) s.scale = ParseWeightScale(Get<std::string>(j, "scale"));
  if (j.contains("d")) s.d = Get<double>(j, "d");
  if (j.contains("e")) s.e = Get<double>(j, "e");
  if (j.contains("reward")) {
    s.reward = ParseRewardMode(Get<std::string>(j, "reward"));
  }
  if (j.contains("reciprocate")) s.reciprocate = Get<bool>(j, "reciprocate");
  s.Validate(n);
  return s;
}

}  // namespace eql
