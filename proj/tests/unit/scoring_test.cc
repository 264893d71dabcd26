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

#include <gtest/gtest.h>

#include "eql/scoring.h"
#include "oracles/metric_oracle.h"
#include "support/fixtures.h"
#include "support/matchers.h"

namespace eql {
namespace {

using nlohmann::json;
using testing::RunsFromPattern;
using testing::ScoresFor;
using testing::TestOnlyCorpus;

SplitConfig Manual(std::vector<double> th) {
  SplitConfig c;
  c.n = static_cast<int>(th.size()) + 1;
  c.mode = SplitMode::kManual;
  c.thresholds = std::move(th);
  return c;
}

TEST(SplitConfig, Validation) {
  EXPECT_NO_THROW((SplitConfig{7}.Validate()));
  EXPECT_EQL_ERROR((SplitConfig{9}.Validate()), ErrorCode::kConfigError);
  EXPECT_EQL_ERROR((SplitConfig{1}.Validate()), ErrorCode::kConfigError);
  EXPECT_EQL_ERROR(Manual({0.6, 0.4}).Validate(), ErrorCode::kConfigError);
  EXPECT_EQL_ERROR(Manual({0.0}).Validate(), ErrorCode::kConfigError);
  SplitConfig th{3, SplitMode::kEqualThresholds, {0.5, 0.6}};
  EXPECT_EQL_ERROR(th.Validate(), ErrorCode::kConfigError);
  SplitConfig short_manual = Manual({0.3, 0.6});
  short_manual.n = 4;
  EXPECT_EQL_ERROR(short_manual.Validate(), ErrorCode::kConfigError);
}

TEST(SplitConfig, EqualThresholds) {
  const SplitConfig c{5, SplitMode::kEqualThresholds, {}};
  const auto th = c.ResolvedThresholds();
  ASSERT_EQ(th.size(), 4u);
  const double want[] = {0.2, 0.4, 0.6, 0.8};
  for (int i = 0; i < 4; ++i) EXPECT_DOUBLE_EQ(th[i], want[i]);
}

TEST(FormSplits, EqualPopulationSizes) {
  const Corpus c = TestOnlyCorpus(6);
  const auto s = ScoresFor(c, {0.1, 0.9, 0.5, 0.3, 0.7, 0.2});
  const SplitAssignment a = FormSplits(s, SplitConfig{2}, false);
  EXPECT_EQ(a.sizes, (std::vector<std::size_t>{3, 3}));
  EXPECT_EQ(*a.SplitOf("s01"), 1);  // highest B is easiest
  EXPECT_EQ(*a.SplitOf("s00"), 2);

  const Corpus c7 = TestOnlyCorpus(7);
  const auto s7 = ScoresFor(c7, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7});
  EXPECT_EQ(FormSplits(s7, SplitConfig{3}, false).sizes,
            (std::vector<std::size_t>{3, 2, 2}));
  EXPECT_EQ(FormSplits(s7, SplitConfig{7}, false).sizes,
            std::vector<std::size_t>(7, 1));
  const Corpus c3 = TestOnlyCorpus(3);
  EXPECT_EQL_ERROR(FormSplits(ScoresFor(c3, {0.1, 0.2, 0.3}), SplitConfig{4}, false),
                   ErrorCode::kConfigError);
}

TEST(FormSplits, ThresholdBranchAndSwap) {
  const Corpus c = TestOnlyCorpus(2);
  const auto s = ScoresFor(c, {0.9, 0.3});
  const SplitConfig cfg = Manual({0.5});
  const SplitAssignment plain = FormSplits(s, cfg, false);
  EXPECT_EQ(*plain.SplitOf("s00"), 1);
  EXPECT_EQ(*plain.SplitOf("s01"), 2);
  const SplitAssignment swapped = FormSplits(s, cfg, true);
  EXPECT_EQ(*swapped.SplitOf("s00"), 2);
  EXPECT_EQ(*swapped.SplitOf("s01"), 1);
  // B equal to the threshold is not above it.
  const auto edge = ScoresFor(c, {0.5, 0.50000001});
  const SplitAssignment e = FormSplits(edge, cfg, false);
  EXPECT_EQ(*e.SplitOf("s00"), 2);
  EXPECT_EQ(*e.SplitOf("s01"), 1);
}

TEST(ExpandWeights, Scales) {
  WeightScheme s;
  EXPECT_EQ(ExpandWeights(s, 4), (std::vector<double>{1, 2, 3, 4}));
  s.scale = WeightScale::kSquare;
  EXPECT_EQ(ExpandWeights(s, 3), (std::vector<double>{1, 4, 9}));
  s.scale = WeightScale::kLinearSub;
  EXPECT_EQ(ExpandWeights(s, 3), (std::vector<double>{3, 2, 1}));
  s.scale = WeightScale::kLog;
  EXPECT_DOUBLE_EQ(ExpandWeights(s, 3)[2], 2.0);
  s.scale = WeightScale::kExplicit;
  s.b = {1, 2};
  EXPECT_EQL_ERROR(ExpandWeights(s, 3), ErrorCode::kConfigError);
}

TEST(ExpandWeights, PerSplitRewardsAndPenalties) {
  // Case 1 gives +i/-i; e = -0.5 gives +1/-0.5, +2/-1, +3/-1.5, +4/-2.
  WeightScheme s = TableOnePreset(1, 4);
  const auto b = ExpandWeights(s, 4);
  for (int i = 0; i < 4; ++i) {
    EXPECT_EQ(s.d * b[i], i + 1.0);
    EXPECT_EQ(s.e * b[i], -(i + 1.0));
  }
  s.e = -0.5;
  const double penalties[] = {-0.5, -1, -1.5, -2};
  for (int i = 0; i < 4; ++i) EXPECT_EQ(s.e * b[i], penalties[i]);
}

TEST(SampleWeight, Examples) {
  WeightScheme cont;
  cont.kind = WeightKind::kContinuous;
  EXPECT_DOUBLE_EQ(SampleWeight(0.5, 1, cont, {}), 2.0);
  EXPECT_DOUBLE_EQ(SampleWeight(0.0, 1, cont, {}), 1.0 / kWeightEpsilon);
  cont.reciprocate = true;
  EXPECT_DOUBLE_EQ(SampleWeight(0.8, 1, cont, {}), 0.8);
  EXPECT_DOUBLE_EQ(SampleWeight(0.0, 1, cont, {}), kWeightEpsilon);
  const WeightScheme c1 = TableOnePreset(1, 2);
  EXPECT_DOUBLE_EQ(SampleWeight(0.3, 2, c1, ExpandWeights(c1, 2)), 2.0);
}

TEST(TableOnePreset, Cases) {
  const WeightScheme c1 = TableOnePreset(1, 2);
  EXPECT_EQ(ExpandWeights(c1, 2), (std::vector<double>{1, 2}));
  EXPECT_EQ(c1.d, 1);
  EXPECT_EQ(c1.e, -1);
  EXPECT_EQ(TableOnePreset(5, 2).d, 0.5);
  EXPECT_EQ(TableOnePreset(5, 2).e, -1);
  EXPECT_EQ(TableOnePreset(3, 2).d, 0);
  EXPECT_EQ(TableOnePreset(6, 2).kind, WeightKind::kContinuous);
  EXPECT_TRUE(TableOnePreset(7, 2).reciprocate);
  EXPECT_EQ(TableOnePreset(8, 2).reward, RewardMode::kPerSampleDifficulty);
  EXPECT_TRUE(TableOnePreset(9, 2).reciprocate);
  EXPECT_EQL_ERROR(TableOnePreset(10, 2), ErrorCode::kConfigError);
}

TEST(WeightScheme, Validation) {
  WeightScheme s;
  s.d = -1;
  s.e = 0;
  EXPECT_EQL_ERROR(s.Validate(2), ErrorCode::kConfigError);
  s = WeightScheme{};
  s.a = 0;
  EXPECT_EQL_ERROR(s.Validate(2), ErrorCode::kConfigError);
  s = WeightScheme{};
  s.scale = WeightScale::kExplicit;
  s.b = {1, -2};
  EXPECT_EQL_ERROR(s.Validate(2), ErrorCode::kConfigError);
}

TEST(WeightedMetric, HandEnumeration) {
  const Corpus c = TestOnlyCorpus(4);
  const auto runs = RunsFromPattern(c, {{true, false, true, false}}, {"m"});
  const auto s = ScoresFor(c, {0.8, 0.6, 0.4, 0.2});
  const SplitAssignment a = FormSplits(s, Manual({0.5}), false);
  WeightScheme w = TableOnePreset(1, 2);
  const MetricResult r = WeightedMetric(runs[0], c, s, a, w);
  EXPECT_EQ(r.per_sample.at("s00"), 1);
  EXPECT_EQ(r.per_sample.at("s01"), -1);
  EXPECT_EQ(r.per_sample.at("s02"), 2);
  EXPECT_EQ(r.per_sample.at("s03"), -2);
  EXPECT_EQ(r.denominator, 6);
  EXPECT_EQ(r.overall, 0.0);
  EXPECT_TRUE(r.normalized);
  EXPECT_EQ(r.split_scores[0], 0.0);
  EXPECT_EQ(r.split_scores[1], 0.0);
}

TEST(WeightedMetric, UniformIsAccuracy) {
  Rng rng(1);
  const Corpus c = testing::MakeCorpus(rng, {.train = 0, .test = 50, .vectors = false});
  const auto runs = testing::MakeRuns(rng, c, 3);
  std::vector<double> b(50);
  for (double& v : b) v = UniformUnit(rng);
  const auto s = ScoresFor(c, b);
  WeightScheme w;
  w.scale = WeightScale::kExplicit;
  w.b = {1, 1, 1};
  w.e = 0;
  const SplitAssignment a = FormSplits(s, SplitConfig{3}, false);
  for (const ModelRun& run : runs) {
    EXPECT_NEAR(WeightedMetric(run, c, s, a, w).overall, 100 * Accuracy(run, c), 1e-9);
  }
}

TEST(WeightedMetric, AllCorrectIsHundred) {
  const Corpus c = TestOnlyCorpus(8);
  const auto runs = RunsFromPattern(c, {std::vector<bool>(8, true)}, {"m"});
  const auto s = ScoresFor(c, {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8});
  for (int k : {1, 2, 4, 5, 6, 7, 8, 9}) {
    const WeightScheme w = TableOnePreset(k, 4);
    const SplitAssignment a = FormSplits(s, SplitConfig{4}, w.reciprocate);
    EXPECT_NEAR(WeightedMetric(runs[0], c, s, a, w).overall, 100.0, 1e-12) << k;
  }
}

TEST(WeightedMetric, PenaltyOnlyIsRaw) {
  const Corpus c = TestOnlyCorpus(4);
  const auto runs = RunsFromPattern(c, {{true, false, true, false}}, {"m"});
  const auto s = ScoresFor(c, {0.8, 0.6, 0.4, 0.2});
  const SplitAssignment a = FormSplits(s, Manual({0.5}), false);
  const MetricResult r = WeightedMetric(runs[0], c, s, a, TableOnePreset(3, 2));
  EXPECT_FALSE(r.normalized);
  EXPECT_EQ(r.overall, -3.0);
}

TEST(WeightedMetric, UndefinedScoresAreExcluded) {
  const Corpus c = TestOnlyCorpus(4);
  const auto runs = RunsFromPattern(c, {{true, false, true, false}}, {"m"});
  auto s = ScoresFor(c, {0.8, 0.6, 0.4, 0.2});
  s.values.erase("s01");
  s.undefined_ids.insert("s01");
  const SplitAssignment a = FormSplits(s, Manual({0.5}), false);
  const MetricResult r = WeightedMetric(runs[0], c, s, a, TableOnePreset(1, 2));
  EXPECT_EQ(r.excluded, (std::set<std::string>{"s01"}));
  EXPECT_EQ(r.included, 3u);
  EXPECT_NEAR(r.overall, 100.0 * 1 / 5, 1e-12);
}

TEST(WeightedMetric, EmptySplitHasNoScore) {
  const Corpus c = TestOnlyCorpus(3);
  const auto runs = RunsFromPattern(c, {{true, true, false}}, {"m"});
  const auto s = ScoresFor(c, {0.9, 0.8, 0.85});
  const SplitAssignment a = FormSplits(s, SplitConfig{2, SplitMode::kEqualThresholds}, false);
  const MetricResult r = WeightedMetric(runs[0], c, s, a, TableOnePreset(1, 2));
  EXPECT_TRUE(r.split_scores[0].has_value());
  EXPECT_FALSE(r.split_scores[1].has_value());
}

TEST(WeightedMetric, AgreesWithOracleOnEveryCase) {
  Rng rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n_samples = 8 + UniformBelow(rng, 5);
    const Corpus c = TestOnlyCorpus(n_samples);
    std::vector<double> b(n_samples);
    std::vector<bool> ok(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) {
      b[i] = std::round(UniformUnit(rng) * 10) / 10;  // ties on purpose
      ok[i] = UniformBelow(rng, 2) == 1;
    }
    const auto runs = RunsFromPattern(c, {ok}, {"m"});
    const auto s = ScoresFor(c, b);
    const int n = 2 + static_cast<int>(UniformBelow(rng, 6));
    const int k = 1 + static_cast<int>(UniformBelow(rng, 9));
    const bool equal = UniformBelow(rng, 2) == 0;
    const WeightScheme w = TableOnePreset(k, n);
    const SplitConfig cfg{n, equal ? SplitMode::kEqualPopulation : SplitMode::kEqualThresholds};
    const MetricResult got = WeightedMetric(runs[0], c, s, FormSplits(s, cfg, w.reciprocate), w);

    std::vector<oracle::Sample> os;
    const auto ids = c.Ids(Partition::kTest);
    for (std::size_t i = 0; i < n_samples; ++i) os.push_back({ids[i], b[i], ok[i]});
    oracle::Splits osp{n, equal, {}};
    for (int i = 1; i < n; ++i) osp.thresholds.push_back(static_cast<double>(i) / n);
    const oracle::Result want = oracle::Metric(os, osp, oracle::Case(k, n));
    EXPECT_NEAR(got.overall, want.overall, 1e-12) << "case " << k << " n " << n;
    EXPECT_EQ(got.normalized, want.normalized);
    EXPECT_EQ(got.split_scores.size(), want.split_scores.size());
    for (std::size_t g = 0; g < want.split_scores.size(); ++g) {
      ASSERT_EQ(got.split_scores[g].has_value(), want.split_scores[g].has_value());
      if (want.split_scores[g]) EXPECT_NEAR(*got.split_scores[g], *want.split_scores[g], 1e-12);
    }
  }
}

TEST(SchemeJson, RoundTripAndErrors) {
  for (int k = 1; k <= 9; ++k) {
    const WeightScheme s = TableOnePreset(k, 3);
    EXPECT_EQ(WeightSchemeFromJson(ToJson(s), 3), s) << k;
  }
  WeightScheme custom;
  custom.scale = WeightScale::kExplicit;
  custom.b = {0.5, 1.5};
  custom.d = 2;
  custom.e = -0.25;
  EXPECT_EQ(WeightSchemeFromJson(ToJson(custom), 2), custom);
  EXPECT_EQL_ERROR(WeightSchemeFromJson(json{{"color", 1}}, 2), ErrorCode::kConfigError);
  EXPECT_EQL_ERROR(WeightSchemeFromJson(json{{"d", "one"}}, 2), ErrorCode::kConfigError);
  const WeightScheme over = WeightSchemeFromJson(json{{"case", 1}, {"e", -0.5}}, 2);
  EXPECT_EQ(over.e, -0.5);

  for (const SplitConfig& c : {SplitConfig{7}, SplitConfig{5, SplitMode::kEqualThresholds},
                               Manual({0.2, 0.7})}) {
    EXPECT_EQ(SplitConfigFromJson(ToJson(c)), c);
  }
  EXPECT_EQL_ERROR(SplitConfigFromJson(json{{"n", 9}}), ErrorCode::kConfigError);
  EXPECT_EQL_ERROR(SplitConfigFromJson(json{{"n", 2}, {"x", 1}}), ErrorCode::kConfigError);
  EXPECT_EQL_ERROR(SplitConfigFromJson(json{{"mode", "equal"}}), ErrorCode::kConfigError);
}

}  // namespace
}  // namespace eql
