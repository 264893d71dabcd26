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

#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "eql/leaderboard.h"
#include "eql/random.h"
#include "eql/scoring.h"

namespace {

struct Board {
  eql::Corpus corpus;
  std::vector<eql::ModelRun> runs;
  eql::DifficultyScore scores;
};

Board MakeBoard(std::size_t samples, int models) {
  eql::Rng rng(99);
  std::vector<eql::Sample> items;
  for (std::size_t i = 0; i < samples; ++i) {
    eql::Sample s;
    s.id = "s" + std::to_string(1000000 + i);
    s.text = "t";
    s.gold_label = static_cast<eql::LabelId>(i % 2);
    items.push_back(std::move(s));
  }
  Board b;
  b.corpus = eql::Corpus("bench", {"a", "b"}, std::move(items));
  for (const eql::Sample& s : b.corpus.samples()) {
    b.scores.values[s.id] = eql::UniformUnit(rng);
  }
  for (int m = 0; m < models; ++m) {
    std::vector<eql::PredictionRecord> recs;
    for (const eql::Sample& s : b.corpus.samples()) {
      const bool ok = eql::UniformUnit(rng) < 0.8;
      recs.push_back({s.id, ok ? s.gold_label : 1 - s.gold_label, 0.5 + 0.5 * eql::UniformUnit(rng)});
    }
    b.runs.emplace_back("m" + std::to_string(m), std::move(recs), b.corpus);
  }
  return b;
}

void BM_WeightedMetric(benchmark::State& state) {
  const Board b = MakeBoard(static_cast<std::size_t>(state.range(0)), 1);
  const eql::WeightScheme w = eql::TableOnePreset(1, 7);
  const eql::SplitAssignment splits = eql::FormSplits(b.scores, eql::SplitConfig{7}, false);
  for (auto _ : state) {
    benchmark::DoNotOptimize(eql::WeightedMetric(b.runs[0], b.corpus, b.scores, splits, w));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_WeightedMetric)->Arg(1000)->Arg(10000)->Arg(100000);

void BM_Leaderboard(benchmark::State& state) {
  const Board b = MakeBoard(5000, static_cast<int>(state.range(0)));
  const eql::WeightScheme w = eql::TableOnePreset(6, 3);
  for (auto _ : state) {
    const auto splits = eql::FormSplits(b.scores, eql::SplitConfig{3}, false);
    benchmark::DoNotOptimize(eql::BuildLeaderboard(b.runs, b.corpus, b.scores, splits, w));
  }
}
BENCHMARK(BM_Leaderboard)->Arg(5)->Arg(20);

}  // namespace
