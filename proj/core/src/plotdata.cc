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

#include "eql/plotdata.h"

#include "eql/error.h"

namespace eql {
namespace {

using nlohmann::json;

json OptionalList(const std::vector<std::optional<double>>& values) {
  json out = json::array();
  for (const auto& v : values) out.push_back(v ? json(*v) : json());
  return out;
}

}  // namespace

ChartBundle BuildChartBundle(const LeaderboardView& view,
                             std::span<const ModelRun> runs,
                             const Corpus& corpus,
                             std::span<const ModelDifficulty> difficulty) {
  if (runs.size() != difficulty.size()) {
    throw Error(ErrorCode::kProvenanceError,
                "ProvenanceError: one difficulty input per model is required");
  }
  ChartBundle bundle;
  bundle.provenance = view.provenance;
  bundle.method_kind = view.method_kind;
  bundle.n_splits = view.n_splits;

  for (const LeaderboardRow& row : view.rows) {
    bundle.pcp.push_back({row.model_id, row.split_scores});
    bundle.mlc.push_back({row.model_id, row.accuracy * 100.0, row.overall,
                          row.baseline_rank, row.rank, row.changed});
  }

  for (std::size_t i = 0; i < runs.size(); ++i) {
    const ModelRun& run = runs[i];
    const ModelDifficulty& md = difficulty[i];
    if (!view.Find(run.model_id())) {
      throw Error(ErrorCode::kProvenanceError,
                  "ProvenanceError: model '" + run.model_id() +
                      "' is not on the leaderboard");
    }
    if (!md.scores || !md.splits ||
        MethodName(md.scores->method.kind) != view.method_kind ||
        md.splits->config.n != view.n_splits) {
      throw Error(ErrorCode::kProvenanceError,
                  "ProvenanceError: difficulty input for '" + run.model_id() +
                      "' does not match the leaderboard's method");
    }
    if (md.scores->method.kind == MethodKind::kWmprob &&
        md.scores->method.model_id != run.model_id()) {
      throw Error(ErrorCode::kProvenanceError,
                  "ProvenanceError: confidence scores of '" +
                      md.scores->method.model_id + "' paired with '" +
                      run.model_id() + "'");
    }

    ChartBundle::Sunburst sun{run.model_id(), {}};
    for (int s = 1; s <= view.n_splits; ++s) sun.arcs.push_back({s, 0, 0, 0});
    ChartBundle::Beeswarm swarm{run.model_id(), {}};
    for (const auto& [id, b] : md.scores->values) {
      const std::optional<int> split = md.splits->SplitOf(id);
      const PredictionRecord* rec = run.Find(id);
      if (!split || !rec) {
        throw Error(ErrorCode::kProvenanceError,
                    "ProvenanceError: sample '" + id +
                        "' lacks a split or prediction");
      }
      const bool correct = rec->predicted_label == corpus.At(id).gold_label;
      ChartBundle::Arc& arc = sun.arcs[static_cast<std::size_t>(*split - 1)];
      ++arc.size;
      ++(correct ? arc.correct : arc.incorrect);
      swarm.points.push_back({id, b, *split, correct});
    }
    bundle.sunburst.push_back(std::move(sun));
    bundle.beeswarm.push_back(std::move(swarm));
  }
  return bundle;
}

json ToJson(const ChartBundle& bundle) {
  json pcp = json::array();
  for (const auto& line : bundle.pcp) {
    pcp.push_back({{"model_id", line.model_id},
                   {"split_scores", OptionalList(line.split_scores)}});
  }
  json mlc = json::array();
  for (const auto& p : bundle.mlc) {
    mlc.push_back({{"model_id", p.model_id},
                   {"accuracy", p.accuracy_pct},
                   {"weighted", p.weighted},
                   {"baseline_rank", p.baseline_rank},
                   {"rank", p.rank},
                   {"changed", p.changed}});
  }
  json sunburst = json::array();
  for (const auto& s : bundle.sunburst) {
    json arcs = json::array();
    for (const auto& a : s.arcs) {
      arcs.push_back({{"split", a.split},
                      {"size", a.size},
                      {"correct", a.correct},
                      {"incorrect", a.incorrect}});
    }
    sunburst.push_back({{"model_id", s.model_id}, {"arcs", arcs}});
  }
  json beeswarm = json::array();
  for (const auto& s : bundle.beeswarm) {
    json points = json::array();
    for (const auto& p : s.points) {
      points.push_back({{"sample_id", p.sample_id},
                        {"B", p.b},
                        {"split", p.split},
                        {"correct", p.correct}});
    }
    beeswarm.push_back({{"model_id", s.model_id}, {"points", points}});
  }
  return {{"chart_schema", kChartSchema},
          {"provenance", bundle.provenance},
          {"method", bundle.method_kind},
          {"n_splits", bundle.n_splits},
          {"pcp", pcp},
          {"mlc", mlc},
          {"sunburst", sunburst},
          {"beeswarm", beeswarm}};
}

}  // namespace eql
