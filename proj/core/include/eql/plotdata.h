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

#ifndef EQL_PLOTDATA_H_
#define EQL_PLOTDATA_H_

// Chart-ready projections of a leaderboard: parallel coordinates of split
// scores, the accuracy-vs-weighted multi-line chart with change flags,
// per-split correct/incorrect sunbursts and per-sample beeswarms.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "eql/leaderboard.h"

namespace eql {

inline constexpr int kChartSchema = 1;

struct ChartBundle {
  struct PcpLine {
    std::string model_id;
    std::vector<std::optional<double>> split_scores;
  };
  struct MlcPoint {
    std::string model_id;
    double accuracy_pct = 0.0;
    double weighted = 0.0;
    int baseline_rank = 0;
    int rank = 0;
    bool changed = false;
  };
  struct Arc {
    int split = 0;
    std::size_t size = 0;
    std::size_t correct = 0;
    std::size_t incorrect = 0;
  };
  struct Sunburst {
    std::string model_id;
    std::vector<Arc> arcs;
  };
  struct BeePoint {
    std::string sample_id;
    double b = 0.0;
    int split = 0;
    bool correct = false;
  };
  struct Beeswarm {
    std::string model_id;
    std::vector<BeePoint> points;
  };

  nlohmann::json provenance = nlohmann::json::object();
  std::string method_kind;
  int n_splits = 0;
  std::vector<PcpLine> pcp;
  std::vector<MlcPoint> mlc;
  std::vector<Sunburst> sunburst;
  std::vector<Beeswarm> beeswarm;
};

// `runs` and `difficulty` are parallel, as for BuildLeaderboard. Throws
// ProvenanceError when an input was not produced by the view's method or
// split count.
ChartBundle BuildChartBundle(const LeaderboardView& view,
                             std::span<const ModelRun> runs,
                             const Corpus& corpus,
                             std::span<const ModelDifficulty> difficulty);

nlohmann::json ToJson(const ChartBundle& bundle);

}  // namespace eql

#endif  // EQL_PLOTDATA_H_
