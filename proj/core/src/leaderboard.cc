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

#include "eql/leaderboard.h"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <sstream>

#include "eql/error.h"

namespace eql {
namespace {

using nlohmann::json;

std::string Num(double v) {
  std::array<char, 64> buf;
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

std::string CsvField(const std::string& v) {
  if (v.find_first_of(",\"\r\n") == std::string::npos) return v;
  std::string out = "\"";
  for (char c : v) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

// 1-based ranks by score descending, ties broken by model id ascending.
std::map<std::string, int> RanksOf(std::vector<std::pair<std::string, double>> scored) {
  std::sort(scored.begin(), scored.end(), [](const auto& l, const auto& r) {
    if (l.second != r.second) return l.second > r.second;
    return l.first < r.first;
  });
  std::map<std::string, int> ranks;
  for (std::size_t i = 0; i < scored.size(); ++i) {
    ranks[scored[i].first] = static_cast<int>(i + 1);
  }
  return ranks;
}

int Sign(double v) { return (v > 0) - (v < 0); }

}  // namespace

const LeaderboardRow* LeaderboardView::Find(const std::string& model_id) const {
  for (const LeaderboardRow& row : rows) {
    if (row.model_id == model_id) return &row;
  }
  return nullptr;
}

std::vector<std::string> LeaderboardView::Order() const {
  std::vector<std::string> order;
  for (const LeaderboardRow& row : rows) order.push_back(row.model_id);
  return order;
}

LeaderboardView BuildLeaderboard(std::span<const ModelRun> runs,
                                 const Corpus& corpus,
                                 std::span<const ModelDifficulty> difficulty,
                                 const WeightScheme& scheme,
                                 json provenance) {
  if (difficulty.size() != runs.size()) {
    throw Error(ErrorCode::kConfigError,
                "need one difficulty input per model run");
  }
  std::set<std::string> seen;
  for (const ModelRun& run : runs) {
    if (!seen.insert(run.model_id()).second) {
      throw Error(ErrorCode::kDuplicateModel,
                  "DuplicateModel: '" + run.model_id() + "'");
    }
  }

  LeaderboardView view;
  view.provenance = provenance.is_null() ? json::object() : std::move(provenance);
  std::vector<LeaderboardRow> rows;
  std::vector<std::pair<std::string, double>> by_accuracy, by_score;
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const ModelDifficulty& md = difficulty[i];
    if (!md.scores || !md.splits) {
      throw Error(ErrorCode::kConfigError, "missing difficulty input for '" +
                                               runs[i].model_id() + "'");
    }
    if (i == 0) {
      view.method_kind = std::string(MethodName(md.scores->method.kind));
      view.n_splits = md.splits->config.n;
    }
    const MetricResult m =
        WeightedMetric(runs[i], corpus, *md.scores, *md.splits, scheme);
    LeaderboardRow row;
    row.model_id = runs[i].model_id();
    row.overall = m.overall;
    row.normalized = m.normalized;
    row.split_scores = m.split_scores;
    row.accuracy = Accuracy(runs[i], corpus);
    row.inflation = row.accuracy * 100.0 - row.overall;
    by_accuracy.emplace_back(row.model_id, row.accuracy);
    by_score.emplace_back(row.model_id, row.overall);
    rows.push_back(std::move(row));
  }

  view.baseline_ranks = RanksOf(by_accuracy);
  const std::map<std::string, int> ranks = RanksOf(by_score);
  for (LeaderboardRow& row : rows) {
    row.rank = ranks.at(row.model_id);
    row.baseline_rank = view.baseline_ranks.at(row.model_id);
    row.changed = row.rank != row.baseline_rank;
    if (row.changed) view.changed.insert(row.model_id);
  }
  std::sort(rows.begin(), rows.end(),
            [](const auto& l, const auto& r) { return l.rank < r.rank; });
  view.rows = std::move(rows);

  std::vector<double> acc, score;
  for (const auto& [id, a] : by_accuracy) acc.push_back(a);
  for (const auto& [id, s] : by_score) score.push_back(s);
  view.tau = KendallTauB(acc, score);
  return view;
}

LeaderboardView BuildLeaderboard(std::span<const ModelRun> runs,
                                 const Corpus& corpus,
                                 const DifficultyScore& scores,
                                 const SplitAssignment& splits,
                                 const WeightScheme& scheme, json provenance) {
  std::vector<ModelDifficulty> shared(runs.size(),
                                      ModelDifficulty{&scores, &splits});
  return BuildLeaderboard(runs, corpus, shared, scheme, std::move(provenance));
}

double KendallTau(std::span<const std::string> order_a,
                  std::span<const std::string> order_b) {
  std::map<std::string, std::size_t> pos_b;
  for (std::size_t i = 0; i < order_b.size(); ++i) {
    if (!pos_b.emplace(order_b[i], i).second) {
      throw Error(ErrorCode::kSetMismatch, "SetMismatch: repeated model in ranking");
    }
  }
  if (order_a.size() != order_b.size()) {
    throw Error(ErrorCode::kSetMismatch, "SetMismatch: rankings differ in size");
  }
  std::vector<std::size_t> mapped;
  std::set<std::string> seen;
  for (const std::string& id : order_a) {
    auto it = pos_b.find(id);
    if (it == pos_b.end() || !seen.insert(id).second) {
      throw Error(ErrorCode::kSetMismatch,
                  "SetMismatch: '" + id + "' is not in both rankings");
    }
    mapped.push_back(it->second);
  }
  const std::size_t n = mapped.size();
  if (n < 2) return 1.0;
  long long concordant = 0, discordant = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      (mapped[i] < mapped[j] ? concordant : discordant) += 1;
    }
  }
  const double pairs = static_cast<double>(n * (n - 1) / 2);
  return static_cast<double>(concordant - discordant) / pairs;
}

double KendallTauB(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = x.size();
  if (n < 2) return 1.0;
  long long nc = 0, nd = 0, tie_x = 0, tie_y = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const int sx = Sign(x[i] - x[j]);
      const int sy = Sign(y[i] - y[j]);
      if (sx == 0 && sy == 0) continue;
      if (sx == 0) {
        ++tie_x;
      } else if (sy == 0) {
        ++tie_y;
      } else if (sx == sy) {
        ++nc;
      } else {
        ++nd;
      }
    }
  }
  const double untied_x = static_cast<double>(nc + nd + tie_y);
  const double untied_y = static_cast<double>(nc + nd + tie_x);
  if (untied_x == 0.0 && untied_y == 0.0) return 1.0;
  if (untied_x == 0.0 || untied_y == 0.0) return 0.0;
  return static_cast<double>(nc - nd) / std::sqrt(untied_x * untied_y);
}

InflationReport Inflation(const LeaderboardView& view) {
  InflationReport report;
  if (view.rows.empty()) return report;
  report.min = report.max = view.rows.front().inflation;
  double total = 0.0;
  for (const LeaderboardRow& row : view.rows) {
    report.per_model[row.model_id] = row.inflation;
    report.min = std::min(report.min, row.inflation);
    report.max = std::max(report.max, row.inflation);
    total += row.inflation;
  }
  report.mean = total / static_cast<double>(view.rows.size());
  return report;
}

json ToJson(const LeaderboardView& view) {
  json rows = json::array();
  for (const LeaderboardRow& r : view.rows) {
    json splits = json::array();
    for (const auto& s : r.split_scores) splits.push_back(s ? json(*s) : json());
    rows.push_back({{"rank", r.rank},
                    {"model_id", r.model_id},
                    {"overall", r.overall},
                    {"normalized", r.normalized},
                    {"split_scores", splits},
                    {"accuracy", r.accuracy},
                    {"baseline_rank", r.baseline_rank},
                    {"changed", r.changed},
                    {"inflation", r.inflation}});
  }
  return {{"report_schema", 1},
          {"provenance", view.provenance},
          {"method", view.method_kind},
          {"n_splits", view.n_splits},
          {"rows", rows},
          {"changed", view.changed},
          {"changed_count", view.changed.size()},
          {"kendall_tau", view.tau},
          {"inflation", ToJson(Inflation(view))}};
}

json ToJson(const InflationReport& report) {
  return {{"per_model", report.per_model},
          {"min", report.min},
          {"max", report.max},
          {"mean", report.mean}};
}

std::string ToCsv(const LeaderboardView& view) {
  std::ostringstream out;
  out << "rank,model,score";
  for (int s = 1; s <= view.n_splits; ++s) out << ",split_" << s;
  out << ",baseline_rank,changed,inflation\n";
  for (const LeaderboardRow& r : view.rows) {
    out << r.rank << ',' << CsvField(r.model_id) << ',' << Num(r.overall);
    for (const auto& s : r.split_scores) {
      out << ',';
      if (s) out << Num(*s);
    }
    out << ',' << r.baseline_rank << ',' << (r.changed ? "true" : "false")
        << ',' << Num(r.inflation) << '\n';
  }
  return out.str();
}

}  // namespace eql
