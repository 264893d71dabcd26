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

#include "eql/difficulty.h"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>

#include "eql/error.h"
#include "eql/random.h"
#include "parallel.h"

namespace eql {
namespace {

using nlohmann::json;

constexpr char kScoreFormat[] = "eql-difficulty/1";

std::string ShortDouble(double v) {
  std::array<char, 64> buf;
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

const std::vector<double>& VectorFor(const EmbeddingFile& emb,
                                     const std::string& id) {
  const std::vector<double>* v = emb.Find(id);
  if (!v) {
    throw Error(ErrorCode::kMissingEmbedding, "MissingEmbedding(" + id + ")");
  }
  return *v;
}

DenseMatrix GatherRows(const EmbeddingFile& emb,
                       const std::vector<std::string>& ids) {
  DenseMatrix x(ids.size(), emb.dim);
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto& v = VectorFor(emb, ids[i]);
    std::copy(v.begin(), v.end(), x.row(i).begin());
  }
  return x;
}

DenseMatrix SubsetRows(const DenseMatrix& x,
                       std::span<const std::size_t> rows) {
  DenseMatrix out(rows.size(), x.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto src = x.row(rows[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

}  // namespace

std::string_view MethodName(MethodKind kind) {
  switch (kind) {
    case MethodKind::kWsbiasAlg1: return "wsbias_alg1";
    case MethodKind::kWsbiasAlg2: return "wsbias_alg2";
    case MethodKind::kWood: return "wood";
    case MethodKind::kWmprob: return "wmprob";
  }
  return "unknown";
}

MethodKind ParseMethodKind(std::string_view name) {
  if (name == "wsbias_alg1" || name == "wsbias1") return MethodKind::kWsbiasAlg1;
  if (name == "wsbias_alg2" || name == "wsbias2") return MethodKind::kWsbiasAlg2;
  if (name == "wood") return MethodKind::kWood;
  if (name == "wmprob") return MethodKind::kWmprob;
  throw Error(ErrorCode::kConfigError,
              "unknown difficulty method '" + std::string(name) + "'");
}

std::string DifficultyMethod::Id() const {
  switch (kind) {
    case MethodKind::kWood:
      return "wood(p=" + ShortDouble(sts_pct) + ")";
    case MethodKind::kWmprob:
      return "wmprob(" + model_id + ")";
    default:
      return std::string(MethodName(kind));
  }
}

std::optional<double> DifficultyScore::Find(std::string_view sample_id) const {
  auto it = values.find(std::string(sample_id));
  if (it == values.end()) return std::nullopt;
  return it->second;
}

std::vector<std::size_t> DrawTrainingSubset(std::uint64_t seed, int iteration,
                                            std::span<const LabelId> labels,
                                            std::size_t t) {
  Rng rng(DeriveSeed(seed, static_cast<std::uint64_t>(iteration)));
  std::vector<std::size_t> pool(labels.size());
  for (int attempt = 0; attempt < kMaxSubsetRedraws; ++attempt) {
    for (std::size_t i = 0; i < pool.size(); ++i) pool[i] = i;
    // Partial Fisher-Yates: the first t slots become the subset.
    for (std::size_t i = 0; i < t; ++i) {
      const std::size_t j =
          i + static_cast<std::size_t>(UniformBelow(rng, pool.size() - i));
      std::swap(pool[i], pool[j]);
    }
    std::vector<std::size_t> subset(pool.begin(), pool.begin() + t);
    const LabelId first = labels[subset.front()];
    if (std::any_of(subset.begin(), subset.end(),
                    [&](std::size_t k) { return labels[k] != first; })) {
      std::sort(subset.begin(), subset.end());
      return subset;
    }
  }
  return {};
}

std::vector<LearnerSpec> WithinTestLearners(std::uint64_t seed, int iteration) {
  const auto stream = static_cast<std::uint64_t>(iteration);
  return {
      LearnerSpec{LearnerKind::kLogReg, {}, DeriveSeed(seed ^ 0x4c52ULL, stream)},
      LearnerSpec{LearnerKind::kSvmLinear, {}, DeriveSeed(seed ^ 0x53564dULL, stream)},
  };
}

DifficultyScore BiasWithinTest(const Corpus& corpus, const EmbeddingFile& emb,
                               const WithinTestParams& params) {
  if (params.m < 1) {
    throw Error(ErrorCode::kConfigError, "m must be at least 1");
  }
  HoldoutMask holdout =
      params.holdout ? *params.holdout
                     : StratifiedHoldout(corpus, params.holdout_fraction,
                                         params.seed);
  std::vector<std::string> population;
  for (const std::string& id : corpus.Ids(Partition::kTest)) {
    if (!holdout.sample_ids.contains(id)) population.push_back(id);
  }
  for (const std::string& id : holdout.sample_ids) {
    const Sample* s = corpus.Find(id);
    if (!s || s->partition != Partition::kTest) {
      throw Error(ErrorCode::kConfigError,
                  "holdout id '" + id + "' is not a test sample");
    }
  }
  const std::size_t r = population.size();
  const std::size_t t =
      params.t > 0 ? static_cast<std::size_t>(params.t)
                   : std::max<std::size_t>(2, r / 100);
  if (t >= r) {
    throw Error(ErrorCode::kConfigError,
                "subset size t=" + std::to_string(t) +
                    " must be smaller than |R|=" + std::to_string(r));
  }
  if (t < 2) {
    throw Error(ErrorCode::kConfigError, "subset size t must be at least 2");
  }

  const DenseMatrix x = GatherRows(emb, population);
  std::vector<LabelId> labels(r);
  for (std::size_t i = 0; i < r; ++i) {
    labels[i] = corpus.At(population[i]).gold_label;
  }

  // Per-iteration counters summed afterwards; integer sums make the result
  // independent of how iterations are spread over threads.
  const auto iterations = static_cast<std::size_t>(params.m);
  std::vector<std::vector<std::uint32_t>> evals(iterations);
  std::vector<std::vector<std::uint32_t>> hits(iterations);
  std::vector<char> skipped(iterations, 0);
  internal::ParallelChunks(iterations, [&](std::size_t begin, std::size_t end) {
    for (std::size_t it = begin; it < end; ++it) {
      const int iter = static_cast<int>(it);
      std::vector<std::uint32_t> e(r, 0), c(r, 0);
      const std::vector<std::size_t> subset =
          DrawTrainingSubset(params.seed, iter, labels, t);
      if (subset.empty()) {
        skipped[it] = 1;
      } else {
        const DenseMatrix xs = SubsetRows(x, subset);
        std::vector<LabelId> ys(subset.size());
        for (std::size_t k = 0; k < subset.size(); ++k) ys[k] = labels[subset[k]];
        std::vector<char> in_subset(r, 0);
        for (std::size_t k : subset) in_subset[k] = 1;
        for (const LearnerSpec& spec : WithinTestLearners(params.seed, iter)) {
          const FittedModel model = Fit(spec, xs, ys);
          for (std::size_t k = 0; k < r; ++k) {
            if (in_subset[k]) continue;
            ++e[k];
            if (model.Predict(x.row(k)) == labels[k]) ++c[k];
          }
        }
      }
      evals[it] = std::move(e);
      hits[it] = std::move(c);
    }
  });

  std::vector<std::uint64_t> e_total(r, 0), c_total(r, 0);
  for (std::size_t it = 0; it < iterations; ++it) {
    for (std::size_t k = 0; k < r; ++k) {
      e_total[k] += evals[it][k];
      c_total[k] += hits[it][k];
    }
  }

  DifficultyScore score;
  score.method.kind = MethodKind::kWsbiasAlg1;
  score.undefined_ids = holdout.sample_ids;
  std::size_t uncovered = 0;
  for (std::size_t k = 0; k < r; ++k) {
    if (e_total[k] == 0) {
      ++uncovered;
      score.undefined_ids.insert(population[k]);
    } else {
      score.values[population[k]] = static_cast<double>(c_total[k]) /
                                    static_cast<double>(e_total[k]);
    }
  }
  if (uncovered * 20 > r) {
    score.warnings.push_back("InsufficientCoverage: " +
                             std::to_string(uncovered) + " of " +
                             std::to_string(r) + " samples never evaluated");
  }
  const auto skipped_count =
      static_cast<std::size_t>(std::count(skipped.begin(), skipped.end(), 1));
  score.params = {
      {"m", params.m},
      {"t", t},
      {"seed", params.seed},
      {"holdout", params.holdout ? "given" : "stratified"},
      {"holdout_fraction", params.holdout ? json(nullptr)
                                          : json(params.holdout_fraction)},
      {"holdout_size", holdout.sample_ids.size()},
      {"population", r},
      {"learners", {"logreg", "svm_linear"}},
      {"single_class_iterations", skipped_count},
      {"embedding_source", params.embedding_source},
  };
  return score;
}

std::vector<LearnerSpec> DefaultAcrossLearners() {
  return {LearnerSpec{LearnerKind::kLogReg, {}, 0},
          LearnerSpec{LearnerKind::kSvmLinear, {}, 0},
          LearnerSpec{LearnerKind::kSvmRbf, {}, 0},
          LearnerSpec{LearnerKind::kGaussianNB, {}, 0}};
}

DifficultyScore BiasAcrossTrainTest(const Corpus& corpus,
                                    const EmbeddingFile& emb,
                                    const AcrossParams& params) {
  const std::vector<LearnerSpec> learners =
      params.learners.empty() ? DefaultAcrossLearners() : params.learners;
  const std::vector<std::string> train_ids = corpus.Ids(Partition::kTrain);
  const std::vector<std::string> test_ids = corpus.Ids(Partition::kTest);
  const DenseMatrix x_train = GatherRows(emb, train_ids);
  const DenseMatrix x_test = GatherRows(emb, test_ids);
  std::vector<LabelId> y_train(train_ids.size());
  for (std::size_t i = 0; i < train_ids.size(); ++i) {
    y_train[i] = corpus.At(train_ids[i]).gold_label;
  }

  std::vector<int> correct(test_ids.size(), 0);
  json names = json::array();
  for (const LearnerSpec& spec : learners) {
    const FittedModel model = Fit(spec, x_train, y_train);
    for (std::size_t i = 0; i < test_ids.size(); ++i) {
      if (model.Predict(x_test.row(i)) == corpus.At(test_ids[i]).gold_label) {
        ++correct[i];
      }
    }
    names.push_back(LearnerName(spec.kind));
  }

  DifficultyScore score;
  score.method.kind = MethodKind::kWsbiasAlg2;
  const double count = static_cast<double>(learners.size());
  for (std::size_t i = 0; i < test_ids.size(); ++i) {
    score.values[test_ids[i]] = static_cast<double>(correct[i]) / count;
  }
  score.params = {{"learners", names},
                  {"train_size", train_ids.size()},
                  {"embedding_source", params.embedding_source}};
  return score;
}

StsMatrix::StsMatrix(std::vector<std::string> test_ids,
                     std::vector<std::string> train_ids,
                     std::vector<double> values)
    : test_ids_(std::move(test_ids)),
      train_ids_(std::move(train_ids)),
      values_(std::move(values)) {
  if (values_.size() != test_ids_.size() * train_ids_.size()) {
    throw Error(ErrorCode::kDimMismatch, "similarity matrix shape mismatch");
  }
}

double RemappedCosine(std::span<const double> u, std::span<const double> v) {
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    dot += u[k] * v[k];
    nu += u[k] * u[k];
    nv += v[k] * v[k];
  }
  if (nu == 0.0 || nv == 0.0) return 0.5;
  const double cosine = dot / (std::sqrt(nu) * std::sqrt(nv));
  return std::clamp((cosine + 1.0) / 2.0, 0.0, 1.0);
}

StsMatrix ComputeSts(const Corpus& corpus, const EmbeddingFile& emb) {
  std::vector<std::string> test_ids = corpus.Ids(Partition::kTest);
  std::vector<std::string> train_ids = corpus.Ids(Partition::kTrain);
  const DenseMatrix x_test = GatherRows(emb, test_ids);
  const DenseMatrix x_train = GatherRows(emb, train_ids);
  std::vector<double> values(test_ids.size() * train_ids.size());
  const std::size_t cols = train_ids.size();
  internal::ParallelChunks(test_ids.size(), [&](std::size_t begin,
                                                std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      for (std::size_t j = 0; j < cols; ++j) {
        values[i * cols + j] = RemappedCosine(x_test.row(i), x_train.row(j));
      }
    }
  });
  return StsMatrix(std::move(test_ids), std::move(train_ids), std::move(values));
}

std::size_t TopCount(double pct, std::size_t n) {
  if (n == 0) return 0;
  const double raw = std::ceil(pct * static_cast<double>(n) / 100.0 - 1e-9);
  return std::clamp<std::size_t>(static_cast<std::size_t>(std::max(raw, 1.0)),
                                 1, n);
}

double TopMean(std::span<const double> descending, std::size_t k) {
  if (k == 0 || descending.empty()) return 0.0;
  k = std::min(k, descending.size());
  double mean = descending[0];
  for (std::size_t i = 1; i < k; ++i) {
    const double v = descending[i];
    const double next = mean + (v - mean) / static_cast<double>(i + 1);
    mean = std::clamp(next, v, mean);
  }
  return mean;
}

DifficultyScore WoodDifficulty(const StsMatrix& sts, double pct,
                               std::string embedding_source) {
  if (!(pct > 0.0 && pct <= 100.0)) {
    throw Error(ErrorCode::kConfigError,
                "STS percentage must be in (0, 100], got " + ShortDouble(pct));
  }
  if (sts.train_ids().empty()) {
    throw Error(ErrorCode::kConfigError, "WOOD needs a non-empty train set");
  }
  const std::size_t k = TopCount(pct, sts.train_ids().size());
  DifficultyScore score;
  score.method.kind = MethodKind::kWood;
  score.method.sts_pct = pct;
  std::vector<double> row;
  for (std::size_t i = 0; i < sts.test_ids().size(); ++i) {
    auto r = sts.Row(i);
    row.assign(r.begin(), r.end());
    std::sort(row.begin(), row.end(), std::greater<>());
    score.values[sts.test_ids()[i]] = TopMean(row, k);
  }
  score.params = {{"sts_pct", pct},
                  {"top_k", k},
                  {"train_size", sts.train_ids().size()},
                  {"similarity", "remapped_cosine"},
                  {"embedding_source", std::move(embedding_source)}};
  return score;
}

DifficultyScore WmprobDifficulty(const ModelRun& run) {
  DifficultyScore score;
  score.method.kind = MethodKind::kWmprob;
  score.method.model_id = run.model_id();
  for (const auto& [id, record] : run.records()) {
    score.values[id] = record.confidence;
  }
  score.params = {{"model_id", run.model_id()}};
  return score;
}

void WriteScores(const DifficultyScore& score, std::ostream& out) {
  json header = {{"format", kScoreFormat},
                 {"method", MethodName(score.method.kind)},
                 {"method_id", score.method.Id()},
                 {"params", score.params},
                 {"undefined_ids", score.undefined_ids},
                 {"warnings", score.warnings}};
  if (score.method.kind == MethodKind::kWood) {
    header["sts_pct"] = score.method.sts_pct;
  }
  if (score.method.kind == MethodKind::kWmprob) {
    header["model_id"] = score.method.model_id;
  }
  if (!score.provenance.is_null()) header["provenance"] = score.provenance;
  out << header.dump() << '\n';
  for (const auto& [id, b] : score.values) {
    out << json{{"sample_id", id}, {"B", b}}.dump() << '\n';
  }
}

DifficultyScore ReadScores(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  DifficultyScore score;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kParseError, "ParseError(line " +
                                              std::to_string(line_no) +
                                              "): " + e.what());
    }
    try {
      if (!have_header) {
        score.method.kind = ParseMethodKind(j.at("method").get<std::string>());
        if (j.contains("sts_pct")) score.method.sts_pct = j["sts_pct"].get<double>();
        if (j.contains("model_id")) {
          score.method.model_id = j["model_id"].get<std::string>();
        }
        score.params = j.value("params", json::object());
        score.undefined_ids =
            j.value("undefined_ids", std::set<std::string>{});
        score.warnings = j.value("warnings", std::vector<std::string>{});
        if (j.contains("provenance")) score.provenance = j["provenance"];
        have_header = true;
        continue;
      }
      const double b = j.at("B").get<double>();
      if (!(b >= 0.0 && b <= 1.0)) {
        throw Error(ErrorCode::kRangeError,
                    "RangeError(line " + std::to_string(line_no) +
                        "): B outside [0,1]");
      }
      score.values[j.at("sample_id").get<std::string>()] = b;
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kParseError, "ParseError(line " +
                                              std::to_string(line_no) +
                                              "): " + e.what());
    }
  }
  if (!have_header) {
    throw Error(ErrorCode::kParseError, "ParseError: empty score file");
  }
  return score;
}

void SaveScores(const DifficultyScore& score, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::kIoError, "cannot write '" + path.string() + "'");
  }
  WriteScores(score, out);
}

DifficultyScore LoadScores(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kParseError, "cannot open '" + path.string() + "'");
  }
  return ReadScores(in);
}

}  // namespace eql
