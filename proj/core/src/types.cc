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

#include "eql/types.h"

#include <algorithm>
#include <cmath>

#include "eql/error.h"

namespace eql {

std::string_view PartitionName(Partition p) {
  return p == Partition::kTrain ? "train" : "test";
}

Partition ParsePartition(std::string_view name) {
  if (name == "train") return Partition::kTrain;
  if (name == "test") return Partition::kTest;
  throw Error(ErrorCode::kParseError,
              "unknown partition '" + std::string(name) + "'");
}

LabelId LabelIndex(std::span<const std::string> vocab, std::string_view label) {
  auto it = std::find(vocab.begin(), vocab.end(), label);
  if (it == vocab.end()) {
    throw Error(ErrorCode::kUnknownLabel,
                "label '" + std::string(label) + "' not in vocabulary");
  }
  return static_cast<LabelId>(it - vocab.begin());
}

Corpus::Corpus(std::string name, std::vector<std::string> label_vocab,
               std::vector<Sample> samples)
    : name_(std::move(name)),
      label_vocab_(std::move(label_vocab)),
      samples_(std::move(samples)) {
  if (samples_.empty()) {
    throw Error(ErrorCode::kEmptyCorpus, "corpus has no samples");
  }
  index_.reserve(samples_.size());
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const Sample& s = samples_[i];
    if (!index_.emplace(s.id, i).second) {
      throw Error(ErrorCode::kDuplicateId, "duplicate sample id '" + s.id + "'");
    }
    if (s.gold_label < 0 ||
        static_cast<std::size_t>(s.gold_label) >= label_vocab_.size()) {
      throw Error(ErrorCode::kUnknownLabel,
                  "sample '" + s.id + "' has label outside the vocabulary");
    }
    if (s.vector) {
      if (!dim_) dim_ = s.vector->size();
      if (s.vector->size() != *dim_) {
        throw Error(ErrorCode::kDimMismatch,
                    "sample '" + s.id + "' vector has length " +
                        std::to_string(s.vector->size()) + ", expected " +
                        std::to_string(*dim_));
      }
      for (double v : *s.vector) {
        if (!std::isfinite(v)) {
          throw Error(ErrorCode::kNonFiniteInput,
                      "sample '" + s.id + "' vector is not finite");
        }
      }
    }
  }
}

const Sample* Corpus::Find(std::string_view id) const {
  auto it = index_.find(std::string(id));
  return it == index_.end() ? nullptr : &samples_[it->second];
}

const Sample& Corpus::At(std::string_view id) const {
  const Sample* s = Find(id);
  if (!s) {
    throw Error(ErrorCode::kNotFound, "no sample '" + std::string(id) + "'");
  }
  return *s;
}

std::vector<std::string> Corpus::Ids(Partition p) const {
  std::vector<std::string> ids;
  for (const Sample& s : samples_) {
    if (s.partition == p) ids.push_back(s.id);
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::size_t Corpus::Count(Partition p) const {
  return static_cast<std::size_t>(
      std::count_if(samples_.begin(), samples_.end(),
                    [p](const Sample& s) { return s.partition == p; }));
}

ModelRun::ModelRun(std::string model_id, std::vector<PredictionRecord> records,
                   const Corpus& corpus)
    : model_id_(std::move(model_id)) {
  for (PredictionRecord& r : records) {
    if (!(r.confidence >= 0.0 && r.confidence <= 1.0)) {
      throw Error(ErrorCode::kRangeError,
                  "model '" + model_id_ + "' sample '" + r.sample_id +
                      "': confidence " + std::to_string(r.confidence) +
                      " outside [0,1]");
    }
    const Sample* s = corpus.Find(r.sample_id);
    if (!s || s->partition != Partition::kTest) {
      throw Error(ErrorCode::kMissingPrediction,
                  "model '" + model_id_ + "' references unknown test sample '" +
                      r.sample_id + "'");
    }
    if (r.predicted_label < 0 ||
        static_cast<std::size_t>(r.predicted_label) >=
            corpus.label_vocab().size()) {
      throw Error(ErrorCode::kUnknownLabel,
                  "model '" + model_id_ + "' predicts a label outside the "
                  "vocabulary for '" + r.sample_id + "'");
    }
    std::string id = r.sample_id;
    if (!records_.try_emplace(id, std::move(r)).second) {
      throw Error(ErrorCode::kDuplicateId,
                  "model '" + model_id_ + "' has two records for '" + id + "'");
    }
  }
  for (const Sample& s : corpus.samples()) {
    if (s.partition == Partition::kTest && !records_.contains(s.id)) {
      throw Error(ErrorCode::kMissingPrediction,
                  "MissingPrediction(" + model_id_ + ", " + s.id + ")");
    }
  }
}

const PredictionRecord* ModelRun::Find(std::string_view sample_id) const {
  auto it = records_.find(std::string(sample_id));
  return it == records_.end() ? nullptr : &it->second;
}

double Accuracy(const ModelRun& run, const Corpus& corpus) {
  std::size_t total = 0;
  std::size_t correct = 0;
  for (const Sample& s : corpus.samples()) {
    if (s.partition != Partition::kTest) continue;
    const PredictionRecord* r = run.Find(s.id);
    if (!r) {
      throw Error(ErrorCode::kMissingPrediction,
                  "MissingPrediction(" + run.model_id() + ", " + s.id + ")");
    }
    ++total;
    if (r->predicted_label == s.gold_label) ++correct;
  }
  if (total == 0) return 0.0;
  return static_cast<double>(correct) / static_cast<double>(total);
}

}  // namespace eql
