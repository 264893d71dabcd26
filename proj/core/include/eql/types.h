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

#ifndef EQL_TYPES_H_
#define EQL_TYPES_H_

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace eql {

using LabelId = std::int32_t;

enum class Partition { kTrain, kTest };

std::string_view PartitionName(Partition p);
Partition ParsePartition(std::string_view name);

struct Sample {
  std::string id;
  std::string text;
  LabelId gold_label = 0;
  Partition partition = Partition::kTest;
  std::optional<std::vector<double>> vector;

  bool operator==(const Sample&) const = default;
};

// Position of `label` in `vocab`; throws UnknownLabel.
LabelId LabelIndex(std::span<const std::string> vocab, std::string_view label);

// An immutable, validated collection of train and test samples.
class Corpus {
 public:
  Corpus() = default;
  // Validates id uniqueness, label range and vector dimensions.
  Corpus(std::string name, std::vector<std::string> label_vocab,
         std::vector<Sample> samples);

  const std::string& name() const { return name_; }
  const std::vector<std::string>& label_vocab() const { return label_vocab_; }
  const std::vector<Sample>& samples() const { return samples_; }
  std::optional<std::size_t> dim() const { return dim_; }

  const Sample* Find(std::string_view id) const;
  // Throws NotFound.
  const Sample& At(std::string_view id) const;

  // Ids of one partition, sorted ascending.
  std::vector<std::string> Ids(Partition p) const;
  std::size_t Count(Partition p) const;

  bool operator==(const Corpus& other) const {
    return name_ == other.name_ && label_vocab_ == other.label_vocab_ &&
           samples_ == other.samples_;
  }

 private:
  std::string name_;
  std::vector<std::string> label_vocab_;
  std::vector<Sample> samples_;
  std::optional<std::size_t> dim_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct PredictionRecord {
  std::string sample_id;
  LabelId predicted_label = 0;
  double confidence = 0.0;  // maximum softmax probability

  bool operator==(const PredictionRecord&) const = default;
};

// One model's predictions over the test partition of a corpus. Construction
// rejects dangling sample references, out-of-range confidences, duplicates
// and coverage gaps.
class ModelRun {
 public:
  ModelRun(std::string model_id, std::vector<PredictionRecord> records,
           const Corpus& corpus);

  const std::string& model_id() const { return model_id_; }
  // Keyed by sample id.
  const std::map<std::string, PredictionRecord>& records() const {
    return records_;
  }
  const PredictionRecord* Find(std::string_view sample_id) const;

  bool operator==(const ModelRun&) const = default;

 private:
  std::string model_id_;
  std::map<std::string, PredictionRecord> records_;
};

// Fraction of test samples predicted correctly. Throws MissingPrediction.
double Accuracy(const ModelRun& run, const Corpus& corpus);

}  // namespace eql

#endif  // EQL_TYPES_H_
