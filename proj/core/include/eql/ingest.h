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

#ifndef EQL_INGEST_H_
#define EQL_INGEST_H_

// Loading and saving of corpora, prediction dumps and embeddings.
//
// Corpus JSONL: an optional header line {"corpus": name, "label_vocab": [...]}
// followed by one {"id","text","label","partition"[,"vector"]} per line. When
// the header is absent the vocabulary is the sorted set of distinct labels.
//
// Predictions: JSONL {"model","sample_id","predicted","confidence"} or CSV
// with a header naming those four columns in any order.
//
// Embeddings: JSONL {"sample_id","vector"} (optional {"dim"} header line), or
// the EMB1 binary layout: magic "EMB1", u32 LE dim, then records of
// (u16 LE id length, UTF-8 id bytes, dim x f32 LE) until end of file.

#include <cstdint>
#include <filesystem>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "eql/types.h"

namespace eql {

enum class PredictionFormat { kJsonl, kCsv };
enum class EmbeddingFormat { kJsonl, kBinary };

struct EmbeddingFile {
  std::size_t dim = 0;
  std::map<std::string, std::vector<double>> entries;

  const std::vector<double>* Find(std::string_view id) const;
  bool operator==(const EmbeddingFile&) const = default;
};

struct HoldoutMask {
  std::set<std::string> sample_ids;
  bool operator==(const HoldoutMask&) const = default;
};

inline constexpr std::uint64_t kFnvOffsetBasis = 0xcbf29ce484222325ULL;
inline constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

std::uint64_t Fnv1a64(std::string_view bytes,
                      std::uint64_t basis = kFnvOffsetBasis);
// 16 lowercase hex digits of the FNV-1a 64 hash of a file's bytes.
std::string FileDigest(const std::filesystem::path& path);
std::string HexDigest(std::uint64_t value);

Corpus ParseCorpus(std::istream& in, std::string name);
Corpus LoadCorpus(const std::filesystem::path& path);
void SaveCorpus(const Corpus& corpus, const std::filesystem::path& path);

PredictionFormat PredictionFormatFor(const std::filesystem::path& path);
std::vector<ModelRun> LoadPredictions(const std::filesystem::path& path,
                                      PredictionFormat format,
                                      const Corpus& corpus);
void SavePredictions(const std::vector<ModelRun>& runs, const Corpus& corpus,
                     const std::filesystem::path& path,
                     PredictionFormat format);

EmbeddingFormat EmbeddingFormatFor(const std::filesystem::path& path);
EmbeddingFile LoadEmbeddings(const std::filesystem::path& path,
                             EmbeddingFormat format);
void SaveEmbeddings(const EmbeddingFile& emb, const std::filesystem::path& path,
                    EmbeddingFormat format);

// Vectors carried inline by the corpus, if every sample has one.
std::optional<EmbeddingFile> EmbeddingsFromCorpus(const Corpus& corpus);

// Hashed bag-of-words stand-in for external sentence embeddings. Each
// lowercased whitespace token is hashed with FNV-1a 64 (offset basis xor
// seed); bucket = hash mod dim, sign = +1 when (hash >> 32) is even. The
// vector is L2-normalized; empty text maps to the zero vector.
EmbeddingFile FallbackFeaturize(const Corpus& corpus, std::size_t dim,
                                std::uint64_t seed);

// One test-sample id per line; blank lines ignored.
HoldoutMask LoadHoldout(const std::filesystem::path& path,
                        const Corpus& corpus);
// Seeded per-label random selection of round(fraction * class size) test ids.
HoldoutMask StratifiedHoldout(const Corpus& corpus, double fraction,
                              std::uint64_t seed);

}  // namespace eql

#endif  // EQL_INGEST_H_
