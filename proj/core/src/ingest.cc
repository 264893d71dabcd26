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

#include "eql/ingest.h"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cctype>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <sstream>

#include <nlohmann/json.hpp>

#include "eql/error.h"
#include "eql/random.h"

namespace eql {
namespace {

using nlohmann::json;

std::ifstream OpenIn(const std::filesystem::path& path, bool binary = false) {
  std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
  if (!in) {
    throw Error(ErrorCode::kParseError,
                "cannot open '" + path.string() + "' for reading");
  }
  return in;
}

std::ofstream OpenOut(const std::filesystem::path& path, bool binary = false) {
  if (path.has_parent_path()) {
    std::filesystem::create_directories(path.parent_path());
  }
  std::ofstream out(path, binary ? std::ios::binary | std::ios::trunc
                                 : std::ios::out | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::kIoError,
                "cannot open '" + path.string() + "' for writing");
  }
  return out;
}

std::string Where(const std::string& source, std::size_t line) {
  return source + ":" + std::to_string(line);
}

json ParseLine(const std::string& line, const std::string& source,
               std::size_t line_no) {
  try {
    json j = json::parse(line);
    if (!j.is_object()) {
      throw Error(ErrorCode::kParseError,
                  "ParseError(" + Where(source, line_no) + "): not an object");
    }
    return j;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParseError,
                "ParseError(" + Where(source, line_no) + "): " + e.what());
  }
}

bool IsBlank(const std::string& line) {
  return std::all_of(line.begin(), line.end(),
                     [](unsigned char c) { return std::isspace(c); });
}

std::string LabelString(const json& v, const std::string& where) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw Error(ErrorCode::kParseError,
              "ParseError(" + where + "): label must be a string or integer");
}

std::vector<double> VectorField(const json& v, const std::string& where) {
  if (!v.is_array()) {
    throw Error(ErrorCode::kParseError,
                "ParseError(" + where + "): vector must be an array");
  }
  std::vector<double> out;
  out.reserve(v.size());
  for (const json& x : v) {
    if (!x.is_number()) {
      throw Error(ErrorCode::kParseError,
                  "ParseError(" + where + "): non-numeric vector entry");
    }
    out.push_back(x.get<double>());
  }
  return out;
}

template <typename T>
T Field(const json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) {
    throw Error(ErrorCode::kParseError,
                "ParseError(" + where + "): missing field '" + key + "'");
  }
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::kParseError,
                "ParseError(" + where + "): bad type for '" + key + "'");
  }
}

std::string FormatDouble(double v) {
  std::array<char, 64> buf;
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

// Minimal RFC 4180 field splitter; quoted fields may contain commas and "".
std::vector<std::string> SplitCsv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

std::string CsvQuote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

struct RawPrediction {
  std::string model;
  std::string sample_id;
  std::string predicted;
  bool predicted_is_index = false;
  double confidence = 0.0;
};

LabelId ResolvePredicted(const RawPrediction& raw, const Corpus& corpus,
                         const std::string& where) {
  if (raw.predicted_is_index) {
    long long idx = 0;
    auto [p, ec] = std::from_chars(raw.predicted.data(),
                                   raw.predicted.data() + raw.predicted.size(),
                                   idx);
    if (ec != std::errc() || idx < 0 ||
        static_cast<std::size_t>(idx) >= corpus.label_vocab().size()) {
      throw Error(ErrorCode::kUnknownLabel,
                  where + ": predicted index " + raw.predicted +
                      " outside the vocabulary");
    }
    return static_cast<LabelId>(idx);
  }
  return LabelIndex(corpus.label_vocab(), raw.predicted);
}

std::vector<ModelRun> GroupRuns(const std::vector<RawPrediction>& raws,
                                const std::vector<std::string>& wheres,
                                const Corpus& corpus) {
  std::map<std::string, std::vector<PredictionRecord>> by_model;
  for (std::size_t i = 0; i < raws.size(); ++i) {
    const RawPrediction& r = raws[i];
    if (!(r.confidence >= 0.0 && r.confidence <= 1.0)) {
      throw Error(ErrorCode::kRangeError,
                  "RangeError(" + wheres[i] + "): confidence " +
                      FormatDouble(r.confidence) + " outside [0,1]");
    }
    by_model[r.model].push_back(PredictionRecord{
        r.sample_id, ResolvePredicted(r, corpus, wheres[i]), r.confidence});
  }
  std::vector<ModelRun> runs;
  runs.reserve(by_model.size());
  for (auto& [model, records] : by_model) {
    runs.emplace_back(model, std::move(records), corpus);
  }
  return runs;
}

void PutU32(std::ostream& out, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v),
                              static_cast<unsigned char>(v >> 8),
                              static_cast<unsigned char>(v >> 16),
                              static_cast<unsigned char>(v >> 24)};
  out.write(reinterpret_cast<const char*>(b), 4);
}

void PutU16(std::ostream& out, std::uint16_t v) {
  const unsigned char b[2] = {static_cast<unsigned char>(v),
                              static_cast<unsigned char>(v >> 8)};
  out.write(reinterpret_cast<const char*>(b), 2);
}

std::uint32_t GetU32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) |
         (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

EmbeddingFile LoadBinaryEmbeddings(const std::filesystem::path& path) {
  std::ifstream in = OpenIn(path, true);
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                   std::istreambuf_iterator<char>());
  const std::string src = path.string();
  if (bytes.size() < 8 || std::memcmp(bytes.data(), "EMB1", 4) != 0) {
    throw Error(ErrorCode::kParseError,
                "ParseError(" + src + "): missing EMB1 header");
  }
  EmbeddingFile emb;
  emb.dim = GetU32(bytes.data() + 4);
  if (emb.dim == 0) {
    throw Error(ErrorCode::kDimMismatch, src + ": declared dim is zero");
  }
  std::size_t pos = 8;
  std::size_t record = 0;
  while (pos < bytes.size()) {
    ++record;
    const std::string where =
        "ParseError(" + src + " record " + std::to_string(record) + ")";
    if (pos + 2 > bytes.size()) {
      throw Error(ErrorCode::kParseError, where + ": truncated id length");
    }
    const std::size_t len = bytes[pos] | (bytes[pos + 1] << 8);
    pos += 2;
    if (pos + len + emb.dim * 4 > bytes.size()) {
      throw Error(ErrorCode::kParseError, where + ": truncated record");
    }
    std::string id(reinterpret_cast<const char*>(bytes.data() + pos), len);
    pos += len;
    std::vector<double> vec(emb.dim);
    for (std::size_t k = 0; k < emb.dim; ++k, pos += 4) {
      vec[k] = std::bit_cast<float>(GetU32(bytes.data() + pos));
    }
    if (!emb.entries.emplace(std::move(id), std::move(vec)).second) {
      throw Error(ErrorCode::kDuplicateId, where + ": duplicate sample id");
    }
  }
  return emb;
}

EmbeddingFile LoadJsonlEmbeddings(const std::filesystem::path& path) {
  std::ifstream in = OpenIn(path);
  const std::string src = path.string();
  EmbeddingFile emb;
  std::optional<std::size_t> declared;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (IsBlank(line)) continue;
    json j = ParseLine(line, src, line_no);
    const std::string where = Where(src, line_no);
    if (!j.contains("sample_id") && j.contains("dim")) {
      declared = Field<std::size_t>(j, "dim", where);
      continue;
    }
    std::string id = Field<std::string>(j, "sample_id", where);
    auto it = j.find("vector");
    if (it == j.end()) {
      throw Error(ErrorCode::kParseError,
                  "ParseError(" + where + "): missing field 'vector'");
    }
    std::vector<double> vec = VectorField(*it, where);
    if (!declared) declared = vec.size();
    if (vec.size() != *declared) {
      throw Error(ErrorCode::kDimMismatch,
                  "DimMismatch(" + where + "): entry '" + id + "' has length " +
                      std::to_string(vec.size()) + ", expected " +
                      std::to_string(*declared));
    }
    if (!emb.entries.emplace(id, std::move(vec)).second) {
      throw Error(ErrorCode::kDuplicateId,
                  "DuplicateId(" + where + "): '" + id + "'");
    }
  }
  if (!declared || *declared == 0) {
    throw Error(ErrorCode::kDimMismatch, src + ": no embedding dimension");
  }
  emb.dim = *declared;
  return emb;
}

}  // namespace

const std::vector<double>* EmbeddingFile::Find(std::string_view id) const {
  auto it = entries.find(std::string(id));
  return it == entries.end() ? nullptr : &it->second;
}

std::uint64_t Fnv1a64(std::string_view bytes, std::uint64_t basis) {
  std::uint64_t h = basis;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

std::string HexDigest(std::uint64_t value) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i, value >>= 4) out[i] = kHex[value & 0xf];
  return out;
}

std::string FileDigest(const std::filesystem::path& path) {
  std::ifstream in = OpenIn(path, true);
  std::uint64_t h = kFnvOffsetBasis;
  std::array<char, 1 << 14> buf;
  while (in) {
    in.read(buf.data(), buf.size());
    h = Fnv1a64(std::string_view(buf.data(), in.gcount()), h);
  }
  return HexDigest(h);
}

Corpus ParseCorpus(std::istream& in, std::string name) {
  struct Row {
    Sample sample;
    std::string label;
    std::string where;
  };
  std::vector<Row> rows;
  std::optional<std::vector<std::string>> vocab;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (IsBlank(line)) continue;
    json j = ParseLine(line, name, line_no);
    const std::string where = Where(name, line_no);
    if (!j.contains("id") && j.contains("label_vocab")) {
      vocab = Field<std::vector<std::string>>(j, "label_vocab", where);
      if (auto it = j.find("corpus"); it != j.end() && it->is_string()) {
        name = it->get<std::string>();
      }
      continue;
    }
    Row row;
    row.where = where;
    row.sample.id = Field<std::string>(j, "id", where);
    row.sample.text = Field<std::string>(j, "text", where);
    auto label = j.find("label");
    if (label == j.end()) {
      throw Error(ErrorCode::kParseError,
                  "ParseError(" + where + "): missing field 'label'");
    }
    row.label = LabelString(*label, where);
    row.sample.partition =
        ParsePartition(Field<std::string>(j, "partition", where));
    if (auto v = j.find("vector"); v != j.end() && !v->is_null()) {
      row.sample.vector = VectorField(*v, where);
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) {
    throw Error(ErrorCode::kEmptyCorpus, "EmptyCorpus: '" + name + "'");
  }
  if (!vocab) {
    std::set<std::string> distinct;
    for (const Row& r : rows) distinct.insert(r.label);
    vocab.emplace(distinct.begin(), distinct.end());
  }
  std::vector<Sample> samples;
  samples.reserve(rows.size());
  for (Row& r : rows) {
    auto it = std::find(vocab->begin(), vocab->end(), r.label);
    if (it == vocab->end()) {
      throw Error(ErrorCode::kUnknownLabel, "UnknownLabel(" + r.where +
                                                "): '" + r.label + "'");
    }
    r.sample.gold_label = static_cast<LabelId>(it - vocab->begin());
    samples.push_back(std::move(r.sample));
  }
  return Corpus(std::move(name), std::move(*vocab), std::move(samples));
}

Corpus LoadCorpus(const std::filesystem::path& path) {
  std::ifstream in = OpenIn(path);
  return ParseCorpus(in, path.stem().string());
}

void SaveCorpus(const Corpus& corpus, const std::filesystem::path& path) {
  std::ofstream out = OpenOut(path);
  out << json{{"corpus", corpus.name()}, {"label_vocab", corpus.label_vocab()}}
             .dump()
      << '\n';
  for (const Sample& s : corpus.samples()) {
    json j = {{"id", s.id},
              {"text", s.text},
              {"label", corpus.label_vocab()[s.gold_label]},
              {"partition", PartitionName(s.partition)}};
    if (s.vector) j["vector"] = *s.vector;
    out << j.dump() << '\n';
  }
}

PredictionFormat PredictionFormatFor(const std::filesystem::path& path) {
  return path.extension() == ".csv" ? PredictionFormat::kCsv
                                    : PredictionFormat::kJsonl;
}

std::vector<ModelRun> LoadPredictions(const std::filesystem::path& path,
                                      PredictionFormat format,
                                      const Corpus& corpus) {
  std::ifstream in = OpenIn(path);
  const std::string src = path.string();
  std::vector<RawPrediction> raws;
  std::vector<std::string> wheres;
  std::string line;
  std::size_t line_no = 0;

  if (format == PredictionFormat::kJsonl) {
    while (std::getline(in, line)) {
      ++line_no;
      if (IsBlank(line)) continue;
      json j = ParseLine(line, src, line_no);
      const std::string where = Where(src, line_no);
      RawPrediction r;
      r.model = Field<std::string>(j, "model", where);
      r.sample_id = Field<std::string>(j, "sample_id", where);
      auto pred = j.find("predicted");
      if (pred == j.end()) {
        throw Error(ErrorCode::kParseError,
                    "ParseError(" + where + "): missing field 'predicted'");
      }
      if (pred->is_number_integer()) {
        r.predicted = std::to_string(pred->get<long long>());
        r.predicted_is_index = true;
      } else {
        r.predicted = LabelString(*pred, where);
      }
      r.confidence = Field<double>(j, "confidence", where);
      raws.push_back(std::move(r));
      wheres.push_back(where);
    }
  } else {
    std::array<int, 4> col = {-1, -1, -1, -1};
    static constexpr std::array<const char*, 4> kNames = {
        "model", "sample_id", "predicted", "confidence"};
    bool have_header = false;
    while (std::getline(in, line)) {
      ++line_no;
      if (IsBlank(line)) continue;
      std::vector<std::string> fields = SplitCsv(line);
      const std::string where = Where(src, line_no);
      if (!have_header) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
          for (std::size_t k = 0; k < kNames.size(); ++k) {
            if (fields[i] == kNames[k]) col[k] = static_cast<int>(i);
          }
        }
        for (std::size_t k = 0; k < kNames.size(); ++k) {
          if (col[k] < 0) {
            throw Error(ErrorCode::kParseError,
                        "ParseError(" + where + "): header lacks column '" +
                            kNames[k] + "'");
          }
        }
        have_header = true;
        continue;
      }
      const int widest = *std::max_element(col.begin(), col.end());
      if (static_cast<int>(fields.size()) <= widest) {
        throw Error(ErrorCode::kParseError,
                    "ParseError(" + where + "): too few columns");
      }
      RawPrediction r;
      r.model = fields[col[0]];
      r.sample_id = fields[col[1]];
      r.predicted = fields[col[2]];
      const std::string& conf = fields[col[3]];
      auto [p, ec] =
          std::from_chars(conf.data(), conf.data() + conf.size(), r.confidence);
      if (ec != std::errc() || p != conf.data() + conf.size()) {
        throw Error(ErrorCode::kParseError,
                    "ParseError(" + where + "): bad confidence '" + conf + "'");
      }
      raws.push_back(std::move(r));
      wheres.push_back(where);
    }
  }
  if (raws.empty()) {
    throw Error(ErrorCode::kParseError,
                "ParseError(" + src + "): no prediction records");
  }
  return GroupRuns(raws, wheres, corpus);
}

void SavePredictions(const std::vector<ModelRun>& runs, const Corpus& corpus,
                     const std::filesystem::path& path,
                     PredictionFormat format) {
  std::ofstream out = OpenOut(path);
  const auto& vocab = corpus.label_vocab();
  if (format == PredictionFormat::kCsv) {
    out << "model,sample_id,predicted,confidence\n";
  }
  for (const ModelRun& run : runs) {
    for (const auto& [id, r] : run.records()) {
      if (format == PredictionFormat::kJsonl) {
        out << json{{"model", run.model_id()},
                    {"sample_id", id},
                    {"predicted", vocab[r.predicted_label]},
                    {"confidence", r.confidence}}
                   .dump()
            << '\n';
      } else {
        out << CsvQuote(run.model_id()) << ',' << CsvQuote(id) << ','
            << CsvQuote(vocab[r.predicted_label]) << ','
            << FormatDouble(r.confidence) << '\n';
      }
    }
  }
}

EmbeddingFormat EmbeddingFormatFor(const std::filesystem::path& path) {
  return path.extension() == ".bin" ? EmbeddingFormat::kBinary
                                    : EmbeddingFormat::kJsonl;
}

EmbeddingFile LoadEmbeddings(const std::filesystem::path& path,
                             EmbeddingFormat format) {
  return format == EmbeddingFormat::kBinary ? LoadBinaryEmbeddings(path)
                                            : LoadJsonlEmbeddings(path);
}

void SaveEmbeddings(const EmbeddingFile& emb, const std::filesystem::path& path,
                    EmbeddingFormat format) {
  for (const auto& [id, vec] : emb.entries) {
    if (vec.size() != emb.dim) {
      throw Error(ErrorCode::kDimMismatch,
                  "entry '" + id + "' does not match dim " +
                      std::to_string(emb.dim));
    }
  }
  if (format == EmbeddingFormat::kJsonl) {
    std::ofstream out = OpenOut(path);
    out << json{{"dim", emb.dim}}.dump() << '\n';
    for (const auto& [id, vec] : emb.entries) {
      out << json{{"sample_id", id}, {"vector", vec}}.dump() << '\n';
    }
    return;
  }
  std::ofstream out = OpenOut(path, true);
  out.write("EMB1", 4);
  PutU32(out, static_cast<std::uint32_t>(emb.dim));
  for (const auto& [id, vec] : emb.entries) {
    if (id.size() > 0xffff) {
      throw Error(ErrorCode::kRangeError, "sample id too long for EMB1");
    }
    PutU16(out, static_cast<std::uint16_t>(id.size()));
    out.write(id.data(), static_cast<std::streamsize>(id.size()));
    for (double v : vec) {
      PutU32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    }
  }
}

std::optional<EmbeddingFile> EmbeddingsFromCorpus(const Corpus& corpus) {
  if (!corpus.dim()) return std::nullopt;
  EmbeddingFile emb;
  emb.dim = *corpus.dim();
  for (const Sample& s : corpus.samples()) {
    if (!s.vector) return std::nullopt;
    emb.entries.emplace(s.id, *s.vector);
  }
  return emb;
}

EmbeddingFile FallbackFeaturize(const Corpus& corpus, std::size_t dim,
                                std::uint64_t seed) {
  if (dim < 2) {
    throw Error(ErrorCode::kConfigError, "featurizer dim must be at least 2");
  }
  EmbeddingFile emb;
  emb.dim = dim;
  const std::uint64_t basis = kFnvOffsetBasis ^ seed;
  for (const Sample& s : corpus.samples()) {
    std::vector<double> vec(dim, 0.0);
    std::istringstream words(s.text);
    std::string token;
    while (words >> token) {
      for (char& c : token) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      }
      const std::uint64_t h = Fnv1a64(token, basis);
      vec[h % dim] += ((h >> 32) % 2 == 0) ? 1.0 : -1.0;
    }
    double norm = 0.0;
    for (double v : vec) norm += v * v;
    if (norm > 0.0) {
      norm = std::sqrt(norm);
      for (double& v : vec) v /= norm;
    }
    emb.entries.emplace(s.id, std::move(vec));
  }
  return emb;
}

HoldoutMask LoadHoldout(const std::filesystem::path& path,
                        const Corpus& corpus) {
  std::ifstream in = OpenIn(path);
  HoldoutMask mask;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (IsBlank(line)) continue;
    const auto first = line.find_first_not_of(" \t\r");
    const auto last = line.find_last_not_of(" \t\r");
    std::string id = line.substr(first, last - first + 1);
    const Sample* s = corpus.Find(id);
    if (!s || s->partition != Partition::kTest) {
      throw Error(ErrorCode::kParseError,
                  "ParseError(" + Where(path.string(), line_no) +
                      "): holdout id '" + id + "' is not a test sample");
    }
    mask.sample_ids.insert(std::move(id));
  }
  return mask;
}

HoldoutMask StratifiedHoldout(const Corpus& corpus, double fraction,
                              std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction < 1.0)) {
    throw Error(ErrorCode::kConfigError, "holdout fraction must be in [0,1)");
  }
  std::map<LabelId, std::vector<std::string>> by_label;
  for (const std::string& id : corpus.Ids(Partition::kTest)) {
    by_label[corpus.At(id).gold_label].push_back(id);
  }
  HoldoutMask mask;
  for (auto& [label, ids] : by_label) {
    Rng rng(DeriveSeed(seed, 0x484f4c44ULL + static_cast<std::uint64_t>(label)));
    Shuffle(std::span<std::string>(ids), rng);
    const auto take = static_cast<std::size_t>(
        std::llround(fraction * static_cast<double>(ids.size())));
    for (std::size_t i = 0; i < take && i < ids.size(); ++i) {
      mask.sample_ids.insert(ids[i]);
    }
  }
  return mask;
}

}  // namespace eql
