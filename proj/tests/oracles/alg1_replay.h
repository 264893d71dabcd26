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

#ifndef EQL_TESTS_ORACLES_ALG1_REPLAY_H_
#define EQL_TESTS_ORACLES_ALG1_REPLAY_H_

// Serial step-through of the within-test bias: one iteration at a time,
// from the public subset, learner and fitting primitives.

#include <map>
#include <string>

#include "eql/difficulty.h"
#include "eql/ingest.h"

namespace eql::oracle {

struct Alg1Replay {
  std::map<std::string, int> evaluated;  // E
  std::map<std::string, int> correct;    // C
  std::map<std::string, double> b;       // C/E where E > 0
  int skipped = 0;
};

Alg1Replay ReplayWithinTest(const Corpus& corpus, const EmbeddingFile& emb,
                            const HoldoutMask& holdout, int m, std::size_t t,
                            std::uint64_t seed);

}  // namespace eql::oracle

#endif  // EQL_TESTS_ORACLES_ALG1_REPLAY_H_
