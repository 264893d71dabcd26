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

// Acceptance report: one PASS/FAIL line per criterion, nonzero exit on any
// failure.

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "cli.h"
#include "support/criteria.h"
#include "support/fixtures.h"

namespace {

using eql::criteria::Outcome;
namespace fs = std::filesystem;

int RunCliQuiet(const std::vector<std::string>& args) {
  std::vector<const char*> argv = {"eql"};
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  return eql::RunCli(static_cast<int>(argv.size()), argv.data(), out, err);
}

Outcome ManifestReruns() {
  Outcome out;
  eql::testing::TempDir dir;
  eql::testing::CorpusShape shape;
  shape.test = 80;
  eql::testing::WriteSessionFiles(dir / "in", 2718, shape, 5);
  const nlohmann::json manifest = {{"corpus", "in/corpus.jsonl"},
                                   {"predictions", "in/predictions.jsonl"},
                                   {"seed", 17},
                                   {"method", "wsbias1"},
                                   {"params", {{"m", 8}}},
                                   {"split", {{"n", 5}}},
                                   {"scheme", {{"case", 4}}}};
  eql::testing::WriteFile(dir / "manifest.json", manifest.dump(2));
  const std::string m = (dir / "manifest.json").string();
  for (const char* run : {"a", "b"}) {
    const int code = RunCliQuiet({"export", "--manifest", m, "--out", (dir / run).string()});
    if (code != 0) out.Fail(std::string("export exited ") + std::to_string(code));
  }
  std::size_t files = 0;
  for (const auto& entry : fs::directory_iterator(dir / "a")) {
    const fs::path other = dir / "b" / entry.path().filename();
    ++files;
    if (!fs::exists(other) ||
        eql::testing::ReadFile(entry.path()) != eql::testing::ReadFile(other)) {
      out.Fail(entry.path().filename().string() + " differs between runs");
    }
  }
  if (files == 0) out.Fail("export wrote nothing");
  if (out.pass) out.detail = std::to_string(files) + " byte-identical output files";
  return out;
}

Outcome RoundTrips() {
  Outcome formats = eql::criteria::FileRoundTrips(31337);
  const Outcome reruns = ManifestReruns();
  if (!reruns.pass) formats.Fail(reruns.detail);
  if (formats.pass) formats.detail += "; manifest re-run: " + reruns.detail;
  return formats;
}

Outcome Both(const Outcome& a, const Outcome& b) {
  Outcome o = a;
  if (!b.pass) o.Fail(b.detail);
  if (o.pass) o.detail = a.detail + "; " + b.detail;
  return o;
}

}  // namespace

int main() {
  namespace c = eql::criteria;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> checks = {
      {"baseline equivalence", [] { return c::BaselineEquivalence(1, 50); }},
      {"oracle equivalence", [] { return c::OracleEquivalence(2, 200); }},
      {"scale/argmax invariance", [] { return c::ScaleInvariance(3, 100); }},
      {"monotonicity", [] { return c::Monotonicity(4, 100); }},
      {"across-bias range and within-bias determinism",
       [] { return Both(c::AcrossBiasRange(5, 12), c::WithinBiasDeterminism(6)); }},
      {"learner suite", [] { return c::LearnerSuite(7); }},
      {"WOOD properties", [] { return c::WoodProperties(8, 20); }},
      {"lower accuracy, higher weighted score", [] { return c::IntroScenario(); }},
      {"round-trips", [] { return RoundTrips(); }},
  };
  int failed = 0;
  for (const auto& [name, check] : checks) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o.Fail(std::string("threw: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %s (%.2fs): %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), secs,
                o.detail.c_str());
    failed += o.pass ? 0 : 1;
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(checks.size()) - failed,
              checks.size());
  return failed == 0 ? 0 : 1;
}
