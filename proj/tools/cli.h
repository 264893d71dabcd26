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

#ifndef EQL_TOOLS_CLI_H_
#define EQL_TOOLS_CLI_H_

#include <ostream>

namespace eql {

// Runs the `eql` command line. Exit codes: 0 ok, 1 usage or configuration,
// 2 data error, 3 runtime or environment failure.
int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err);

}  // namespace eql

#endif  // EQL_TOOLS_CLI_H_
