// Copyright 2026 the mlog authors
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

#ifndef MLOG_CLI_HPP
#define MLOG_CLI_HPP

#include <iosfwd>

namespace mlog::cli {

// Exit codes: 0 success, 1 validation/data error, 2 usage error, 3 I/O
// error. Machine-readable output goes to `out`, diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out,
        std::ostream& err);

}  // namespace mlog::cli

#endif  // MLOG_CLI_HPP
