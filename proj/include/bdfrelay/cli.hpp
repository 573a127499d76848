// SPDX-License-Identifier: Apache-2.0
//
// bdfrelay: delay-aware control for buffered two-hop MIMO relay networks
// Copyright (C) 2026 The bdfrelay Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#ifndef BDFRELAY_CLI_HPP
#define BDFRELAY_CLI_HPP

#include <iosfwd>

namespace bdfrelay
{
    inline constexpr int exit_ok = 0;
    inline constexpr int exit_runtime = 1;
    inline constexpr int exit_usage = 2;

    /// Entry point of the `bdfrelay` command: run, sweep, oracle, validate, plot.
    int cli_main(int argc, const char *const *argv, std::ostream &out, std::ostream &err);

} // namespace bdfrelay

#endif
