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

#ifndef BDFRELAY_ARTIFACTS_HPP
#define BDFRELAY_ARTIFACTS_HPP

/*
Run artifacts on disk. An output directory holds

  config.json     the resolved configuration
  summary.csv     one row per run
  aggregate.csv   sweep means and standard errors (sweeps only)
  trace.csv       learning trace (optional)
  oracle.json     oracle comparison report (oracle only)
  residuals.csv   Bellman residual table (oracle only)
  artifact.json   manifest with schema_version and the file list
  *.svg           plots

Numbers are written with 17 significant digits; a NaN or Inf anywhere
aborts the write.
*/

#include "bdfrelay/config.hpp"
#include "bdfrelay/simulation.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace bdfrelay
{
    inline constexpr int artifact_schema_version = 1;

    class ArtifactError : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    /// "%.17g"; throws ArtifactError for NaN and Inf.
    std::string format_number(double x);

    /// policy, axis_value, seed, frames, avg_delay_frames, throughput_pps,
    /// drop_rate, avg_power_src, avg_power_relay_mean, converged
    const std::vector<std::string> &summary_columns();

    std::string summary_csv(const std::vector<RunSummary> &rows);
    std::string aggregate_csv(const std::vector<AggregateRow> &rows);
    /// Columns t, node, q, value, gamma_sd, gamma_sp, gamma_r0..gamma_r{M-1}.
    std::string trace_csv(const std::vector<TraceRow> &rows, std::size_t relays);
    /// Trace rows of several runs, prefixed by axis_value and seed.
    std::string sweep_trace_csv(const std::vector<SweepCell> &cells, std::size_t relays);
    std::string oracle_json(const OracleReport &report);
    std::string residuals_csv(const BellmanResidual &residual);

    struct CsvTable
    {
        std::vector<std::string> header;
        std::vector<std::vector<std::string>> rows;

        std::size_t column(const std::string &name) const; ///< throws if absent
        double number(std::size_t row, const std::string &name) const;
    };

    CsvTable parse_csv(const std::string &text);
    CsvTable read_csv(const std::string &path);

    void write_file(const std::string &path, const std::string &content);
    std::string read_file(const std::string &path);

    /// Writes artifact.json listing `files`, all relative to `dir`.
    void write_manifest(const std::string &dir, const std::string &kind, const std::vector<std::string> &files);

    struct Manifest
    {
        int schema_version = 0;
        std::string kind;
        std::vector<std::string> files;
    };

    Manifest read_manifest(const std::string &dir);

} // namespace bdfrelay

#endif
