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

#include "bdfrelay/artifacts.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace bdfrelay
{
    std::string format_number(double x)
    {
        if (!std::isfinite(x))
            throw ArtifactError("refusing to write a non-finite number");
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", x);
        return buf;
    }

    const std::vector<std::string> &summary_columns()
    {
        static const std::vector<std::string> cols{"policy",         "axis_value",    "seed",
                                                   "frames",         "avg_delay_frames", "throughput_pps",
                                                   "drop_rate",      "avg_power_src", "avg_power_relay_mean",
                                                   "converged"};
        return cols;
    }

    namespace
    {
        void join(std::ostringstream &os, const std::vector<std::string> &cells)
        {
            for (std::size_t i = 0; i < cells.size(); ++i)
                os << (i ? "," : "") << cells[i];
            os << "\n";
        }

        std::string quote(const std::string &s)
        {
            if (s.find_first_of(",\"\n") == std::string::npos)
                return s;
            std::string out = "\"";
            for (char c : s)
                out += c == '"' ? std::string("\"\"") : std::string(1, c);
            return out + "\"";
        }
    } // namespace

    std::string summary_csv(const std::vector<RunSummary> &rows)
    {
        std::ostringstream os;
        join(os, summary_columns());
        for (const RunSummary &r : rows)
            join(os, {quote(r.policy), format_number(r.axis_value), std::to_string(r.seed), std::to_string(r.frames),
                      format_number(r.avg_delay_frames), format_number(r.throughput_pps), format_number(r.drop_rate),
                      format_number(r.avg_power_src), format_number(r.avg_power_relay_mean),
                      r.converged ? "true" : "false"});
        return os.str();
    }

    std::string aggregate_csv(const std::vector<AggregateRow> &rows)
    {
        std::ostringstream os;
        join(os, {"policy", "axis_value", "runs", "failed", "avg_delay_frames_mean", "avg_delay_frames_se",
                  "throughput_pps_mean", "throughput_pps_se", "drop_rate_mean", "drop_rate_se", "avg_power_src_mean",
                  "avg_power_relay_mean", "converged_fraction"});
        for (const AggregateRow &r : rows)
            join(os, {quote(r.policy), format_number(r.axis_value), std::to_string(r.runs), std::to_string(r.failed),
                      format_number(r.delay_mean), format_number(r.delay_se), format_number(r.throughput_mean),
                      format_number(r.throughput_se), format_number(r.drop_mean), format_number(r.drop_se),
                      format_number(r.power_src_mean), format_number(r.power_relay_mean),
                      format_number(r.converged_fraction)});
        return os.str();
    }

    namespace
    {
        std::vector<std::string> trace_header(std::size_t relays)
        {
            std::vector<std::string> h{"t", "node", "q", "value", "gamma_sd", "gamma_sp"};
            for (std::size_t m = 0; m < relays; ++m)
                h.push_back("gamma_r" + std::to_string(m));
            return h;
        }

        std::vector<std::string> trace_cells(const TraceRow &r, std::size_t relays)
        {
            if (r.lm.gamma_rp.size() != relays)
                throw ArtifactError("trace row has the wrong number of relay multipliers");
            std::vector<std::string> c{std::to_string(r.t), std::to_string(r.node), std::to_string(r.q),
                                       format_number(r.value), format_number(r.lm.gamma_sd),
                                       format_number(r.lm.gamma_sp)};
            for (double g : r.lm.gamma_rp)
                c.push_back(format_number(g));
            return c;
        }
    } // namespace

    std::string trace_csv(const std::vector<TraceRow> &rows, std::size_t relays)
    {
        std::ostringstream os;
        join(os, trace_header(relays));
        for (const TraceRow &r : rows)
            join(os, trace_cells(r, relays));
        return os.str();
    }

    std::string sweep_trace_csv(const std::vector<SweepCell> &cells, std::size_t relays)
    {
        std::ostringstream os;
        std::vector<std::string> h{"axis_value", "seed"};
        for (auto &c : trace_header(relays))
            h.push_back(c);
        join(os, h);
        for (const SweepCell &cell : cells)
        {
            if (cell.trace.empty())
                continue;
            const std::size_t m = cell.trace.front().lm.gamma_rp.size();
            for (const TraceRow &r : cell.trace)
            {
                std::vector<std::string> row{format_number(cell.axis_value), std::to_string(cell.seed)};
                for (auto &c : trace_cells(r, m))
                    row.push_back(c);
                // Runs with fewer relays leave the trailing columns empty.
                row.resize(h.size());
                join(os, row);
            }
        }
        return os.str();
    }

    std::string oracle_json(const OracleReport &r)
    {
        using json = nlohmann::ordered_json;
        auto num = [](double x) {
            format_number(x);
            return x;
        };
        json lm = {{"gamma_sd", num(r.lm.gamma_sd)}, {"gamma_sp", num(r.lm.gamma_sp)}, {"gamma_r", json::array()}};
        for (double g : r.lm.gamma_rp)
            lm["gamma_r"].push_back(num(g));
        auto eval = [&](const PolicyEvaluation &e) {
            json relay = json::array();
            for (double p : e.avg_power_relay)
                relay.push_back(num(p));
            return json{{"avg_cost", num(e.avg_cost)},           {"avg_occupancy", num(e.avg_occupancy)},
                        {"avg_delay_frames", num(e.avg_delay)}, {"drop_rate", num(e.drop_rate)},
                        {"avg_power_src", num(e.avg_power_src)}, {"avg_power_relay", relay}};
        };
        json j = {{"schema_version", artifact_schema_version},
                  {"states", r.states},
                  {"csi_states", r.csi_states},
                  {"actions", r.actions},
                  {"multipliers", lm},
                  {"theta", num(r.theta)},
                  {"learned_cost", num(r.learned_cost)},
                  {"gap", num(r.gap)},
                  {"max_residual", num(r.residual.max_residual)},
                  {"residual_offset", num(r.residual.offset)},
                  {"rvi_iterations", r.rvi_iterations},
                  {"rvi_span", num(r.rvi_span)},
                  {"learned", eval(r.learned)},
                  {"optimal", eval(r.optimal)},
                  {"training",
                   {{"frames", r.training.frames},
                    {"converged", r.training.converged},
                    {"value_delta", num(r.training.value_delta)},
                    {"lm_slack", num(r.training.lm_slack)}}},
                  {"replay",
                   {{"frames", r.replay.frames},
                    {"measured_frames", r.replay.measured_frames},
                    {"avg_cost", num(r.replay.avg_cost)},
                    {"cost_stderr", num(r.replay.cost_stderr)},
                    {"drop_rate", num(r.replay.drop_rate)},
                    {"packet_loss_rate", num(r.replay.packet_loss_rate)}}}};
        return j.dump(2) + "\n";
    }

    std::string residuals_csv(const BellmanResidual &res)
    {
        std::ostringstream os;
        join(os, {"node", "q", "residual"});
        for (std::size_t i = 0; i < res.residuals.size(); ++i)
            join(os, {std::to_string(res.nodes[i]), std::to_string(res.levels[i]), format_number(res.residuals[i])});
        return os.str();
    }

    std::size_t CsvTable::column(const std::string &name) const
    {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name)
                return i;
        throw ArtifactError("CSV has no column '" + name + "'");
    }

    double CsvTable::number(std::size_t row, const std::string &name) const
    {
        const std::string &cell = rows.at(row).at(column(name));
        try
        {
            std::size_t used = 0;
            const double x = std::stod(cell, &used);
            if (used != cell.size())
                throw std::invalid_argument(cell);
            return x;
        }
        catch (const std::exception &)
        {
            throw ArtifactError("CSV cell '" + cell + "' in column '" + name + "' is not a number");
        }
    }

    CsvTable parse_csv(const std::string &text)
    {
        std::vector<std::vector<std::string>> lines;
        std::vector<std::string> row;
        std::string cell;
        bool quoted = false, any = false;
        for (std::size_t i = 0; i < text.size(); ++i)
        {
            const char c = text[i];
            any = true;
            if (quoted)
            {
                if (c == '"' && i + 1 < text.size() && text[i + 1] == '"')
                {
                    cell += '"';
                    ++i;
                }
                else if (c == '"')
                    quoted = false;
                else
                    cell += c;
            }
            else if (c == '"')
                quoted = true;
            else if (c == ',')
            {
                row.push_back(std::move(cell));
                cell.clear();
            }
            else if (c == '\n')
            {
                row.push_back(std::move(cell));
                cell.clear();
                lines.push_back(std::move(row));
                row.clear();
                any = false;
            }
            else if (c != '\r')
                cell += c;
        }
        if (quoted)
            throw ArtifactError("CSV ends inside a quoted field");
        if (any)
        {
            row.push_back(std::move(cell));
            lines.push_back(std::move(row));
        }
        if (lines.empty())
            throw ArtifactError("CSV is empty");
        CsvTable t;
        t.header = std::move(lines.front());
        for (std::size_t i = 1; i < lines.size(); ++i)
        {
            if (lines[i].size() != t.header.size())
                throw ArtifactError("CSV row " + std::to_string(i) + " has " + std::to_string(lines[i].size()) +
                                    " cells, header has " + std::to_string(t.header.size()));
            t.rows.push_back(std::move(lines[i]));
        }
        return t;
    }

    CsvTable read_csv(const std::string &path) { return parse_csv(read_file(path)); }

    void write_file(const std::string &path, const std::string &content)
    {
        const std::filesystem::path p(path);
        if (p.has_parent_path())
            std::filesystem::create_directories(p.parent_path());
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        if (!out)
            throw ArtifactError("cannot open '" + path + "' for writing");
        out << content;
        if (!out)
            throw ArtifactError("write to '" + path + "' failed");
    }

    std::string read_file(const std::string &path)
    {
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw ArtifactError("cannot open '" + path + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        return ss.str();
    }

    void write_manifest(const std::string &dir, const std::string &kind, const std::vector<std::string> &files)
    {
        nlohmann::ordered_json j = {{"schema_version", artifact_schema_version}, {"kind", kind}, {"files", files}};
        write_file((std::filesystem::path(dir) / "artifact.json").string(), j.dump(2) + "\n");
    }

    Manifest read_manifest(const std::string &dir)
    {
        const std::string path = (std::filesystem::path(dir) / "artifact.json").string();
        nlohmann::json j;
        try
        {
            j = nlohmann::json::parse(read_file(path));
            Manifest m;
            m.schema_version = j.at("schema_version").get<int>();
            m.kind = j.at("kind").get<std::string>();
            m.files = j.at("files").get<std::vector<std::string>>();
            if (m.schema_version != artifact_schema_version)
                throw ArtifactError(path + ": unsupported schema_version " + std::to_string(m.schema_version));
            return m;
        }
        catch (const nlohmann::json::exception &e)
        {
            throw ArtifactError(path + ": " + e.what());
        }
    }

} // namespace bdfrelay
