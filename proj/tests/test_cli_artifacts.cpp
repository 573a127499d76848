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
#include "bdfrelay/cli.hpp"
#include "bdfrelay/plot.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <sstream>

using namespace bdfrelay;
namespace fs = std::filesystem;

namespace
{
    struct Cli
    {
        int rc = 0;
        std::string out, err;
    };

    Cli cli(std::vector<std::string> args)
    {
        std::vector<const char *> argv{"bdfrelay"};
        for (const std::string &a : args)
            argv.push_back(a.c_str());
        std::ostringstream out, err;
        Cli r;
        r.rc = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
        r.out = out.str();
        r.err = err.str();
        return r;
    }

    class CliTest : public ::testing::Test
    {
    protected:
        void SetUp() override
        {
            dir = fs::temp_directory_path() /
                  ("bdfrelay_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
            fs::remove_all(dir);
            fs::create_directories(dir);
            write_file(path("small.json"), R"({
              "phy": {"power_mode": "threshold"},
              "learning": {"step_constants": [1, 0.01, 1]},
              "run": {"frames": 1500, "trace_interval": 500},
              "sweep": {"axis": "snr", "values": [10, 15], "policies": ["learned", "B4"]}
            })");
            write_file(path("tiny.json"), R"({
              "network": {"relays": 2, "tx_antennas": 1, "rx_antennas": 2, "buffer_size": 2},
              "phy": {"packet_bits": 10000, "power_mode": "grid", "levels_src": [0, 1, 2, 4], "levels_relay": [0, 1, 2, 4]},
              "traffic": {"arrival": "bernoulli", "rate_pps": 160},
              "constraints": {"snr_db": null, "src_power": 2, "relay_power": 2, "drop_rate": 0.5},
              "csi": {"model": "discrete"},
              "oracle": {"train_frames": 5000}
            })");
        }
        void TearDown() override { fs::remove_all(dir); }
        std::string path(const std::string &f) const { return (dir / f).string(); }

        fs::path dir;
    };

    RunSummary sample_summary()
    {
        RunSummary s;
        s.policy = "learned";
        s.axis_value = 10.0;
        s.seed = 3;
        s.frames = 1000;
        s.avg_delay_frames = 2.5;
        s.throughput_pps = 0.1;
        s.drop_rate = 0.0;
        s.avg_power_src = 9.75;
        s.avg_power_relay_mean = 1.0 / 3.0;
        s.converged = false;
        return s;
    }
} // namespace

TEST(Artifacts, NumberFormatting)
{
    EXPECT_EQ(format_number(0.1), "0.10000000000000001");
    EXPECT_EQ(format_number(2.0), "2");
    EXPECT_EQ(format_number(-1e-300), "-1e-300");
    EXPECT_THROW(format_number(NAN), ArtifactError);
    EXPECT_THROW(format_number(INFINITY), ArtifactError);
}

TEST(Artifacts, SummaryColumnsAndRoundTrip)
{
    const std::string csv = summary_csv({sample_summary()});
    EXPECT_EQ(csv.substr(0, csv.find('\n')),
              "policy,axis_value,seed,frames,avg_delay_frames,throughput_pps,drop_rate,avg_power_src,"
              "avg_power_relay_mean,converged");
    const CsvTable t = parse_csv(csv);
    ASSERT_EQ(t.rows.size(), 1u);
    EXPECT_EQ(t.header, summary_columns());
    EXPECT_EQ(t.rows[0][t.column("policy")], "learned");
    EXPECT_EQ(t.number(0, "avg_power_relay_mean"), 1.0 / 3.0);
    EXPECT_EQ(t.number(0, "throughput_pps"), 0.1);
    EXPECT_EQ(t.rows[0][t.column("converged")], "false");
    EXPECT_THROW(t.column("delay"), ArtifactError);
    EXPECT_THROW(t.number(0, "policy"), ArtifactError);

    RunSummary bad = sample_summary();
    bad.avg_delay_frames = NAN;
    EXPECT_THROW(summary_csv({bad}), ArtifactError);
}

TEST(Artifacts, CsvQuotingAndErrors)
{
    RunSummary s = sample_summary();
    s.policy = "odd,\"name\"";
    const CsvTable t = parse_csv(summary_csv({s}));
    EXPECT_EQ(t.rows[0][0], "odd,\"name\"");
    EXPECT_THROW(parse_csv(""), ArtifactError);
    EXPECT_THROW(parse_csv("a,b\n1\n"), ArtifactError);
    EXPECT_THROW(parse_csv("a\n\"open\n"), ArtifactError);
    EXPECT_EQ(parse_csv("a,b\r\n1,2").rows.size(), 1u);
}

TEST(Artifacts, TraceLayout)
{
    TraceRow r{100, 1, 3, 2.5, LagrangeMultipliers::uniform(2, 0.5)};
    const std::string csv = trace_csv({r}, 2);
    EXPECT_EQ(csv, "t,node,q,value,gamma_sd,gamma_sp,gamma_r0,gamma_r1\n100,1,3,2.5,0.5,0.5,0.5,0.5\n");
    EXPECT_THROW(trace_csv({r}, 3), ArtifactError);

    SweepCell a, b;
    a.axis_value = 2;
    a.seed = 1;
    a.trace = {r};
    b.axis_value = 3;
    b.seed = 1;
    b.trace = {TraceRow{0, 0, 1, 1.0, LagrangeMultipliers::uniform(3, 1.0)}};
    const CsvTable t = parse_csv(sweep_trace_csv({a, b}, 3));
    ASSERT_EQ(t.rows.size(), 2u);
    EXPECT_EQ(t.rows[0][t.column("gamma_r2")], "");
    EXPECT_EQ(t.rows[1][t.column("gamma_r2")], "1");
}

TEST(Artifacts, ManifestRoundTrip)
{
    const fs::path d = fs::temp_directory_path() / "bdfrelay_manifest_test";
    fs::remove_all(d);
    write_manifest(d.string(), "run", {"config.json", "summary.csv"});
    const Manifest m = read_manifest(d.string());
    EXPECT_EQ(m.schema_version, artifact_schema_version);
    EXPECT_EQ(m.kind, "run");
    EXPECT_EQ(m.files, (std::vector<std::string>{"config.json", "summary.csv"}));
    write_file((d / "artifact.json").string(), R"({"schema_version": 9, "kind": "run", "files": []})");
    EXPECT_THROW(read_manifest(d.string()), ArtifactError);
    write_file((d / "artifact.json").string(), "{");
    EXPECT_THROW(read_manifest(d.string()), ArtifactError);
    fs::remove_all(d);
    EXPECT_THROW(read_manifest(d.string()), ArtifactError);
}

TEST(Plot, SvgIsDeterministicAndEscaped)
{
    PlotSpec spec{"delay <ms>", "x", "y", {Series{"B&4", {1, 2, 3}, {3, 1, 2}}, Series{"learned", {1, 3}, {0.5, 0.7}}}};
    const std::string a = line_plot_svg(spec), b = line_plot_svg(spec);
    EXPECT_EQ(a, b);
    EXPECT_EQ(a.rfind("<svg", 0), 0u);
    EXPECT_NE(a.find("delay &lt;ms&gt;"), std::string::npos);
    EXPECT_NE(a.find("B&amp;4"), std::string::npos);
    EXPECT_NE(a.find("</svg>"), std::string::npos);
    EXPECT_NO_THROW(line_plot_svg(PlotSpec{"empty", "x", "y", {}}));

    spec.series[0].y.pop_back();
    EXPECT_THROW(line_plot_svg(spec), std::invalid_argument);
    spec.series[0].y.push_back(NAN);
    EXPECT_THROW(line_plot_svg(spec), ArtifactError);
}

TEST(Plot, SweepFigureSet)
{
    AggregateRow r;
    r.policy = "learned";
    r.axis_value = 10;
    const CsvTable agg = parse_csv(aggregate_csv({r}));
    const auto snr = sweep_plots(agg, "snr");
    ASSERT_EQ(snr.size(), 2u);
    EXPECT_EQ(snr[0].first, "delay_vs_snr.svg");
    EXPECT_EQ(snr[1].first, "throughput_vs_snr.svg");
    EXPECT_EQ(sweep_plots(agg, "M").front().first, "delay_vs_M.svg");
    EXPECT_EQ(sweep_plots(agg, "N_R").front().first, "delay_vs_NR.svg");
    EXPECT_THROW(sweep_plots(agg, "frames"), std::invalid_argument);
}

TEST_F(CliTest, UsageErrorsExitTwo)
{
    EXPECT_EQ(cli({}).rc, exit_usage);
    EXPECT_EQ(cli({"fly"}).rc, exit_usage);
    EXPECT_EQ(cli({"run"}).rc, exit_usage);
    EXPECT_EQ(cli({"run", "--config", path("missing.json")}).rc, exit_usage);
    EXPECT_EQ(cli({"run", "--config", path("small.json"), "--frames", "ten"}).rc, exit_usage);
    EXPECT_EQ(cli({"run", "--config", path("small.json"), "--policy", "B1,B2"}).rc, exit_usage);
    EXPECT_EQ(cli({"run", "--config", path("small.json"), "--policy", "B8", "--out-dir", path("o")}).rc, exit_usage);
    EXPECT_EQ(cli({"sweep", "--config", path("small.json"), "--axis", "colour"}).rc, exit_usage);
    write_file(path("bad.json"), R"({"network": {"relays": 1}})");
    const Cli bad = cli({"validate", "--config", path("bad.json")});
    EXPECT_EQ(bad.rc, exit_usage);
    EXPECT_NE(bad.err.find("network.relays"), std::string::npos);
    EXPECT_EQ(cli({"--help"}).rc, exit_ok);
}

TEST_F(CliTest, ValidateAndRun)
{
    EXPECT_EQ(cli({"validate", "--config", path("small.json")}).rc, exit_ok);
    const std::string out = path("run");
    const Cli r = cli({"run", "--config", path("small.json"), "--trace", "--seed", "4", "--out-dir", out});
    ASSERT_EQ(r.rc, exit_ok) << r.err;
    for (const char *f : {"config.json", "summary.csv", "trace.csv", "artifact.json", "value_vs_time.svg"})
        EXPECT_TRUE(fs::exists(fs::path(out) / f)) << f;
    const CsvTable s = read_csv(out + "/summary.csv");
    ASSERT_EQ(s.rows.size(), 1u);
    EXPECT_EQ(s.rows[0][s.column("seed")], "4");
    EXPECT_EQ(s.rows[0][s.column("frames")], "1500");
    EXPECT_EQ(parse_config(read_file(out + "/config.json")).seed, 4u);
    EXPECT_EQ(read_manifest(out).kind, "run");

    fs::remove(fs::path(out) / "value_vs_time.svg");
    EXPECT_EQ(cli({"plot", "--out-dir", out}).rc, exit_ok);
    EXPECT_TRUE(fs::exists(fs::path(out) / "value_vs_time.svg"));
    EXPECT_EQ(cli({"plot", "--out-dir", path("nowhere")}).rc, exit_runtime);
}

TEST_F(CliTest, SweepWritesTablesAndPlots)
{
    const std::string out = path("sweep");
    const Cli r = cli({"sweep", "--config", path("small.json"), "--out-dir", out});
    ASSERT_EQ(r.rc, exit_ok) << r.err;
    EXPECT_EQ(read_csv(out + "/summary.csv").rows.size(), 4u);
    EXPECT_EQ(read_csv(out + "/aggregate.csv").rows.size(), 4u);
    EXPECT_TRUE(fs::exists(fs::path(out) / "delay_vs_snr.svg"));
    EXPECT_TRUE(fs::exists(fs::path(out) / "throughput_vs_snr.svg"));
    EXPECT_FALSE(fs::exists(fs::path(out) / "failures.csv"));

    const Cli m = cli({"sweep", "--config", path("small.json"), "--axis", "M", "--values", "2,3", "--policy",
                       "B1", "--out-dir", path("sweep_m")});
    ASSERT_EQ(m.rc, exit_ok) << m.err;
    EXPECT_TRUE(fs::exists(dir / "sweep_m" / "delay_vs_M.svg"));
    const CsvTable t = read_csv(path("sweep_m/summary.csv"));
    ASSERT_EQ(t.rows.size(), 2u);
    EXPECT_EQ(t.rows[1][t.column("axis_value")], "3");
}

TEST_F(CliTest, SweepFailuresAreListed)
{
    write_file(path("lossy.json"), R"({
      "policy": {"name": "B4"},
      "traffic": {"arrival": "bernoulli", "rate_pps": 200},
      "run": {"frames": 40, "burn_in": 0.5},
      "network": {"buffer_size": 4},
      "sweep": {"axis": "N_b", "values": [25000, 1e12], "policies": ["B4"]}
    })");
    const Cli r = cli({"sweep", "--config", path("lossy.json"), "--out-dir", path("lossy")});
    EXPECT_EQ(r.rc, exit_ok);
    EXPECT_NE(r.err.find("sweep cell failed"), std::string::npos);
    const CsvTable f = read_csv(path("lossy/failures.csv"));
    ASSERT_EQ(f.rows.size(), 1u);
    EXPECT_EQ(f.rows[0][f.column("axis_value")], "1000000000000");

    const Cli all = cli({"sweep", "--config", path("lossy.json"), "--values", "1e12", "--out-dir", path("lossy2")});
    EXPECT_EQ(all.rc, exit_runtime);
}

TEST_F(CliTest, OracleCommand)
{
    const std::string out = path("oracle");
    const Cli r = cli({"oracle", "--config", path("tiny.json"), "--frames", "4000", "--out-dir", out});
    ASSERT_EQ(r.rc, exit_ok) << r.err;
    EXPECT_NE(r.out.find("states=27"), std::string::npos);
    EXPECT_TRUE(fs::exists(fs::path(out) / "oracle.json"));
    EXPECT_EQ(read_csv(out + "/residuals.csv").rows.size(), 6u);
    EXPECT_EQ(parse_config(read_file(out + "/config.json")).oracle_train_frames, 4000u);

    write_file(path("huge.json"), R"({"network": {"relays": 4, "buffer_size": 10}, "phy": {"levels_src": [0, 1], "levels_relay": [0, 1]},
                                         "oracle": {"state_cap": 10000}})");
    const Cli big = cli({"oracle", "--config", path("huge.json"), "--out-dir", path("huge")});
    EXPECT_EQ(big.rc, exit_usage);
    EXPECT_NE(big.err.find("161051"), std::string::npos);
}
