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

#include "bdfrelay/cli.hpp"
#include "bdfrelay/artifacts.hpp"
#include "bdfrelay/config.hpp"
#include "bdfrelay/plot.hpp"
#include "bdfrelay/simulation.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <optional>
#include <ostream>

namespace bdfrelay
{
    namespace
    {
        namespace fs = std::filesystem;

        struct Overrides
        {
            std::string config;
            std::optional<std::uint64_t> seed;
            std::optional<std::uint64_t> frames;
            std::vector<std::string> policy;
            std::string axis;
            std::vector<double> values;
            std::string out_dir = "bdfrelay_out";
            bool trace = false;
        };

        class UsageError : public std::invalid_argument
        {
        public:
            using std::invalid_argument::invalid_argument;
        };

        ExperimentConfig resolve(const Overrides &o, bool sweep_mode)
        {
            ExperimentConfig cfg = load_config(o.config);
            if (o.seed)
                cfg.seed = *o.seed;
            if (o.frames)
                cfg.frames = *o.frames;
            if (!o.policy.empty())
            {
                if (sweep_mode)
                    cfg.sweep_policies = o.policy;
                else if (o.policy.size() == 1)
                    cfg.policy = o.policy.front();
                else
                    throw UsageError("--policy takes a single policy for this command");
            }
            if (!o.axis.empty())
                cfg.sweep_axis = o.axis;
            if (!o.values.empty())
                cfg.sweep_values = o.values;
            validate(cfg);
            return cfg;
        }

        std::string path_in(const std::string &dir, const std::string &file)
        {
            return (fs::path(dir) / file).string();
        }

        std::string fmt(double x)
        {
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.6g", x);
            return buf;
        }

        void emit_plots(const std::string &dir, const Manifest &m, std::vector<std::string> *files)
        {
            if (m.kind == "sweep")
            {
                const ExperimentConfig cfg = parse_config(read_file(path_in(dir, "config.json")));
                for (const auto &[name, svg] : sweep_plots(read_csv(path_in(dir, "aggregate.csv")), cfg.sweep_axis))
                {
                    write_file(path_in(dir, name), svg);
                    if (files)
                        files->push_back(name);
                }
            }
            if (fs::exists(path_in(dir, "trace.csv")))
            {
                const CsvTable t = read_csv(path_in(dir, "trace.csv"));
                if (!t.rows.empty())
                {
                    write_file(path_in(dir, "value_vs_time.svg"), value_trace_plot(t));
                    if (files)
                        files->push_back("value_vs_time.svg");
                }
            }
        }

        int cmd_run(const Overrides &o, std::ostream &out)
        {
            const ExperimentConfig cfg = resolve(o, false);
            EpisodeOptions eo;
            eo.record_trace = o.trace && cfg.policy == "learned";
            EpisodeResult r = run_episode(cfg, eo);
            r.summary.axis_value = axis_value_of(cfg, cfg.sweep_axis);

            std::vector<std::string> files{"config.json", "summary.csv"};
            write_file(path_in(o.out_dir, "config.json"), emit_config(cfg));
            write_file(path_in(o.out_dir, "summary.csv"), summary_csv({r.summary}));
            if (eo.record_trace)
            {
                write_file(path_in(o.out_dir, "trace.csv"), trace_csv(r.trace, cfg.dims.relays));
                files.push_back("trace.csv");
            }
            emit_plots(o.out_dir, Manifest{artifact_schema_version, "run", files}, &files);
            write_manifest(o.out_dir, "run", files);

            const RunSummary &s = r.summary;
            out << "run policy=" << s.policy << " seed=" << s.seed << " frames=" << s.frames
                << " delay_frames=" << fmt(s.avg_delay_frames) << " throughput_pps=" << fmt(s.throughput_pps)
                << " drop_rate=" << fmt(s.drop_rate) << " p_src=" << fmt(s.avg_power_src)
                << " p_relay=" << fmt(s.avg_power_relay_mean) << " converged=" << (s.converged ? "true" : "false")
                << " wall_s=" << fmt(s.wallclock_s) << " -> " << o.out_dir << "\n";
            return exit_ok;
        }

        int cmd_sweep(const Overrides &o, std::ostream &out, std::ostream &err)
        {
            const ExperimentConfig cfg = resolve(o, true);
            SweepOptions so;
            so.record_trace = o.trace;
            const SweepResult r = sweep(cfg, so);

            std::vector<RunSummary> rows;
            std::string failures = "policy,axis_value,seed,error\n";
            std::size_t failed = 0;
            for (const SweepCell &c : r.cells)
            {
                if (c.ok)
                    rows.push_back(c.summary);
                else
                {
                    ++failed;
                    std::string e = c.error;
                    for (char &ch : e)
                        if (ch == '\n' || ch == ',' || ch == '"')
                            ch = ' ';
                    failures += c.policy + "," + format_number(c.axis_value) + "," + std::to_string(c.seed) + "," + e + "\n";
                    err << "sweep cell failed: policy=" << c.policy << " axis_value=" << fmt(c.axis_value)
                        << " seed=" << c.seed << ": " << c.error << "\n";
                }
            }
            std::vector<std::string> files{"config.json", "summary.csv", "aggregate.csv"};
            write_file(path_in(o.out_dir, "config.json"), emit_config(cfg));
            write_file(path_in(o.out_dir, "summary.csv"), summary_csv(rows));
            write_file(path_in(o.out_dir, "aggregate.csv"), aggregate_csv(r.aggregate));
            if (failed)
            {
                write_file(path_in(o.out_dir, "failures.csv"), failures);
                files.push_back("failures.csv");
            }
            if (o.trace)
            {
                write_file(path_in(o.out_dir, "trace.csv"), sweep_trace_csv(r.cells, cfg.dims.relays));
                files.push_back("trace.csv");
            }
            emit_plots(o.out_dir, Manifest{artifact_schema_version, "sweep", files}, &files);
            write_manifest(o.out_dir, "sweep", files);
            out << "sweep axis=" << r.axis << " cells=" << r.cells.size() << " failed=" << failed << " -> "
                << o.out_dir << "\n";
            return failed == r.cells.size() ? exit_runtime : exit_ok;
        }

        int cmd_oracle(const Overrides &o, std::ostream &out)
        {
            ExperimentConfig cfg = resolve(o, false);
            if (o.frames)
                cfg.oracle_train_frames = *o.frames;
            const OracleReport rep = compare_with_oracle(cfg);
            write_file(path_in(o.out_dir, "config.json"), emit_config(cfg));
            write_file(path_in(o.out_dir, "oracle.json"), oracle_json(rep));
            write_file(path_in(o.out_dir, "residuals.csv"), residuals_csv(rep.residual));
            write_manifest(o.out_dir, "oracle", {"config.json", "oracle.json", "residuals.csv"});
            out << "oracle states=" << rep.states << " csi_states=" << rep.csi_states << " theta=" << fmt(rep.theta)
                << " learned_cost=" << fmt(rep.learned_cost) << " gap=" << fmt(rep.gap)
                << " replay_cost=" << fmt(rep.replay.avg_cost) << "+-" << fmt(rep.replay.cost_stderr)
                << " max_residual=" << fmt(rep.residual.max_residual) << " -> " << o.out_dir << "\n";
            return exit_ok;
        }

        int cmd_validate(const Overrides &o, std::ostream &out)
        {
            const ExperimentConfig cfg = resolve(o, false);
            if (!(parse_config(emit_config(cfg)) == cfg))
                throw std::runtime_error("configuration does not survive a save/load round trip");
            out << "ok " << o.config << " (schema_version " << config_schema_version << ")\n";
            return exit_ok;
        }

        int cmd_plot(const Overrides &o, std::ostream &out)
        {
            const Manifest m = read_manifest(o.out_dir);
            std::vector<std::string> files;
            emit_plots(o.out_dir, m, &files);
            out << "plot wrote " << files.size() << " file(s) in " << o.out_dir << "\n";
            return exit_ok;
        }
    } // namespace

    int cli_main(int argc, const char *const *argv, std::ostream &out, std::ostream &err)
    {
        CLI::App app{"Delay-aware control for buffered two-hop MIMO relay networks", "bdfrelay"};
        app.require_subcommand(1);
        Overrides o;

        auto add_common = [&](CLI::App *sub, bool need_config) {
            auto *c = sub->add_option("--config", o.config, "experiment configuration (JSON)");
            if (need_config)
                c->required();
            sub->add_option("--out-dir", o.out_dir, "directory for artifacts");
        };
        auto add_run_flags = [&](CLI::App *sub) {
            sub->add_option("--seed", o.seed, "override run.seed");
            sub->add_option("--frames", o.frames, "override run.frames");
            sub->add_option("--policy", o.policy, "learned, oracle, B1..B5")->delimiter(',');
            sub->add_flag("--trace", o.trace, "write the learning trace");
        };

        CLI::App *run = app.add_subcommand("run", "simulate one configuration");
        add_common(run, true);
        add_run_flags(run);
        CLI::App *sw = app.add_subcommand("sweep", "simulate a parameter sweep");
        add_common(sw, true);
        add_run_flags(sw);
        sw->add_option("--axis", o.axis, "snr, M, N_R or N_b");
        sw->add_option("--values", o.values, "comma-separated axis values")->delimiter(',');
        CLI::App *orc = app.add_subcommand("oracle", "compare the learned policy with the exact optimum");
        add_common(orc, true);
        orc->add_option("--seed", o.seed, "override run.seed");
        orc->add_option("--frames", o.frames, "override oracle.train_frames");
        CLI::App *val = app.add_subcommand("validate", "check a configuration file");
        add_common(val, true);
        CLI::App *plt = app.add_subcommand("plot", "re-plot an artifact directory");
        plt->add_option("--out-dir", o.out_dir, "artifact directory")->required();

        try
        {
            app.parse(argc, argv);
        }
        catch (const CLI::CallForHelp &)
        {
            out << app.help();
            return exit_ok;
        }
        catch (const CLI::CallForAllHelp &)
        {
            out << app.help("", CLI::AppFormatMode::All);
            return exit_ok;
        }
        catch (const CLI::ParseError &e)
        {
            err << "bdfrelay: " << e.what() << "\n" << app.help();
            return exit_usage;
        }

        try
        {
            if (run->parsed())
                return cmd_run(o, out);
            if (sw->parsed())
                return cmd_sweep(o, out, err);
            if (orc->parsed())
                return cmd_oracle(o, out);
            if (val->parsed())
                return cmd_validate(o, out);
            return cmd_plot(o, out);
        }
        catch (const ConfigError &e)
        {
            err << "bdfrelay: config error: " << e.what() << "\n";
            return exit_usage;
        }
        catch (const StateSpaceTooLarge &e)
        {
            err << "bdfrelay: " << e.what() << "\n";
            return exit_usage;
        }
        catch (const UsageError &e)
        {
            err << "bdfrelay: " << e.what() << "\n";
            return exit_usage;
        }
        catch (const std::exception &e)
        {
            err << "bdfrelay: run failed (config " << (o.config.empty() ? o.out_dir : o.config) << "): " << e.what()
                << "\n";
            return exit_runtime;
        }
    }

} // namespace bdfrelay
