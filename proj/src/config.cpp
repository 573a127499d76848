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

#include "bdfrelay/config.hpp"
#include "bdfrelay/baselines.hpp"

#include <json.hpp>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace bdfrelay
{
    using json = nlohmann::ordered_json;

    std::string to_string(CsiModel model) { return model == CsiModel::rayleigh ? "rayleigh" : "discrete"; }

    CsiModel csi_model_from_string(const std::string &name)
    {
        if (name == "rayleigh")
            return CsiModel::rayleigh;
        if (name == "discrete")
            return CsiModel::discrete;
        throw std::invalid_argument("unknown CSI model '" + name + "' (expected rayleigh, discrete)");
    }

    double ExperimentConfig::power_src() const { return snr_db ? std::pow(10.0, *snr_db / 10.0) : src_power; }
    double ExperimentConfig::power_relay() const { return snr_db ? std::pow(10.0, *snr_db / 10.0) : relay_power; }

    Constraints ExperimentConfig::constraints() const
    {
        return Constraints{drop_target, power_src(), power_relay()};
    }

    AuctionParams ExperimentConfig::auction_params() const
    {
        AuctionParams p;
        p.dims = dims;
        p.buffer_size = buffer_size;
        p.packet_bits = packet_bits;
        p.frame_symbols = frame_symbols();
        p.arrival_pmf = arrival_pmf(arrival(), 1e-12, true);
        p.power_mode = power_mode;
        p.p_max_src = p_max_factor * power_src();
        p.p_max_relay = p_max_factor * power_relay();
        p.levels_src = levels_src;
        p.levels_relay = levels_relay;
        return p;
    }

    namespace
    {
        class Section
        {
        public:
            Section(const json &root, std::string name) : name_(std::move(name))
            {
                if (!root.contains(name_))
                    return;
                node_ = &root.at(name_);
                if (!node_->is_object())
                    throw ConfigError(name_, "must be an object");
            }

            ~Section() noexcept(false)
            {
                if (!node_ || std::uncaught_exceptions() > 0)
                    return;
                for (const auto &[k, _] : node_->items())
                    if (!seen_.count(k))
                        throw ConfigError(name_ + "." + k, "unknown key");
            }

            template <class T>
            bool get(const char *key, T &out)
            {
                seen_.insert(key);
                if (!node_ || !node_->contains(key))
                    return false;
                const json &v = node_->at(key);
                try
                {
                    read(v, out);
                }
                catch (const ConfigError &)
                {
                    throw;
                }
                catch (const std::exception &e)
                {
                    throw ConfigError(name_ + "." + key, e.what());
                }
                return true;
            }

        private:
            static void read(const json &v, double &out)
            {
                if (!v.is_number())
                    throw std::invalid_argument("expected a number");
                out = v.get<double>();
            }
            static void read(const json &v, std::optional<double> &out)
            {
                if (v.is_null())
                    out.reset();
                else
                {
                    double x = 0.0;
                    read(v, x);
                    out = x;
                }
            }
            template <class U>
                requires std::is_integral_v<U>
            static void read(const json &v, U &out)
            {
                if (v.is_number_float())
                {
                    const double d = v.get<double>();
                    if (d != std::floor(d))
                        throw std::invalid_argument("expected an integer");
                }
                if (!v.is_number())
                    throw std::invalid_argument("expected an integer");
                if (std::is_unsigned_v<U> && v.get<double>() < 0)
                    throw std::invalid_argument("must be nonnegative");
                out = v.get<U>();
            }
            static void read(const json &v, std::string &out)
            {
                if (!v.is_string())
                    throw std::invalid_argument("expected a string");
                out = v.get<std::string>();
            }
            template <class U>
            static void read(const json &v, std::vector<U> &out)
            {
                if (!v.is_array())
                    throw std::invalid_argument("expected an array");
                std::vector<U> tmp(v.size());
                for (std::size_t i = 0; i < v.size(); ++i)
                    read(v[i], tmp[i]);
                out = std::move(tmp);
            }
            static void read(const json &v, std::array<double, 3> &out)
            {
                if (!v.is_array() || v.size() != 3)
                    throw std::invalid_argument("expected an array of three numbers");
                for (std::size_t i = 0; i < 3; ++i)
                    read(v[i], out[i]);
            }

            std::string name_;
            const json *node_ = nullptr;
            std::set<std::string> seen_;
        };

        template <class E, class Parse>
        void get_enum(Section &s, const char *key, const std::string &section, E &out, Parse parse)
        {
            std::string name;
            if (!s.get(key, name))
                return;
            try
            {
                out = parse(name);
            }
            catch (const std::invalid_argument &e)
            {
                throw ConfigError(section + "." + key, e.what());
            }
        }

        void require(bool ok, const char *field, const std::string &msg)
        {
            if (!ok)
                throw ConfigError(field, msg);
        }

        bool valid_policy(const std::string &name)
        {
            if (name == "learned" || name == "oracle")
                return true;
            try
            {
                baseline_from_name(name, 1.0, 1.0);
                return true;
            }
            catch (const std::invalid_argument &)
            {
                return false;
            }
        }

        void check_levels(const std::vector<double> &levels, const char *field)
        {
            require(levels.size() >= 2, field, "needs at least two levels");
            require(levels.front() == 0.0, field, "must start at 0");
            for (std::size_t i = 1; i < levels.size(); ++i)
                require(std::isfinite(levels[i]) && levels[i] > levels[i - 1], field, "must be strictly ascending");
        }
    } // namespace

    bool is_sweep_axis(const std::string &axis) { return axis == "snr" || axis == "M" || axis == "N_R" || axis == "N_b"; }

    void validate(const ExperimentConfig &c)
    {
        require(c.dims.relays >= 2, "network.relays", "must be >= 2");
        require(c.dims.tx_antennas >= 1, "network.tx_antennas", "must be >= 1");
        require(c.dims.rx_antennas >= 1, "network.rx_antennas", "must be >= 1");
        require(c.buffer_size >= 1, "network.buffer_size", "must be >= 1");
        require(c.bandwidth_hz > 0 && std::isfinite(c.bandwidth_hz), "phy.bandwidth_hz", "must be positive");
        require(c.frame_s > 0 && std::isfinite(c.frame_s), "phy.frame_s", "must be positive");
        require(c.packet_bits > 0 && std::isfinite(c.packet_bits), "phy.packet_bits", "must be positive");
        require(c.p_max_factor >= 1.0 && std::isfinite(c.p_max_factor), "phy.p_max_factor", "must be >= 1");
        if (c.power_mode == PowerMode::grid || c.policy == "oracle")
        {
            check_levels(c.levels_src, "phy.levels_src");
            check_levels(c.levels_relay, "phy.levels_relay");
        }
        require(c.arrival_rate_pps >= 0 && std::isfinite(c.arrival_rate_pps), "traffic.rate_pps", "must be >= 0");
        if (c.arrival_kind == ArrivalKind::bernoulli)
            require(c.arrivals_per_frame() <= 1.0, "traffic.rate_pps", "Bernoulli arrivals need at most one packet per frame");
        if (c.snr_db)
            require(std::isfinite(*c.snr_db), "constraints.snr_db", "must be finite");
        else
        {
            require(c.src_power > 0 && std::isfinite(c.src_power), "constraints.src_power", "must be positive");
            require(c.relay_power > 0 && std::isfinite(c.relay_power), "constraints.relay_power", "must be positive");
        }
        require(c.drop_target > 0 && c.drop_target < 1, "constraints.drop_rate", "must lie in (0, 1)");
        require(valid_policy(c.policy), "policy.name", "unknown policy '" + c.policy + "'");
        try
        {
            make_schedule(c.step_exponents, c.step_constants);
        }
        catch (const std::invalid_argument &e)
        {
            throw ConfigError("learning.step_exponents", e.what());
        }
        require(c.initial_lm >= 0 && std::isfinite(c.initial_lm), "learning.initial_lm", "must be >= 0");
        require(c.initial_value_slope >= 0 && std::isfinite(c.initial_value_slope), "learning.initial_value_slope",
                "must be >= 0");
        require(c.snapshot_interval >= 1, "learning.snapshot_interval", "must be >= 1");
        require(c.convergence_window > 0 && c.convergence_window <= 1, "learning.convergence_window",
                "must lie in (0, 1]");
        require(c.frames >= 1, "run.frames", "must be >= 1");
        require(c.burn_in >= 0 && c.burn_in < 1, "run.burn_in", "must lie in [0, 1)");
        require(c.trace_interval >= 1, "run.trace_interval", "must be >= 1");
        require(c.csi_per_link >= 1, "csi.per_link", "must be >= 1");
        if (c.policy == "oracle")
            require(c.csi_model == CsiModel::discrete, "csi.model", "the oracle policy needs discrete CSI");
        require(c.oracle_tolerance > 0, "oracle.tolerance", "must be positive");
        require(c.oracle_lm.empty() || c.oracle_lm.size() == c.dims.relays + 2, "oracle.lm",
                "needs gamma_sd, gamma_sp and one gamma per relay");
        for (double x : c.oracle_lm)
            require(x >= 0 && std::isfinite(x), "oracle.lm", "multipliers must be >= 0");
        require(is_sweep_axis(c.sweep_axis), "sweep.axis", "must be one of snr, M, N_R, N_b");
        require(c.sweep_repetitions >= 1, "sweep.repetitions", "must be >= 1");
        require(!c.sweep_policies.empty(), "sweep.policies", "must not be empty");
        for (const auto &p : c.sweep_policies)
            require(valid_policy(p), "sweep.policies", "unknown policy '" + p + "'");
        for (double v : c.sweep_values)
            with_axis(c, c.sweep_axis, v);
    }

    ExperimentConfig parse_config(const std::string &text)
    {
        json root;
        try
        {
            root = json::parse(text);
        }
        catch (const json::parse_error &e)
        {
            throw ConfigError("", std::string("malformed JSON: ") + e.what());
        }
        if (!root.is_object())
            throw ConfigError("", "top level must be an object");
        static const std::set<std::string> sections{"schema_version", "network", "phy", "traffic", "constraints",
                                                    "policy", "learning", "run", "csi", "oracle", "sweep"};
        for (const auto &[k, _] : root.items())
            if (!sections.count(k))
                throw ConfigError(k, "unknown section");
        if (root.contains("schema_version"))
        {
            if (!root["schema_version"].is_number_integer() || root["schema_version"].get<int>() != config_schema_version)
                throw ConfigError("schema_version", "must be " + std::to_string(config_schema_version));
        }

        ExperimentConfig c;
        {
            Section s(root, "network");
            s.get("relays", c.dims.relays);
            s.get("tx_antennas", c.dims.tx_antennas);
            s.get("rx_antennas", c.dims.rx_antennas);
            s.get("buffer_size", c.buffer_size);
        }
        {
            Section s(root, "phy");
            s.get("bandwidth_hz", c.bandwidth_hz);
            s.get("frame_s", c.frame_s);
            s.get("packet_bits", c.packet_bits);
            get_enum(s, "power_mode", "phy", c.power_mode, power_mode_from_string);
            s.get("p_max_factor", c.p_max_factor);
            s.get("levels_src", c.levels_src);
            s.get("levels_relay", c.levels_relay);
        }
        {
            Section s(root, "traffic");
            get_enum(s, "arrival", "traffic", c.arrival_kind, arrival_kind_from_string);
            s.get("rate_pps", c.arrival_rate_pps);
        }
        {
            Section s(root, "constraints");
            s.get("snr_db", c.snr_db);
            s.get("src_power", c.src_power);
            s.get("relay_power", c.relay_power);
            s.get("drop_rate", c.drop_target);
        }
        {
            Section s(root, "policy");
            s.get("name", c.policy);
        }
        {
            Section s(root, "learning");
            s.get("step_exponents", c.step_exponents);
            s.get("step_constants", c.step_constants);
            get_enum(s, "update_mode", "learning", c.update_mode, update_mode_from_string);
            s.get("initial_lm", c.initial_lm);
            s.get("initial_value_slope", c.initial_value_slope);
            s.get("snapshot_interval", c.snapshot_interval);
            s.get("convergence_window", c.convergence_window);
        }
        {
            Section s(root, "run");
            s.get("frames", c.frames);
            s.get("seed", c.seed);
            s.get("burn_in", c.burn_in);
            s.get("trace_interval", c.trace_interval);
        }
        {
            Section s(root, "csi");
            get_enum(s, "model", "csi", c.csi_model, csi_model_from_string);
            s.get("per_link", c.csi_per_link);
            s.get("seed", c.csi_seed);
        }
        {
            Section s(root, "oracle");
            s.get("state_cap", c.oracle_state_cap);
            s.get("tolerance", c.oracle_tolerance);
            s.get("train_frames", c.oracle_train_frames);
            s.get("eval_frames", c.oracle_eval_frames);
            s.get("lm", c.oracle_lm);
        }
        {
            Section s(root, "sweep");
            s.get("axis", c.sweep_axis);
            s.get("values", c.sweep_values);
            s.get("repetitions", c.sweep_repetitions);
            s.get("policies", c.sweep_policies);
            s.get("threads", c.sweep_threads);
        }
        validate(c);
        return c;
    }

    ExperimentConfig load_config(const std::string &path)
    {
        std::ifstream in(path);
        if (!in)
            throw ConfigError("", "cannot open config file '" + path + "'");
        std::stringstream ss;
        ss << in.rdbuf();
        try
        {
            return parse_config(ss.str());
        }
        catch (const ConfigError &e)
        {
            throw ConfigError(e.field(), std::string(e.what()) + " (in " + path + ")");
        }
    }

    std::string emit_config(const ExperimentConfig &c)
    {
        json root;
        root["schema_version"] = config_schema_version;
        root["network"] = {{"relays", c.dims.relays},
                           {"tx_antennas", c.dims.tx_antennas},
                           {"rx_antennas", c.dims.rx_antennas},
                           {"buffer_size", c.buffer_size}};
        root["phy"] = {{"bandwidth_hz", c.bandwidth_hz},     {"frame_s", c.frame_s},
                       {"packet_bits", c.packet_bits},       {"power_mode", to_string(c.power_mode)},
                       {"p_max_factor", c.p_max_factor},     {"levels_src", c.levels_src},
                       {"levels_relay", c.levels_relay}};
        root["traffic"] = {{"arrival", to_string(c.arrival_kind)}, {"rate_pps", c.arrival_rate_pps}};
        root["constraints"] = {{"snr_db", c.snr_db ? json(*c.snr_db) : json(nullptr)},
                               {"src_power", c.src_power},
                               {"relay_power", c.relay_power},
                               {"drop_rate", c.drop_target}};
        root["policy"] = {{"name", c.policy}};
        root["learning"] = {{"step_exponents", c.step_exponents},
                            {"step_constants", c.step_constants},
                            {"update_mode", to_string(c.update_mode)},
                            {"initial_lm", c.initial_lm},
                            {"initial_value_slope", c.initial_value_slope},
                            {"snapshot_interval", c.snapshot_interval},
                            {"convergence_window", c.convergence_window}};
        root["run"] = {{"frames", c.frames}, {"seed", c.seed}, {"burn_in", c.burn_in}, {"trace_interval", c.trace_interval}};
        root["csi"] = {{"model", to_string(c.csi_model)}, {"per_link", c.csi_per_link}, {"seed", c.csi_seed}};
        root["oracle"] = {{"state_cap", c.oracle_state_cap},
                          {"tolerance", c.oracle_tolerance},
                          {"train_frames", c.oracle_train_frames},
                          {"eval_frames", c.oracle_eval_frames},
                          {"lm", c.oracle_lm}};
        root["sweep"] = {{"axis", c.sweep_axis},
                         {"values", c.sweep_values},
                         {"repetitions", c.sweep_repetitions},
                         {"policies", c.sweep_policies},
                         {"threads", c.sweep_threads}};
        return root.dump(2) + "\n";
    }

    ExperimentConfig with_axis(const ExperimentConfig &cfg, const std::string &axis, double value)
    {
        ExperimentConfig c = cfg;
        auto as_count = [&](const char *what) {
            if (!(value >= 1.0) || value != std::floor(value) || value > 64.0)
                throw ConfigError("sweep.values", std::string(what) + " values must be positive integers, got " +
                                                      std::to_string(value));
            return static_cast<std::size_t>(value);
        };
        if (axis == "snr")
        {
            if (!std::isfinite(value))
                throw ConfigError("sweep.values", "SNR values must be finite");
            c.snr_db = value;
        }
        else if (axis == "M")
        {
            c.dims.relays = as_count("M");
            if (c.dims.relays < 2)
                throw ConfigError("sweep.values", "M values must be >= 2");
            if (!c.oracle_lm.empty())
                c.oracle_lm.resize(c.dims.relays + 2, c.oracle_lm.back());
        }
        else if (axis == "N_R")
            c.dims.rx_antennas = as_count("N_R");
        else if (axis == "N_b")
        {
            if (!(value > 0.0) || !std::isfinite(value))
                throw ConfigError("sweep.values", "N_b values must be positive");
            c.packet_bits = value;
        }
        else
            throw ConfigError("sweep.axis", "unknown axis '" + axis + "'");
        return c;
    }

} // namespace bdfrelay
