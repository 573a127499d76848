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

#ifndef BDFRELAY_CONFIG_HPP
#define BDFRELAY_CONFIG_HPP

/*
Experiment configuration. The file format is JSON; docs/config.md lists
every key. Missing keys take the defaults below, unknown keys are errors.
*/

#include "bdfrelay/auction.hpp"
#include "bdfrelay/learning.hpp"
#include "bdfrelay/traffic.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bdfrelay
{
    inline constexpr int config_schema_version = 1;

    /// Raised for malformed or invalid configuration; `field` is the dotted
    /// path of the offending key.
    class ConfigError : public std::invalid_argument
    {
    public:
        ConfigError(const std::string &field, const std::string &message)
            : std::invalid_argument(field.empty() ? message : field + ": " + message), field_(field)
        {
        }
        const std::string &field() const { return field_; }

    private:
        std::string field_;
    };

    enum class CsiModel
    {
        rayleigh, ///< fresh CN(0, 1) draws every frame
        discrete  ///< uniform over a frozen finite set, as in the oracle
    };

    std::string to_string(CsiModel model);
    CsiModel csi_model_from_string(const std::string &name);

    struct ExperimentConfig
    {
        // network
        NetworkDims dims;
        int buffer_size = 10;

        // phy
        double bandwidth_hz = 1.0e6;
        double frame_s = 0.005;
        double packet_bits = 25000.0;
        PowerMode power_mode = PowerMode::closed_form;
        double p_max_factor = 100.0; ///< per-frame power cap, in units of the average constraint
        std::vector<double> levels_src;
        std::vector<double> levels_relay;

        // traffic
        ArrivalKind arrival_kind = ArrivalKind::poisson;
        double arrival_rate_pps = 200.0;

        // constraints
        std::optional<double> snr_db = 10.0; ///< when set, P_S = P_R = 10^(snr/10)
        double src_power = 10.0;
        double relay_power = 10.0;
        double drop_target = 0.002;

        // policy
        std::string policy = "learned"; ///< learned, oracle, B1..B5 or <scheduler>-<duplex>-<protocol>

        // learning
        std::array<double, 3> step_exponents{0.6, 0.8, 0.9};
        std::array<double, 3> step_constants{1.0, 1.0, 1.0};
        UpdateMode update_mode = UpdateMode::per_paper;
        double initial_lm = 1.0;
        double initial_value_slope = 0.3; ///< V_m(q) = hops * slope * q at t = 0 (2 hops for the source, 1 for relays)
        std::uint64_t snapshot_interval = 100;
        double convergence_window = 0.1; ///< trailing fraction of the snapshots

        // run
        std::uint64_t frames = 100000;
        std::uint64_t seed = 1;
        double burn_in = 0.2;
        std::uint64_t trace_interval = 1000;

        // csi
        CsiModel csi_model = CsiModel::rayleigh;
        std::size_t csi_per_link = 2;
        std::uint64_t csi_seed = 7;

        // oracle
        std::size_t oracle_state_cap = 10000;
        double oracle_tolerance = 1e-9;
        std::uint64_t oracle_train_frames = 200000;
        std::uint64_t oracle_eval_frames = 100000;
        std::vector<double> oracle_lm; ///< [gamma_sd, gamma_sp, gamma_r...] for the oracle policy

        // sweep
        std::string sweep_axis = "snr";
        std::vector<double> sweep_values;
        std::size_t sweep_repetitions = 1;
        std::vector<std::string> sweep_policies{"learned"};
        std::size_t sweep_threads = 0; ///< 0 = hardware concurrency

        friend bool operator==(const ExperimentConfig &, const ExperimentConfig &) = default;

        double frame_symbols() const { return bandwidth_hz * frame_s; }
        double arrivals_per_frame() const { return mean_arrivals_per_frame(arrival_rate_pps, frame_s); }
        double power_src() const;
        double power_relay() const;
        Constraints constraints() const;
        ArrivalModel arrival() const { return ArrivalModel{arrival_kind, arrivals_per_frame()}; }
        /// PHY and auction parameters derived from this config.
        AuctionParams auction_params() const;
    };

    /// Throws ConfigError naming the first invalid field.
    void validate(const ExperimentConfig &cfg);

    ExperimentConfig parse_config(const std::string &text);
    ExperimentConfig load_config(const std::string &path);
    /// Pretty-printed JSON with every key; parse_config(emit_config(c)) == c.
    std::string emit_config(const ExperimentConfig &cfg);

    /// Applies a sweep axis value: snr (dB), M, N_R or N_b.
    ExperimentConfig with_axis(const ExperimentConfig &cfg, const std::string &axis, double value);
    bool is_sweep_axis(const std::string &axis);

} // namespace bdfrelay

#endif
