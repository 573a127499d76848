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

#ifndef BDFRELAY_SIMULATION_HPP
#define BDFRELAY_SIMULATION_HPP

/*
Frame-level simulator.

Each frame: draw CSI, let the policy pick the links and powers, move
packets, admit arrivals, then (learned policy only) update the per-node
values and the multipliers. Steady-state metrics are time averages over
the frames after the burn-in.

Random streams are independent per purpose (CSI, arrivals) and derived
from the run seed, so a (config, seed) pair fixes every output byte.
*/

#include "bdfrelay/config.hpp"
#include "bdfrelay/learning.hpp"
#include "bdfrelay/oracle.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace bdfrelay
{
    struct RunSummary
    {
        std::string policy;
        double axis_value = 0.0;
        std::uint64_t seed = 0;
        std::uint64_t frames = 0;
        double avg_delay_frames = 0.0; ///< occupancy / accepted arrival rate
        double throughput_pps = 0.0;
        double drop_rate = 0.0; ///< fraction of frames with a full source buffer
        double avg_power_src = 0.0;
        std::vector<double> avg_power_relay;
        double avg_power_relay_mean = 0.0;
        bool converged = true;

        std::uint64_t measured_frames = 0;
        double avg_occupancy = 0.0;
        double avg_delay_s = 0.0;
        double fifo_delay_frames = 0.0; ///< mean sojourn of delivered packets
        double packet_loss_rate = 0.0;  ///< lost / offered packets
        std::uint64_t arrivals = 0;
        std::uint64_t dropped = 0;
        std::uint64_t relay_overflow = 0;
        std::uint64_t delivered = 0;
        double avg_cost = 0.0; ///< Lagrangian per-stage cost at the cost multipliers
        double cost_stderr = 0.0;
        double value_delta = 0.0;
        double lm_slack = 0.0;
        LagrangeMultipliers final_lm;
        double wallclock_s = 0.0; ///< never written to artifacts
    };

    struct TraceRow
    {
        std::uint64_t t = 0;
        std::size_t node = 0;
        int q = 0;
        double value = 0.0;
        LagrangeMultipliers lm;
    };

    /// Exact solution of the discretized instance at fixed multipliers.
    struct OracleSolution
    {
        std::shared_ptr<const RelayInstance> instance;
        LagrangeMultipliers lm;
        FiniteMdp mdp;
        SolveResult solve;
    };

    /// The instance a discrete-CSI config describes.
    RelayInstanceSpec relay_instance_spec(const ExperimentConfig &cfg);
    DiscreteCsi discrete_csi(const ExperimentConfig &cfg);
    /// Multipliers from oracle.lm, or every multiplier at learning.initial_lm.
    LagrangeMultipliers cost_multipliers(const ExperimentConfig &cfg);
    OracleSolution solve_oracle(const ExperimentConfig &cfg, const LagrangeMultipliers &lm);

    struct EpisodeOptions
    {
        bool record_trace = false;
        bool freeze_learning = false;
        std::optional<LearnerState> initial_state;
        std::shared_ptr<const OracleSolution> oracle; ///< reused by the oracle policy when set
        std::optional<LagrangeMultipliers> cost_lm;   ///< default: cost_multipliers(cfg)
        std::size_t cost_batches = 50;
        /// Report a run that loses every offered packet (delay left at 0,
        /// packet_loss_rate 1) instead of throwing.
        bool allow_total_loss = false;
    };

    struct EpisodeResult
    {
        RunSummary summary;
        std::vector<TraceRow> trace;
        LearnerState learner;
        std::vector<LearningSnapshot> history;
        ConvergenceReport convergence;
    };

    /// Throws ConfigError for invalid configs and std::runtime_error for
    /// failures during the run (e.g. a non-finite metric).
    EpisodeResult run_episode(const ExperimentConfig &cfg, const EpisodeOptions &options = {});

    struct OracleReport
    {
        std::size_t states = 0;
        std::size_t csi_states = 0;
        std::size_t actions = 0; ///< summed over CSI states
        LagrangeMultipliers lm;  ///< learned multipliers the comparison uses
        double theta = 0.0;
        double learned_cost = 0.0;
        double gap = 0.0;
        std::size_t rvi_iterations = 0;
        double rvi_span = 0.0;
        PolicyEvaluation learned;
        PolicyEvaluation optimal;
        BellmanResidual residual;
        RunSummary training;
        RunSummary replay; ///< simulated optimal policy over oracle.eval_frames
    };

    /// Trains the learned policy on the discretized instance, freezes it and
    /// evaluates it exactly against the optimal average cost. The optimal
    /// policy is also replayed in the simulator for oracle.eval_frames frames.
    OracleReport compare_with_oracle(const ExperimentConfig &cfg);

    struct SweepCell
    {
        std::string policy;
        double axis_value = 0.0;
        std::size_t repetition = 0;
        std::uint64_t seed = 0;
        bool ok = false;
        std::string error;
        RunSummary summary;
        std::vector<TraceRow> trace;
    };

    struct AggregateRow
    {
        std::string policy;
        double axis_value = 0.0;
        std::size_t runs = 0;
        std::size_t failed = 0;
        double delay_mean = 0.0, delay_se = 0.0;
        double throughput_mean = 0.0, throughput_se = 0.0;
        double drop_mean = 0.0, drop_se = 0.0;
        double power_src_mean = 0.0;
        double power_relay_mean = 0.0;
        double converged_fraction = 0.0;
    };

    struct SweepOptions
    {
        std::size_t threads = 0; ///< 0 = config value, then hardware concurrency
        bool record_trace = false;
    };

    struct SweepResult
    {
        std::string axis;
        std::vector<SweepCell> cells; ///< value-major, then policy, then repetition
        std::vector<AggregateRow> aggregate;
    };

    /// One run per (value, policy, repetition) with seed = base seed + repetition.
    /// Failed cells are recorded and the sweep continues.
    SweepResult sweep(const ExperimentConfig &cfg, const SweepOptions &options = {});

    /// The axis value a config sits at.
    double axis_value_of(const ExperimentConfig &cfg, const std::string &axis);

} // namespace bdfrelay

#endif
