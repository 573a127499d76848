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

#ifndef BDFRELAY_LEARNING_HPP
#define BDFRELAY_LEARNING_HPP

#include "bdfrelay/traffic.hpp"
#include "bdfrelay/value_table.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace bdfrelay
{
    /// eps_x(t) = c_x / (1 + t)^{a_x} for x in {v, p, d}.
    class StepSchedule
    {
    public:
        StepSchedule() = default;
        StepSchedule(std::array<double, 3> exponents, std::array<double, 3> constants);

        double eps_v(double t) const;
        double eps_p(double t) const;
        double eps_d(double t) const;

        const std::array<double, 3> &exponents() const { return exponents_; }
        const std::array<double, 3> &constants() const { return constants_; }

    private:
        std::array<double, 3> exponents_{0.6, 0.8, 0.9};
        std::array<double, 3> constants_{1.0, 1.0, 1.0};
    };

    /// Requires 0.5 < a_v < a_p <= a_d <= 1 and positive constants; the error
    /// message names the violated condition.
    StepSchedule make_schedule(std::array<double, 3> exponents, std::array<double, 3> constants = {1.0, 1.0, 1.0});

    enum class UpdateMode
    {
        per_paper,  ///< update V_m(q) only at the representative state beta_{m,q}
        every_visit ///< update V_m(Q_m(t)) for every node, per-cell step sizes
    };

    std::string to_string(UpdateMode mode);
    UpdateMode update_mode_from_string(const std::string &name);

    struct LearnerState
    {
        PerNodeValueTable v;
        LagrangeMultipliers lm;
        std::uint64_t t = 0;
        std::vector<std::vector<std::uint64_t>> visit_counts; ///< [node][q]

        LearnerState() = default;
        LearnerState(std::size_t relays, int buffer_size, double initial_lm = 1.0);
    };

    /// Node m with Q(t) = beta_{m,q}, if any (exactly one nonzero component).
    bool representative_state(const QueueState &q, std::size_t &node, int &level);

    /// Value update with target gamma_Sd I[Q_S = N_Q] + q + B*. In every-visit
    /// mode the drop term only enters the source cell. Returns the number of
    /// table cells that changed.
    int update_values(LearnerState &ls, const QueueState &q_t, double winning_bid, const StepSchedule &sched,
                      UpdateMode mode);

    struct FrameObservation
    {
        bool src_full = false;          ///< I[Q_S(t) = N_Q]
        double src_power = 0.0;         ///< power drawn by the source
        std::vector<double> relay_power; ///< power drawn by each relay
    };

    struct Constraints
    {
        double drop_rate = 0.002; ///< D
        double src_power = 10.0;  ///< P_S
        double relay_power = 10.0; ///< P_R
    };

    /// Projected LM steps; each LM moves against its own constraint slack.
    void update_lms(LearnerState &ls, const FrameObservation &obs, const StepSchedule &sched,
                    const Constraints &constraints);

    struct LearningSnapshot
    {
        std::uint64_t t = 0;
        PerNodeValueTable v;
        LagrangeMultipliers lm;
        double cum_src_full = 0.0;
        double cum_src_power = 0.0;
        std::vector<double> cum_relay_power;
    };

    struct ConvergenceThresholds
    {
        double value_delta = 0.01;
        double lm_slack = 0.05;
        double active_lm = 1e-3; ///< an LM above this is treated as binding
    };

    struct ConvergenceReport
    {
        double value_delta = 0.0;
        double lm_slack = 0.0;
        bool converged = false;
    };

    /// Diagnostics over the trailing `window` snapshots (window >= 2).
    ///
    /// value_delta: the window is split in two halves and the tables are
    /// averaged over each half; the result is the largest change of any entry,
    /// relative to max(|entry|, 1% of the largest table magnitude).
    ///
    /// lm_slack: windowed constraint averages against their targets. A binding
    /// LM counts |avg - target| / target, a zero LM only a positive violation.
    ConvergenceReport convergence_report(const std::vector<LearningSnapshot> &history, std::size_t window,
                                         const ConvergenceThresholds &thresholds, const Constraints &constraints);

} // namespace bdfrelay

#endif
