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

#ifndef BDFRELAY_ORACLE_HPP
#define BDFRELAY_ORACLE_HPP

/*
Exact average-cost solver for small instances.

A FiniteMdp has a queue-state space, a finite i.i.d. CSI process with
probabilities w_k and, for every (state, CSI) pair, a list of actions with
a per-stage cost and a successor distribution. Value functions live on the
queue states only; the CSI expectation is taken outside the per-realization
minimum, which is the conditional Bellman equation

    theta + V(Q) = sum_k w_k min_a { g(Q, H_k, a) + sum_Q' P(Q' | Q, H_k, a) V(Q') }.

RelayInstance builds such an MDP for the relay network with frozen channel
realizations and a finite set of power levels.
*/

#include "bdfrelay/auction.hpp"
#include "bdfrelay/traffic.hpp"
#include "bdfrelay/value_table.hpp"

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace bdfrelay
{
    struct MdpAction
    {
        double cost = 0.0;
        std::vector<std::pair<std::uint32_t, double>> next; ///< (successor, probability)
        double p_src = 0.0;
        int tx_relay = -1; ///< relay drawing p_relay, or -1
        double p_relay = 0.0;
    };

    struct FiniteMdp
    {
        std::size_t states = 0;
        std::size_t relays = 0;
        std::vector<double> csi_weights;
        std::vector<std::vector<std::vector<MdpAction>>> actions; ///< [s][k][a]
        std::vector<double> occupancy;                            ///< total queued packets in s
        std::vector<char> src_full;                               ///< I[Q_S = N_Q] in s
        std::size_t reference = 0;
    };

    /// Throws when probabilities do not sum to one within 1e-12 or a
    /// (state, CSI) pair has no action.
    void validate(const FiniteMdp &mdp);

    using Policy = std::vector<std::vector<std::uint32_t>>; ///< [s][k] action index

    class SolverError : public std::runtime_error
    {
    public:
        SolverError(const std::string &what, std::vector<double> span_trace)
            : std::runtime_error(what), span_trace_(std::move(span_trace))
        {
        }
        const std::vector<double> &span_trace() const { return span_trace_; }

    private:
        std::vector<double> span_trace_;
    };

    class MultichainError : public std::runtime_error
    {
    public:
        MultichainError(const std::string &what, std::vector<std::vector<std::uint32_t>> classes)
            : std::runtime_error(what), classes_(std::move(classes))
        {
        }
        const std::vector<std::vector<std::uint32_t>> &closed_classes() const { return classes_; }

    private:
        std::vector<std::vector<std::uint32_t>> classes_;
    };

    struct RviOptions
    {
        double tolerance = 1e-9;
        std::size_t max_iterations = 200000;
        double damping = 0.5; ///< aperiodicity transform weight, in (0, 1]
    };

    struct SolveResult
    {
        double theta = 0.0;
        std::vector<double> value; ///< relative values, value[reference] = 0
        Policy policy;             ///< greedy, lowest action index on ties
        std::size_t iterations = 0;
        double final_span = 0.0;
        std::vector<double> span_trace; ///< span(TV - V) per iteration
    };

    /// Relative value iteration; stops when span(TV - V) <= tolerance. The
    /// greedy policy must be unichain, otherwise MultichainError.
    SolveResult relative_value_iteration(const FiniteMdp &mdp, const RviOptions &options = {});

    /// Closed classes (recurrent classes) of the chain induced by a policy.
    std::vector<std::vector<std::uint32_t>> closed_classes(const FiniteMdp &mdp, const Policy &policy);

    struct PolicyEvaluation
    {
        double avg_cost = 0.0;
        double avg_occupancy = 0.0;
        double avg_delay = 0.0; ///< avg_occupancy / arrival mean, frames
        double drop_rate = 0.0; ///< stationary P[Q_S = N_Q]
        double avg_power_src = 0.0;
        std::vector<double> avg_power_relay;
        std::vector<double> stationary;
    };

    /// Exact stationary expectations; MultichainError if the policy induces
    /// more than one closed class.
    PolicyEvaluation evaluate_policy(const FiniteMdp &mdp, const Policy &policy, double arrival_mean);

    struct DiscreteCsi
    {
        std::vector<GlobalCsi> states;
        std::vector<double> weights;
    };

    /// `per_link` frozen CN(0, 1) draws per link, equiprobable and independent
    /// across links; the joint process is their product.
    DiscreteCsi make_discrete_csi(const NetworkDims &dims, std::size_t per_link, Rng &rng);

    /// Links with independent fading: 2M + M(M - 1).
    std::size_t discrete_csi_links(const NetworkDims &dims);

    struct OracleAction
    {
        std::optional<std::size_t> rx;
        std::size_t n_sr = 0;
        double sr_power = 0.0;
        int sr_packets = 0; ///< before queue caps
        std::optional<std::size_t> tx;
        std::size_t n_rd = 0;
        double rd_power = 0.0;
        int rd_packets = 0; ///< before queue caps

        ServiceDecision decision() const;
    };

    struct RelayInstanceSpec
    {
        NetworkDims dims;
        int buffer_size = 2;
        double packet_bits = 25000.0;
        double frame_symbols = 5000.0;
        ArrivalModel arrival{ArrivalKind::bernoulli, 0.8};
        std::vector<double> levels_src{0.0, 1.0, 2.0, 4.0};
        std::vector<double> levels_relay{0.0, 1.0, 2.0, 4.0};
        DiscreteCsi csi;
        std::size_t state_cap = 10000;
    };

    class StateSpaceTooLarge : public std::invalid_argument
    {
    public:
        StateSpaceTooLarge(std::size_t states, std::size_t cap)
            : std::invalid_argument("oracle state space has " + std::to_string(states) + " queue states, cap is " +
                                    std::to_string(cap)),
              states_(states), cap_(cap)
        {
        }
        std::size_t states() const { return states_; }
        std::size_t cap() const { return cap_; }

    private:
        std::size_t states_;
        std::size_t cap_;
    };

    /// (N_Q + 1)^(M + 1).
    std::size_t queue_state_count(std::size_t relays, int buffer_size);

    class RelayInstance
    {
    public:
        explicit RelayInstance(RelayInstanceSpec spec);

        const RelayInstanceSpec &spec() const { return spec_; }
        std::size_t num_states() const { return num_states_; }
        std::size_t num_csi() const { return spec_.csi.states.size(); }
        QueueState state(std::size_t index) const;
        std::size_t index(const QueueState &q) const;
        const std::vector<OracleAction> &actions(std::size_t csi_index) const { return actions_.at(csi_index); }
        const std::vector<double> &arrival_pmf() const { return pmf_; }

        /// The MDP with Lagrangian per-stage cost at multipliers lm.
        FiniteMdp build_mdp(const LagrangeMultipliers &lm) const;

        /// Index of the action equal to an auction outcome; throws if the
        /// outcome lies outside the action set.
        std::uint32_t match(std::size_t csi_index, const AuctionOutcome &outcome) const;

        /// Tabulates decide(Q, k) over every queue state and CSI index.
        Policy tabulate(const std::function<AuctionOutcome(const QueueState &, std::size_t)> &decide) const;

        /// AuctionOutcome carrying the given action.
        AuctionOutcome outcome(std::size_t csi_index, std::uint32_t action, const QueueState &q) const;

    private:
        RelayInstanceSpec spec_;
        std::size_t num_states_ = 0;
        std::vector<double> pmf_;
        std::vector<std::vector<OracleAction>> actions_;
    };

    struct BellmanResidual
    {
        std::vector<std::size_t> nodes;
        std::vector<int> levels;
        std::vector<double> residuals; ///< offset removed
        double offset = 0.0;           ///< least-squares common offset
        double max_residual = 0.0;
    };

    /// Residual of the conditional Bellman equation at every representative
    /// state beta_{m,q} under V(Q) = sum_m V_m(Q_m).
    BellmanResidual bellman_residual(const RelayInstance &inst, const FiniteMdp &mdp, const PerNodeValueTable &v);

} // namespace bdfrelay

#endif
