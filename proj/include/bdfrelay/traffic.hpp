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

#ifndef BDFRELAY_TRAFFIC_HPP
#define BDFRELAY_TRAFFIC_HPP

#include "bdfrelay/complex_matrix.hpp"

#include <algorithm>
#include <cstddef>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace bdfrelay
{
    using Rng = std::mt19937_64;

    struct NetworkDims
    {
        std::size_t relays = 2;   ///< M
        std::size_t tx_antennas = 2; ///< N_T, at source and destination
        std::size_t rx_antennas = 4; ///< N_R, at every relay

        std::size_t max_streams() const { return std::min(tx_antennas, rx_antennas); }
        friend bool operator==(const NetworkDims &, const NetworkDims &) = default;
    };

    /// One frame of fading for every link in the network.
    struct GlobalCsi
    {
        std::vector<ComplexMatrix> h_sr;              ///< [m] H_{S,m}, N_R x N_T
        std::vector<ComplexMatrix> h_rd;              ///< [m] H_{m,D}, N_T x N_R
        std::vector<std::vector<ComplexMatrix>> h_rr; ///< [m][n] H_{m,n}, N_R x N_R, empty on the diagonal
    };

    /// Every entry i.i.d. CN(0, 1).
    GlobalCsi sample_csi(Rng &rng, const NetworkDims &dims);

    /// Queue lengths in packets, each within [0, N_Q].
    struct QueueState
    {
        int q_s = 0;
        std::vector<int> q_relay;

        int total() const;
        friend bool operator==(const QueueState &, const QueueState &) = default;
    };

    enum class ArrivalKind
    {
        poisson,
        deterministic,
        bernoulli
    };

    std::string to_string(ArrivalKind kind);
    ArrivalKind arrival_kind_from_string(const std::string &name);

    struct ArrivalModel
    {
        ArrivalKind kind = ArrivalKind::poisson;
        double mean_per_frame = 1.0;
    };

    void validate(const ArrivalModel &model);

    int sample_arrivals(Rng &rng, const ArrivalModel &model);

    /// Probability mass f_X(0..n_max). Poisson is cut at the smallest n whose
    /// cumulative mass reaches 1 - tail; with lump_tail the remainder is added
    /// to the last entry so the pmf sums to one.
    std::vector<double> arrival_pmf(const ArrivalModel &model, double tail = 1e-6, bool lump_tail = false);

    /// Packets per frame for a rate of lambda_S packets/s and frame duration tau.
    double mean_arrivals_per_frame(double packets_per_second, double frame_s);

    struct ServiceDecision
    {
        std::optional<std::size_t> rx_rs; ///< m*
        std::optional<std::size_t> tx_rs; ///< n*
        int sr_packets = 0;
        int rd_packets = 0;
        /// Decode-and-forward without buffering: packets taken from the source are
        /// delivered in the same frame through rx_rs, leaving its queue unchanged.
        bool forward_through = false;
    };

    struct QueueStep
    {
        QueueState next;
        int dropped = 0;           ///< arrivals lost at the full source buffer
        bool src_buffer_full = false; ///< next.q_s == N_Q
        int sr_moved = 0;          ///< packets that left the source
        int rd_delivered = 0;      ///< packets that reached the destination
        int relay_overflow = 0;    ///< packets lost at a full relay buffer
    };

    /// Exact frame update: service from start-of-frame queues, arrivals last.
    QueueStep step_queues(const QueueState &q, const ServiceDecision &d, int arrivals, int buffer_size);

    /// floor(bits / packet_bits); the single quantizer shared by every policy.
    int packets_from_bits(double bits, double packet_bits);

} // namespace bdfrelay

#endif
