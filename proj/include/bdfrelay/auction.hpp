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

#ifndef BDFRELAY_AUCTION_HPP
#define BDFRELAY_AUCTION_HPP

/*
Two-stage auction between the relays.

Every relay m evaluates, from its local view only, the S-R metric
G_{S,m}(N_SR, p) and broadcasts one first-stage bid per stream count
together with the decorrelator it would use. Each relay n then combines
every other relay's first-stage bids with its own nulling-constrained R-D
metric G_{n,D} and reports the minimum as its second-stage bid. The
smallest second-stage bid wins: n* transmits to the destination and its
stored partner m* = I_{n*} receives from the source.

Rates enter the value tables as packet counts, floor(bits / N_b), capped by
the queue that is being served.
*/

#include "bdfrelay/phy.hpp"
#include "bdfrelay/traffic.hpp"
#include "bdfrelay/value_table.hpp"

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bdfrelay
{
    enum class PowerMode
    {
        closed_form, ///< clamped high-load closed form
        golden,      ///< golden-section search on the interpolated metric
        grid,        ///< argmin over a finite list of power levels
        threshold    ///< argmin over the minimum powers that deliver 0, 1, 2, ... packets
    };

    std::string to_string(PowerMode mode);
    PowerMode power_mode_from_string(const std::string &name);

    struct AuctionParams
    {
        NetworkDims dims;
        int buffer_size = 10;
        double packet_bits = 25000.0;
        double frame_symbols = 5000.0;
        std::vector<double> arrival_pmf{1.0}; ///< f_X(0..n_max)
        PowerMode power_mode = PowerMode::closed_form;
        double p_max_src = 1000.0;
        double p_max_relay = 1000.0;
        std::vector<double> levels_src;   ///< grid mode; ascending, must contain 0
        std::vector<double> levels_relay; ///< grid mode; ascending, must contain 0

        /// Packets per frame per bit/s/Hz.
        double rate_scale() const { return frame_symbols / packet_bits; }
    };

    void validate(const AuctionParams &params);

    /// What relay m can observe: source and own queue, type-I CSI H_{S,m},
    /// type-II CSI H_{m,D} and H_{m,n} towards every other relay n.
    struct LocalState
    {
        std::size_t relay = 0;
        int q_s = 0;
        int q_m = 0;
        ComplexMatrix h_sr;
        ComplexMatrix h_rd;
        std::vector<ComplexMatrix> h_out; ///< [n] H_{m,n}; empty at n == m
    };

    LocalState local_view(const GlobalCsi &csi, const QueueState &q, std::size_t relay);

    /// G_{S,m} for a given number of delivered packets (exact table lookups).
    double g_sr_from_packets(int q_s, int q_m, std::size_t relay, int packets, double power,
                             const PerNodeValueTable &v, const LagrangeMultipliers &lm, std::span<const double> pmf);

    /// G_{S,m} with a real-valued packet rate and interpolated lookups.
    double g_sr_continuous(int q_s, int q_m, std::size_t relay, double packets, double power,
                           const PerNodeValueTable &v, const LagrangeMultipliers &lm, std::span<const double> pmf);

    /// G_{n,D} for a given number of delivered packets.
    double g_rd_from_packets(int q_n, std::size_t relay, int packets, double power, const PerNodeValueTable &v,
                             const LagrangeMultipliers &lm);

    double g_rd_continuous(int q_n, std::size_t relay, double packets, double power, const PerNodeValueTable &v,
                           const LagrangeMultipliers &lm);

    /// G_{S,m}(N_SR, p) with the water-filled S-R design at power p. n_sr = 0 gives 0.
    double g_sr_metric(const LocalState &local, const PerNodeValueTable &v, const LagrangeMultipliers &lm,
                       std::size_t n_sr, double power, const AuctionParams &params);

    /// G_{n,D}(N_RD, p) under nulling towards the receiving relay `partner`, whose
    /// decorrelator is g_m (empty when no S-R transmission is concurrent).
    double g_rd_metric(const LocalState &local, const PerNodeValueTable &v, const LagrangeMultipliers &lm,
                       std::size_t partner, const ComplexMatrix &g_m, std::size_t n_rd, double power,
                       const AuctionParams &params);

    class UnconstrainedPower : public std::domain_error
    {
    public:
        using std::domain_error::domain_error;
    };

    /// max(0, c N [V'_S(Q_S) - V'_m(Q_m)] / (gamma_Sp ln 2) - sum 1/eta_j), with
    /// c = rate_scale(). Throws UnconstrainedPower when gamma_Sp = 0.
    double closed_form_power_sr(const PerNodeValueTable &v, const LagrangeMultipliers &lm, int q_s, int q_m,
                                std::size_t relay, std::span<const double> gains, double rate_scale);

    /// max(0, c N V'_m(Q_m) / (gamma_mp ln 2) - sum 1/eta_j).
    double closed_form_power_rd(const PerNodeValueTable &v, const LagrangeMultipliers &lm, int q_m,
                                std::size_t relay, std::span<const double> gains, double rate_scale);

    /// Golden-section minimizer of a function on [lo, hi]; the better endpoint
    /// wins if it beats the interior estimate.
    template <class F>
    double golden_section_minimize(F &&f, double lo, double hi, double tol = 1e-12, int max_iter = 400);

    struct SrBidEntry
    {
        std::size_t n_sr = 0;
        double bid = 0.0;       ///< A_m(N_SR)
        double power = 0.0;     ///< p*_{S,m}(N_SR)
        double rate_bits = 0.0; ///< bits/frame at that power
        int packets = 0;        ///< deliverable packets, capped by Q_S
        ComplexMatrix decorrelator;

        bool transmits() const { return n_sr > 0 && power > 0.0; }
    };

    struct FirstStageBid
    {
        std::size_t relay = 0;
        std::vector<SrBidEntry> per_nsr; ///< index = N_SR, 0..min(N_T, N_R)
    };

    FirstStageBid first_stage_bids(const LocalState &local, const PerNodeValueTable &v,
                                   const LagrangeMultipliers &lm, const AuctionParams &params);

    struct SecondStageBid
    {
        std::size_t relay = 0;   ///< n
        double total_bid = 0.0;  ///< B*_n
        std::size_t partner = 0; ///< I_n, never equal to relay
        std::size_t n_sr = 0;
        std::size_t n_rd = 0;
        double sr_power = 0.0;
        double sr_rate_bits = 0.0;
        int sr_packets = 0;
        double rd_power = 0.0;
        double rd_rate_bits = 0.0;
        int rd_packets = 0;
        int skipped_pairs = 0; ///< candidates dropped because nulling was infeasible
    };

    SecondStageBid second_stage_bids(const LocalState &local, const PerNodeValueTable &v,
                                     const LagrangeMultipliers &lm, std::span<const FirstStageBid> first_bids,
                                     const AuctionParams &params);

    struct AuctionOutcome
    {
        std::optional<std::size_t> m_star;
        std::optional<std::size_t> n_star;
        std::size_t n_sr_star = 0;
        std::size_t n_rd_star = 0;
        double sr_power = 0.0; ///< power drawn at the source this frame
        double rd_power = 0.0; ///< power drawn at n* this frame
        double sr_rate = 0.0;  ///< bits/frame
        double rd_rate = 0.0;  ///< bits/frame
        int sr_packets = 0;
        int rd_packets = 0;
        double winning_bid = 0.0;
        bool forward_through = false;
        int skipped_pairs = 0;

        ServiceDecision decision() const;
    };

    /// n* = argmin B_n (lowest index on ties), m* = I_{n*}.
    AuctionOutcome resolve_auction(std::span<const SecondStageBid> second_bids);

    /// All relays bid from their local views; the auction is then resolved.
    AuctionOutcome run_auction(const GlobalCsi &csi, const QueueState &q, const PerNodeValueTable &v,
                               const LagrangeMultipliers &lm, const AuctionParams &params);

    // ------------------------------------------------------------------------

    template <class F>
    double golden_section_minimize(F &&f, double lo, double hi, double tol, int max_iter)
    {
        const double inv_phi = 0.6180339887498949;
        double a = lo, b = hi;
        double c = b - inv_phi * (b - a);
        double d = a + inv_phi * (b - a);
        double fc = f(c), fd = f(d);
        for (int i = 0; i < max_iter && (b - a) > tol * (1.0 + std::abs(a) + std::abs(b)); ++i)
        {
            if (fc <= fd)
            {
                b = d;
                d = c;
                fd = fc;
                c = b - inv_phi * (b - a);
                fc = f(c);
            }
            else
            {
                a = c;
                c = d;
                fc = fd;
                d = a + inv_phi * (b - a);
                fd = f(d);
            }
        }
        double best = 0.5 * (a + b);
        double fbest = f(best);
        const double flo = f(lo);
        if (flo < fbest)
        {
            best = lo;
            fbest = flo;
        }
        if (f(hi) < fbest)
            best = hi;
        return best;
    }

} // namespace bdfrelay

#endif
