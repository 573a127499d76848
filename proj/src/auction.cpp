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

#include "bdfrelay/auction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace bdfrelay
{
    std::string to_string(PowerMode mode)
    {
        switch (mode)
        {
        case PowerMode::closed_form:
            return "closed_form";
        case PowerMode::golden:
            return "golden";
        case PowerMode::grid:
            return "grid";
        case PowerMode::threshold:
            return "threshold";
        }
        return "unknown";
    }

    PowerMode power_mode_from_string(const std::string &name)
    {
        if (name == "closed_form")
            return PowerMode::closed_form;
        if (name == "golden")
            return PowerMode::golden;
        if (name == "grid")
            return PowerMode::grid;
        if (name == "threshold")
            return PowerMode::threshold;
        throw std::invalid_argument("unknown power mode '" + name +
                                    "' (expected closed_form, golden, grid, threshold)");
    }

    namespace
    {
        void check_levels(const std::vector<double> &levels, const char *which)
        {
            if (levels.empty() || levels.front() != 0.0)
                throw std::invalid_argument(std::string("grid power levels (") + which + ") must start at 0");
            for (std::size_t i = 1; i < levels.size(); ++i)
                if (!(levels[i] > levels[i - 1]))
                    throw std::invalid_argument(std::string("grid power levels (") + which +
                                                ") must be strictly ascending");
        }
    } // namespace

    void validate(const AuctionParams &params)
    {
        if (params.dims.relays < 2)
            throw std::invalid_argument("auction needs at least two relays");
        if (params.dims.tx_antennas == 0 || params.dims.rx_antennas == 0)
            throw std::invalid_argument("antenna counts must be >= 1");
        if (params.buffer_size < 1)
            throw std::invalid_argument("buffer size must be >= 1");
        if (!(params.packet_bits > 0.0) || !(params.frame_symbols > 0.0))
            throw std::invalid_argument("packet size and frame length must be positive");
        if (params.arrival_pmf.empty())
            throw std::invalid_argument("arrival pmf is empty");
        if (!(params.p_max_src > 0.0) || !(params.p_max_relay > 0.0))
            throw std::invalid_argument("power caps must be positive");
        if (params.power_mode == PowerMode::grid)
        {
            check_levels(params.levels_src, "source");
            check_levels(params.levels_relay, "relay");
        }
    }

    LocalState local_view(const GlobalCsi &csi, const QueueState &q, std::size_t relay)
    {
        if (relay >= csi.h_sr.size() || relay >= q.q_relay.size())
            throw std::out_of_range("local_view: relay index out of range");
        LocalState s;
        s.relay = relay;
        s.q_s = q.q_s;
        s.q_m = q.q_relay[relay];
        s.h_sr = csi.h_sr[relay];
        s.h_rd = csi.h_rd[relay];
        s.h_out = csi.h_rr[relay];
        return s;
    }

    double g_sr_from_packets(int q_s, int q_m, std::size_t relay, int packets, double power,
                             const PerNodeValueTable &v, const LagrangeMultipliers &lm, std::span<const double> pmf)
    {
        const std::size_t node = relay_node(relay);
        const int nq = v.buffer_size();
        double g = lm.gamma_sp * power;
        if (packets <= 0)
            return g;
        double src = 0.0;
        for (std::size_t n = 0; n < pmf.size(); ++n)
        {
            const int after = q_s - packets + static_cast<int>(n);
            if (after >= nq)
                break;
            src += pmf[n] * (v.clamped(source_node, after) - v.clamped(source_node, q_s + static_cast<int>(n)));
        }
        return g + src + v.clamped(node, q_m + packets) - v.clamped(node, q_m);
    }

    double g_sr_continuous(int q_s, int q_m, std::size_t relay, double packets, double power,
                           const PerNodeValueTable &v, const LagrangeMultipliers &lm, std::span<const double> pmf)
    {
        const std::size_t node = relay_node(relay);
        const double nq = v.buffer_size();
        double g = lm.gamma_sp * power;
        if (!(packets > 0.0))
            return g;
        double src = 0.0;
        for (std::size_t n = 0; n < pmf.size(); ++n)
        {
            const double after = q_s - packets + static_cast<double>(n);
            if (after >= nq)
                break;
            src += pmf[n] * (v.interpolate(source_node, after) - v.interpolate(source_node, q_s + static_cast<double>(n)));
        }
        return g + src + v.interpolate(node, q_m + packets) - v.interpolate(node, q_m);
    }

    double g_rd_from_packets(int q_n, std::size_t relay, int packets, double power, const PerNodeValueTable &v,
                             const LagrangeMultipliers &lm)
    {
        const std::size_t node = relay_node(relay);
        return lm.gamma_rp.at(relay) * power + v.clamped(node, q_n - std::max(packets, 0)) - v.clamped(node, q_n);
    }

    double g_rd_continuous(int q_n, std::size_t relay, double packets, double power, const PerNodeValueTable &v,
                           const LagrangeMultipliers &lm)
    {
        const std::size_t node = relay_node(relay);
        return lm.gamma_rp.at(relay) * power + v.interpolate(node, q_n - std::max(packets, 0.0)) -
               v.interpolate(node, q_n);
    }

    namespace
    {
        int deliverable(double bits, double packet_bits, int queue)
        {
            return std::min(packets_from_bits(bits, packet_bits), std::max(queue, 0));
        }

        /// Packets an S-R link may move: the source backlog, limited by free relay space.
        int sr_room(const LocalState &local, const PerNodeValueTable &v)
        {
            return std::min(local.q_s, v.buffer_size() - local.q_m);
        }

        double inverse_gain_sum(std::span<const double> gains)
        {
            double s = 0.0;
            for (double g : gains)
            {
                if (!(g > 0.0))
                    return std::numeric_limits<double>::infinity();
                s += 1.0 / g;
            }
            return s;
        }

        double closed_form(double slope, double gamma, std::size_t n, std::span<const double> gains,
                           double rate_scale)
        {
            const double p = rate_scale * static_cast<double>(n) * slope / (gamma * std::numbers::ln2) -
                             inverse_gain_sum(gains);
            return p > 0.0 ? p : 0.0;
        }

        /// Water-filled rate in packets per frame over the given gains.
        double packet_rate(std::span<const double> gains, double power, double rate_scale)
        {
            return rate_scale * water_fill(gains, power).achieved_rate;
        }

        struct PowerChoice
        {
            double power = 0.0;
            LinkDesign design;
            int packets = 0;
            double metric = 0.0;
        };

        /// Shared power search for both link types. `slope` is the closed-form
        /// marginal value, `gamma` the link's LM, `queue` caps delivered packets.
        template <class Quantized, class Continuous>
        PowerChoice choose_power(const EigenModes &modes, std::size_t n_streams, double slope, double gamma,
                                 int queue, double p_max, const std::vector<double> &levels,
                                 const AuctionParams &params, Quantized &&quantized, Continuous &&continuous)
        {
            const std::span<const double> gains(modes.gains.data(), n_streams);
            const double c = params.rate_scale();
            auto evaluate = [&](double p) {
                PowerChoice pc;
                pc.power = p;
                pc.design = allocate_link(modes, n_streams, p, params.frame_symbols);
                pc.packets = deliverable(pc.design.rate_bits_per_frame, params.packet_bits, queue);
                pc.metric = quantized(pc.packets, pc.design.total_power);
                return pc;
            };

            switch (params.power_mode)
            {
            case PowerMode::closed_form:
            {
                double p = 0.0;
                if (gamma > 0.0)
                    p = std::min(closed_form(slope, gamma, n_streams, gains, c), p_max);
                else if (slope > 0.0)
                    p = p_max;
                return evaluate(p);
            }
            case PowerMode::golden:
            {
                auto f = [&](double p) {
                    const double r = std::min(packet_rate(gains, p, c), static_cast<double>(std::max(queue, 0)));
                    return continuous(r, p);
                };
                return evaluate(golden_section_minimize(f, 0.0, p_max));
            }
            case PowerMode::grid:
            {
                PowerChoice best = evaluate(levels.front());
                for (std::size_t i = 1; i < levels.size(); ++i)
                {
                    PowerChoice pc = evaluate(levels[i]);
                    if (pc.metric < best.metric)
                        best = std::move(pc);
                }
                return best;
            }
            case PowerMode::threshold:
            {
                PowerChoice best = evaluate(0.0);
                const int top = std::min(static_cast<int>(std::floor(packet_rate(gains, p_max, c) + 1e-9)),
                                         std::max(queue, 0));
                for (int k = 1; k <= top; ++k)
                {
                    // Nudge above the boundary so floor() lands on k.
                    const double p = std::min(power_for_rate(gains, k / c * (1.0 + 1e-12)), p_max);
                    PowerChoice pc = evaluate(p);
                    if (pc.metric < best.metric)
                        best = std::move(pc);
                }
                return best;
            }
            }
            return evaluate(0.0);
        }

        PowerChoice choose_sr_power(const LocalState &local, const EigenModes &modes, std::size_t n_sr,
                                    const PerNodeValueTable &v, const LagrangeMultipliers &lm,
                                    const AuctionParams &params)
        {
            const double slope =
                value_derivative(v, source_node, local.q_s) - value_derivative(v, relay_node(local.relay), local.q_m);
            const std::span<const double> pmf(params.arrival_pmf);
            return choose_power(
                modes, n_sr, slope, lm.gamma_sp, sr_room(local, v), params.p_max_src, params.levels_src, params,
                [&](int packets, double p) {
                    return g_sr_from_packets(local.q_s, local.q_m, local.relay, packets, p, v, lm, pmf);
                },
                [&](double packets, double p) {
                    return g_sr_continuous(local.q_s, local.q_m, local.relay, packets, p, v, lm, pmf);
                });
        }

        PowerChoice choose_rd_power(const LocalState &local, const EigenModes &modes, std::size_t n_rd,
                                    const PerNodeValueTable &v, const LagrangeMultipliers &lm,
                                    const AuctionParams &params)
        {
            const double slope = value_derivative(v, relay_node(local.relay), local.q_m);
            return choose_power(
                modes, n_rd, slope, lm.gamma_rp.at(local.relay), local.q_m, params.p_max_relay, params.levels_relay,
                params,
                [&](int packets, double p) { return g_rd_from_packets(local.q_m, local.relay, packets, p, v, lm); },
                [&](double packets, double p) {
                    return g_rd_continuous(local.q_m, local.relay, packets, p, v, lm);
                });
        }
    } // namespace

    double g_sr_metric(const LocalState &local, const PerNodeValueTable &v, const LagrangeMultipliers &lm,
                       std::size_t n_sr, double power, const AuctionParams &params)
    {
        if (n_sr == 0)
            return 0.0;
        const LinkDesign d = design_sr_link(local.h_sr, n_sr, power, params.frame_symbols);
        const int packets = deliverable(d.rate_bits_per_frame, params.packet_bits, sr_room(local, v));
        return g_sr_from_packets(local.q_s, local.q_m, local.relay, packets, d.total_power, v, lm,
                                 params.arrival_pmf);
    }

    double g_rd_metric(const LocalState &local, const PerNodeValueTable &v, const LagrangeMultipliers &lm,
                       std::size_t partner, const ComplexMatrix &g_m, std::size_t n_rd, double power,
                       const AuctionParams &params)
    {
        if (n_rd == 0)
            return 0.0;
        if (partner >= local.h_out.size() || partner == local.relay)
            throw std::invalid_argument("g_rd_metric: partner must be another relay");
        const LinkDesign d = design_rd_link(local.h_rd, local.h_out[partner], g_m, n_rd, power, params.frame_symbols);
        const int packets = deliverable(d.rate_bits_per_frame, params.packet_bits, local.q_m);
        return g_rd_from_packets(local.q_m, local.relay, packets, d.total_power, v, lm);
    }

    double closed_form_power_sr(const PerNodeValueTable &v, const LagrangeMultipliers &lm, int q_s, int q_m,
                                std::size_t relay, std::span<const double> gains, double rate_scale)
    {
        if (!(lm.gamma_sp > 0.0))
            throw UnconstrainedPower("closed_form_power_sr: unconstrained power, gamma_Sp = 0");
        const double slope = value_derivative(v, source_node, q_s) - value_derivative(v, relay_node(relay), q_m);
        return closed_form(slope, lm.gamma_sp, gains.size(), gains, rate_scale);
    }

    double closed_form_power_rd(const PerNodeValueTable &v, const LagrangeMultipliers &lm, int q_m,
                                std::size_t relay, std::span<const double> gains, double rate_scale)
    {
        const double gamma = lm.gamma_rp.at(relay);
        if (!(gamma > 0.0))
            throw UnconstrainedPower("closed_form_power_rd: unconstrained power, gamma_mp = 0");
        const double slope = value_derivative(v, relay_node(relay), q_m);
        return closed_form(slope, gamma, gains.size(), gains, rate_scale);
    }

    FirstStageBid first_stage_bids(const LocalState &local, const PerNodeValueTable &v,
                                   const LagrangeMultipliers &lm, const AuctionParams &params)
    {
        FirstStageBid bid;
        bid.relay = local.relay;
        const std::size_t n_min = params.dims.max_streams();
        bid.per_nsr.resize(n_min + 1);
        const EigenModes modes = eigen_modes(local.h_sr);
        for (std::size_t n_sr = 1; n_sr <= n_min; ++n_sr)
        {
            PowerChoice pc = choose_sr_power(local, modes, n_sr, v, lm, params);
            SrBidEntry &e = bid.per_nsr[n_sr];
            e.n_sr = n_sr;
            e.power = pc.design.total_power;
            e.rate_bits = pc.design.rate_bits_per_frame;
            e.packets = pc.packets;
            e.bid = pc.metric;
            e.decorrelator = std::move(pc.design.decorrelator);
        }
        return bid;
    }

    SecondStageBid second_stage_bids(const LocalState &local, const PerNodeValueTable &v,
                                     const LagrangeMultipliers &lm, std::span<const FirstStageBid> first_bids,
                                     const AuctionParams &params)
    {
        const std::size_t n = local.relay;
        const std::size_t n_t = params.dims.tx_antennas;
        const std::size_t n_r = params.dims.rx_antennas;

        SecondStageBid best;
        best.relay = n;
        bool have_best = false;
        int skipped = 0;

        std::optional<PowerChoice> unconstrained;
        for (const FirstStageBid &fb : first_bids)
        {
            const std::size_t m = fb.relay;
            if (m == n)
                continue;
            for (const SrBidEntry &e : fb.per_nsr)
            {
                if (e.n_sr > 0 && !e.transmits())
                    continue;

                std::size_t n_rd = std::min(n_t, n_r - std::min(e.n_sr, n_r));
                PowerChoice rd;
                if (n_rd > 0)
                {
                    if (e.n_sr == 0)
                    {
                        if (!unconstrained)
                            unconstrained = choose_rd_power(local, eigen_modes(local.h_rd), n_rd, v, lm, params);
                        rd = *unconstrained;
                    }
                    else
                    {
                        EigenModes modes;
                        try
                        {
                            modes = nulled_modes(local.h_rd, local.h_out.at(m), e.decorrelator);
                        }
                        catch (const NullingInfeasible &)
                        {
                            ++skipped;
                            continue;
                        }
                        n_rd = std::min(n_rd, modes.gains.size());
                        if (n_rd > 0)
                            rd = choose_rd_power(local, modes, n_rd, v, lm, params);
                    }
                }
                if (n_rd == 0 || rd.metric > 0.0 || !(rd.design.total_power > 0.0))
                    rd = PowerChoice{};

                const double total = e.bid + rd.metric;
                if (!have_best || total < best.total_bid)
                {
                    have_best = true;
                    best.total_bid = total;
                    best.partner = m;
                    best.n_sr = e.n_sr;
                    best.n_rd = rd.power > 0.0 ? n_rd : 0;
                    best.sr_power = e.power;
                    best.sr_rate_bits = e.rate_bits;
                    best.sr_packets = e.packets;
                    best.rd_power = rd.design.total_power;
                    best.rd_rate_bits = rd.design.rate_bits_per_frame;
                    best.rd_packets = rd.packets;
                }
            }
        }
        if (!have_best)
            throw std::logic_error("second_stage_bids: no candidate partner relay");
        best.skipped_pairs = skipped;
        return best;
    }

    ServiceDecision AuctionOutcome::decision() const
    {
        ServiceDecision d;
        d.rx_rs = m_star;
        d.tx_rs = n_star;
        d.sr_packets = m_star ? sr_packets : 0;
        d.rd_packets = n_star ? rd_packets : 0;
        d.forward_through = forward_through;
        return d;
    }

    AuctionOutcome resolve_auction(std::span<const SecondStageBid> second_bids)
    {
        if (second_bids.empty())
            throw std::invalid_argument("resolve_auction: no bids");
        std::size_t win = 0;
        int skipped = 0;
        for (std::size_t i = 0; i < second_bids.size(); ++i)
        {
            skipped += second_bids[i].skipped_pairs;
            if (second_bids[i].total_bid < second_bids[win].total_bid)
                win = i;
        }
        const SecondStageBid &b = second_bids[win];
        AuctionOutcome out;
        out.winning_bid = b.total_bid;
        out.skipped_pairs = skipped;
        if (b.n_sr > 0 && b.sr_power > 0.0)
        {
            out.m_star = b.partner;
            out.n_sr_star = b.n_sr;
            out.sr_power = b.sr_power;
            out.sr_rate = b.sr_rate_bits;
            out.sr_packets = b.sr_packets;
        }
        if (b.n_rd > 0 && b.rd_power > 0.0)
        {
            out.n_star = b.relay;
            out.n_rd_star = b.n_rd;
            out.rd_power = b.rd_power;
            out.rd_rate = b.rd_rate_bits;
            out.rd_packets = b.rd_packets;
        }
        return out;
    }

    AuctionOutcome run_auction(const GlobalCsi &csi, const QueueState &q, const PerNodeValueTable &v,
                               const LagrangeMultipliers &lm, const AuctionParams &params)
    {
        const std::size_t m_count = params.dims.relays;
        std::vector<LocalState> views;
        views.reserve(m_count);
        std::vector<FirstStageBid> first;
        first.reserve(m_count);
        for (std::size_t m = 0; m < m_count; ++m)
        {
            views.push_back(local_view(csi, q, m));
            first.push_back(first_stage_bids(views.back(), v, lm, params));
        }
        std::vector<SecondStageBid> second;
        second.reserve(m_count);
        for (std::size_t n = 0; n < m_count; ++n)
            second.push_back(second_stage_bids(views[n], v, lm, first, params));
        return resolve_auction(second);
    }

} // namespace bdfrelay
