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

#include "bdfrelay/baselines.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace bdfrelay
{
    BaselineConfig baseline_preset(int index, double p_src, double p_relay)
    {
        BaselineConfig c;
        c.p_src = p_src;
        c.p_relay = p_relay;
        switch (index)
        {
        case 1:
            c.scheduler = Scheduler::backpressure, c.duplex = Duplex::full, c.protocol = Protocol::bdf;
            break;
        case 2:
            c.scheduler = Scheduler::csit_only, c.duplex = Duplex::full, c.protocol = Protocol::df;
            break;
        case 3:
            c.scheduler = Scheduler::csit_only, c.duplex = Duplex::half, c.protocol = Protocol::bdf;
            break;
        case 4:
            c.scheduler = Scheduler::backpressure, c.duplex = Duplex::half, c.protocol = Protocol::bdf;
            break;
        case 5:
            c.scheduler = Scheduler::csit_only, c.duplex = Duplex::half, c.protocol = Protocol::df;
            break;
        default:
            throw std::invalid_argument("baseline_preset: index must be 1..5, got " + std::to_string(index));
        }
        return c;
    }

    namespace
    {
        std::string long_name(const BaselineConfig &c)
        {
            return std::string(c.scheduler == Scheduler::backpressure ? "backpressure" : "csit_only") + "-" +
                   (c.duplex == Duplex::half ? "half" : "full") + "-" + (c.protocol == Protocol::bdf ? "bdf" : "df");
        }
    } // namespace

    std::string baseline_name(const BaselineConfig &cfg)
    {
        for (int i = 1; i <= 5; ++i)
        {
            const BaselineConfig p = baseline_preset(i, cfg.p_src, cfg.p_relay);
            if (p.scheduler == cfg.scheduler && p.duplex == cfg.duplex && p.protocol == cfg.protocol)
                return "B" + std::to_string(i);
        }
        return long_name(cfg);
    }

    BaselineConfig baseline_from_name(const std::string &name, double p_src, double p_relay)
    {
        if (name.size() == 2 && name[0] == 'B' && name[1] >= '1' && name[1] <= '5')
            return baseline_preset(name[1] - '0', p_src, p_relay);
        for (auto s : {Scheduler::backpressure, Scheduler::csit_only})
            for (auto d : {Duplex::half, Duplex::full})
                for (auto p : {Protocol::bdf, Protocol::df})
                {
                    BaselineConfig c{s, d, p, p_src, p_relay};
                    if (long_name(c) == name)
                        return c;
                }
        throw std::invalid_argument("unknown baseline '" + name +
                                    "' (expected B1..B5 or <backpressure|csit_only>-<half|full>-<bdf|df>)");
    }

    double df_rate_bits(double sr_bits, double rd_bits, Duplex duplex)
    {
        const double r = std::min(sr_bits, rd_bits);
        return duplex == Duplex::half ? 0.5 * r : r;
    }

    namespace
    {
        struct Link
        {
            bool active = false;
            std::size_t relay = 0;
            std::size_t streams = 0;
            double bits = 0.0;
            double power = 0.0;
            ComplexMatrix decorrelator;
        };

        Link make_link(const EigenModes &modes, std::size_t relay, std::size_t streams, double power,
                       double frame_symbols)
        {
            const LinkDesign d = allocate_link(modes, std::min(streams, modes.gains.size()), power, frame_symbols);
            return Link{true, relay, streams, d.rate_bits_per_frame, d.total_power, d.decorrelator};
        }

        /// Enumerates every feasible BDF (S-R, R-D) pair, including idle links,
        /// and keeps the first strict maximizer of `score`.
        template <class Score>
        AuctionOutcome enumerate_bdf(const QueueState &q, const GlobalCsi &csi, const BaselineConfig &cfg,
                                     const AuctionParams &phy, Score &&score)
        {
            const std::size_t m_count = phy.dims.relays;
            const std::size_t n_t = phy.dims.tx_antennas;
            const std::size_t n_r = phy.dims.rx_antennas;
            const std::size_t n_min = phy.dims.max_streams();
            const bool full = cfg.duplex == Duplex::full;
            const int nq = phy.buffer_size;

            std::vector<Link> sr_options{Link{}};
            for (std::size_t m = 0; m < m_count; ++m)
            {
                const EigenModes modes = eigen_modes(csi.h_sr[m]);
                for (std::size_t k = 1; k <= n_min; ++k)
                    sr_options.push_back(make_link(modes, m, k, cfg.p_src, phy.frame_symbols));
            }
            std::vector<EigenModes> rd_free;
            for (std::size_t n = 0; n < m_count; ++n)
                rd_free.push_back(eigen_modes(csi.h_rd[n]));

            AuctionOutcome best;
            double best_score = 0.0;
            int skipped = 0;
            for (const Link &sr : sr_options)
            {
                int sr_pk = 0;
                if (sr.active)
                    sr_pk = std::min(packets_from_bits(sr.bits, phy.packet_bits), q.q_s);

                std::vector<Link> rd_options{Link{}};
                for (std::size_t n = 0; n < m_count; ++n)
                {
                    if (sr.active && n == sr.relay && !full)
                        continue;
                    if (!sr.active || full)
                    {
                        rd_options.push_back(make_link(rd_free[n], n, std::min(n_t, n_r), cfg.p_relay,
                                                       phy.frame_symbols));
                        continue;
                    }
                    const std::size_t n_rd = std::min(n_t, n_r - sr.streams);
                    if (n_rd == 0)
                        continue;
                    try
                    {
                        const EigenModes modes = nulled_modes(csi.h_rd[n], csi.h_rr[n][sr.relay], sr.decorrelator);
                        if (!modes.gains.empty())
                            rd_options.push_back(make_link(modes, n, n_rd, cfg.p_relay, phy.frame_symbols));
                    }
                    catch (const NullingInfeasible &)
                    {
                        ++skipped;
                    }
                }

                for (const Link &rd : rd_options)
                {
                    int rd_pk = 0;
                    if (rd.active)
                        rd_pk = std::min(packets_from_bits(rd.bits, phy.packet_bits), q.q_relay[rd.relay]);
                    int sr_cap = sr_pk;
                    if (sr.active)
                    {
                        const int room = nq - q.q_relay[sr.relay] + (rd.active && rd.relay == sr.relay ? rd_pk : 0);
                        sr_cap = std::max(0, std::min(sr_pk, room));
                    }
                    const double s = score(sr, sr_cap, rd, rd_pk);
                    if (s > best_score)
                    {
                        best_score = s;
                        best = AuctionOutcome{};
                        if (sr.active)
                        {
                            best.m_star = sr.relay;
                            best.n_sr_star = sr.streams;
                            best.sr_power = sr.power;
                            best.sr_rate = sr.bits;
                            best.sr_packets = sr_cap;
                        }
                        if (rd.active)
                        {
                            best.n_star = rd.relay;
                            best.n_rd_star = rd.streams;
                            best.rd_power = rd.power;
                            best.rd_rate = rd.bits;
                            best.rd_packets = rd_pk;
                        }
                    }
                }
            }
            best.skipped_pairs = skipped;
            return best;
        }

        template <class Score>
        AuctionOutcome enumerate_df(const QueueState &q, const GlobalCsi &csi, const BaselineConfig &cfg,
                                    const AuctionParams &phy, Score &&score)
        {
            const std::size_t n_min = phy.dims.max_streams();
            const double share = cfg.duplex == Duplex::half ? 0.5 : 1.0;
            AuctionOutcome best;
            double best_score = 0.0;
            for (std::size_t m = 0; m < phy.dims.relays; ++m)
            {
                const Link sr = make_link(eigen_modes(csi.h_sr[m]), m, n_min, cfg.p_src, phy.frame_symbols);
                const Link rd = make_link(eigen_modes(csi.h_rd[m]), m, n_min, cfg.p_relay, phy.frame_symbols);
                const double bits = df_rate_bits(sr.bits, rd.bits, cfg.duplex);
                const int pk = std::min(packets_from_bits(bits, phy.packet_bits), q.q_s);
                const double s = score(bits, pk);
                if (pk > 0 && s > best_score)
                {
                    best_score = s;
                    best = AuctionOutcome{};
                    best.m_star = m;
                    best.n_star = m;
                    best.n_sr_star = best.n_rd_star = n_min;
                    best.sr_power = share * sr.power;
                    best.rd_power = share * rd.power;
                    best.sr_rate = best.rd_rate = bits;
                    best.sr_packets = best.rd_packets = pk;
                    best.forward_through = true;
                }
            }
            return best;
        }
    } // namespace

    AuctionOutcome backpressure_decide(const QueueState &q, const GlobalCsi &csi, const BaselineConfig &cfg,
                                       const AuctionParams &phy)
    {
        if (cfg.scheduler != Scheduler::backpressure)
            throw std::invalid_argument("backpressure_decide: configuration is not a backpressure scheduler");
        if (cfg.protocol == Protocol::df)
            return enumerate_df(q, csi, cfg, phy, [&](double, int pk) { return double(q.q_s) * pk; });
        return enumerate_bdf(q, csi, cfg, phy, [&](const Link &sr, int sr_pk, const Link &rd, int rd_pk) {
            double w = 0.0;
            if (sr.active)
                w += std::max(0, q.q_s - q.q_relay[sr.relay]) * double(sr_pk);
            if (rd.active)
                w += double(q.q_relay[rd.relay]) * rd_pk;
            return w;
        });
    }

    AuctionOutcome csit_only_decide(const GlobalCsi &csi, const QueueState &q, const BaselineConfig &cfg,
                                    const AuctionParams &phy)
    {
        if (cfg.scheduler != Scheduler::csit_only)
            throw std::invalid_argument("csit_only_decide: configuration is not a CSIT-only scheduler");
        if (cfg.protocol == Protocol::df)
            return enumerate_df(q, csi, cfg, phy, [](double bits, int) { return bits; });
        return enumerate_bdf(q, csi, cfg, phy, [](const Link &sr, int sr_pk, const Link &rd, int rd_pk) {
            double r = 0.0;
            if (sr.active && sr_pk > 0)
                r += sr.bits;
            if (rd.active && rd_pk > 0)
                r += rd.bits;
            return r;
        });
    }

    AuctionOutcome baseline_decide(const QueueState &q, const GlobalCsi &csi, const BaselineConfig &cfg,
                                   const AuctionParams &phy)
    {
        return cfg.scheduler == Scheduler::backpressure ? backpressure_decide(q, csi, cfg, phy)
                                                        : csit_only_decide(csi, q, cfg, phy);
    }

} // namespace bdfrelay
