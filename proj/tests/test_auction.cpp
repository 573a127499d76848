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
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace bdfrelay;
using bdfrelay::testing::random_matrix;

namespace
{
    PerNodeValueTable linear_table(std::size_t relays, int nq, double src_slope, double relay_slope)
    {
        PerNodeValueTable v(relays, nq);
        for (int q = 1; q <= nq; ++q)
        {
            v.set(source_node, q, src_slope * q);
            for (std::size_t m = 0; m < relays; ++m)
                v.set(relay_node(m), q, relay_slope * q);
        }
        return v;
    }

    AuctionParams default_params(PowerMode mode)
    {
        AuctionParams p;
        p.dims = NetworkDims{2, 2, 4};
        p.buffer_size = 10;
        p.arrival_pmf = arrival_pmf(ArrivalModel{ArrivalKind::poisson, 1.0}, 1e-6, true);
        p.power_mode = mode;
        p.p_max_src = 1000.0;
        p.p_max_relay = 1000.0;
        return p;
    }

    LocalState random_local(Rng &rng, std::size_t relay, int q_s, int q_m)
    {
        LocalState s;
        s.relay = relay;
        s.q_s = q_s;
        s.q_m = q_m;
        s.h_sr = random_matrix(rng, 4, 2);
        s.h_rd = random_matrix(rng, 2, 4);
        s.h_out.resize(2);
        s.h_out[1 - relay] = random_matrix(rng, 4, 4);
        return s;
    }
} // namespace

TEST(ValueTable, PinnedZeroAndBounds)
{
    PerNodeValueTable v(2, 4);
    EXPECT_EQ(v.nodes(), 3u);
    EXPECT_EQ(v(0, 0), 0.0);
    EXPECT_THROW(v.set(1, 0, 1.0), std::invalid_argument);
    EXPECT_NO_THROW(v.set(1, 0, 0.0));
    EXPECT_THROW(v(3, 1), std::out_of_range);
    EXPECT_THROW(v(0, 5), std::out_of_range);
    EXPECT_THROW(v.set(0, 1, std::nan("")), std::invalid_argument);
    EXPECT_THROW(PerNodeValueTable(0, 4), std::invalid_argument);
    EXPECT_THROW(PerNodeValueTable(2, 0), std::invalid_argument);
}

TEST(ValueTable, ClampedAndInterpolatedLookups)
{
    PerNodeValueTable v(2, 4);
    for (int q = 1; q <= 4; ++q)
        v.set(2, q, q * q);
    EXPECT_EQ(v.clamped(2, -3), 0.0);
    EXPECT_EQ(v.clamped(2, 9), 16.0);
    EXPECT_DOUBLE_EQ(v.interpolate(2, 2.5), 6.5);
    EXPECT_DOUBLE_EQ(v.interpolate(2, 4.0), 16.0);
    EXPECT_DOUBLE_EQ(v.interpolate(2, 7.0), 16.0);
    EXPECT_DOUBLE_EQ(v.interpolate(2, -1.0), 0.0);
}

TEST(ValueTable, Derivative)
{
    PerNodeValueTable v(2, 4);
    for (int q = 1; q <= 4; ++q)
        v.set(1, q, q * q);
    EXPECT_DOUBLE_EQ(value_derivative(v, 1, 0), 1.0);
    EXPECT_DOUBLE_EQ(value_derivative(v, 1, 2), 4.0);
    EXPECT_DOUBLE_EQ(value_derivative(v, 1, 4), 7.0);
}

TEST(Multipliers, Uniform)
{
    const LagrangeMultipliers lm = LagrangeMultipliers::uniform(3, 0.5);
    EXPECT_EQ(lm.gamma_rp.size(), 3u);
    EXPECT_TRUE(lm.nonnegative());
    EXPECT_THROW(LagrangeMultipliers::uniform(2, -1.0), std::invalid_argument);
    LagrangeMultipliers bad = lm;
    bad.gamma_rp[1] = -0.1;
    EXPECT_FALSE(bad.nonnegative());
}

TEST(Metrics, SourceRelayFromPackets)
{
    // V_S(q) = 2q, V_1(q) = q, Q = (3 | 1), 2 packets at p = 0.5, gamma_Sp = 2,
    // Bernoulli(0.8) arrivals:
    //   2 * 0.5 + 0.2 (V_S(1) - V_S(3)) + 0.8 (V_S(2) - V_S(4)) + V_1(3) - V_1(1) = -1.
    const PerNodeValueTable v = linear_table(2, 10, 2.0, 1.0);
    LagrangeMultipliers lm = LagrangeMultipliers::uniform(2, 1.0);
    lm.gamma_sp = 2.0;
    const std::vector<double> pmf{0.2, 0.8};
    EXPECT_NEAR(g_sr_from_packets(3, 1, 0, 2, 0.5, v, lm, pmf), -1.0, 1e-15);
    EXPECT_NEAR(g_sr_continuous(3, 1, 0, 2.0, 0.5, v, lm, pmf), -1.0, 1e-15);
    EXPECT_EQ(g_sr_from_packets(3, 1, 0, 0, 0.5, v, lm, pmf), 1.0);
}

TEST(Metrics, RelayDestinationFromPackets)
{
    PerNodeValueTable v(2, 10);
    for (int q = 1; q <= 10; ++q)
        v.set(relay_node(1), q, q * q);
    LagrangeMultipliers lm = LagrangeMultipliers::uniform(2, 1.0);
    lm.gamma_rp[1] = 0.5;
    // 0.5 * 1 + V_2(1) - V_2(3)
    EXPECT_NEAR(g_rd_from_packets(3, 1, 2, 1.0, v, lm), -7.5, 1e-15);
    EXPECT_NEAR(g_rd_continuous(3, 1, 2.0, 1.0, v, lm), -7.5, 1e-15);
    // More packets than queued clamp at V(0).
    EXPECT_NEAR(g_rd_from_packets(3, 1, 7, 1.0, v, lm), 0.5 - 9.0, 1e-15);
}

TEST(ClosedForm, SingleStreamAgainstHandValue)
{
    const PerNodeValueTable v = linear_table(2, 10, 2.0, 1.0);
    LagrangeMultipliers lm = LagrangeMultipliers::uniform(2, 1.0);
    lm.gamma_sp = 2.0;
    const std::vector<double> gains{4.0};
    // slope V'_S - V'_1 = 1, so p = 2 / (2 ln 2) - 1/4.
    EXPECT_NEAR(closed_form_power_sr(v, lm, 3, 1, 0, gains, 2.0), 1.0 / std::numbers::ln2 - 0.25, 1e-14);
    EXPECT_EQ(closed_form_power_sr(v, lm, 3, 1, 0, gains, 0.2), 0.0);
    // V'_1 = 1 at gamma_1p = 1.
    EXPECT_NEAR(closed_form_power_rd(v, lm, 4, 0, gains, 2.0), 2.0 / std::numbers::ln2 - 0.25, 1e-14);
    lm.gamma_sp = 0.0;
    EXPECT_THROW(closed_form_power_sr(v, lm, 3, 1, 0, gains, 2.0), UnconstrainedPower);
}

TEST(ClosedForm, MatchesGoldenSectionOnLinearValues)
{
    // Large buffer, linear values: the continuous metric is
    // gamma p - s c log2(1 + g p), minimized by the closed form.
    const PerNodeValueTable v = linear_table(2, 2000, 2.0, 1.0);
    const LagrangeMultipliers lm = LagrangeMultipliers::uniform(2, 1.0);
    const std::vector<double> pmf{1.0};
    const double c = 3.0;
    for (double g : {0.5, 1.0, 4.0, 9.0})
    {
        const std::vector<double> gains{g};
        const double closed = closed_form_power_sr(v, lm, 1000, 200, 0, gains, c);
        const double golden = golden_section_minimize(
            [&](double p) {
                return g_sr_continuous(1000, 200, 0, c * std::log2(1.0 + g * p), p, v, lm, pmf);
            },
            0.0, 100.0);
        EXPECT_NEAR(golden, closed, 1e-6 * (1.0 + closed));
    }
}

TEST(GoldenSection, QuadraticAndEndpoints)
{
    EXPECT_NEAR(golden_section_minimize([](double x) { return (x - 0.3) * (x - 0.3); }, 0.0, 1.0), 0.3, 1e-6);
    EXPECT_EQ(golden_section_minimize([](double x) { return x; }, 0.0, 1.0), 0.0);
    EXPECT_EQ(golden_section_minimize([](double x) { return -x; }, 0.0, 1.0), 1.0);
}

TEST(PowerModes, NamesRoundTrip)
{
    for (PowerMode m : {PowerMode::closed_form, PowerMode::golden, PowerMode::grid, PowerMode::threshold})
        EXPECT_EQ(power_mode_from_string(to_string(m)), m);
    EXPECT_THROW(power_mode_from_string("newton"), std::invalid_argument);
}

TEST(PowerModes, ValidateRejectsBadGrid)
{
    AuctionParams p = default_params(PowerMode::grid);
    p.levels_src = {1.0, 2.0};
    p.levels_relay = {0.0, 1.0};
    EXPECT_THROW(validate(p), std::invalid_argument);
    p.levels_src = {0.0, 2.0, 2.0};
    EXPECT_THROW(validate(p), std::invalid_argument);
    p.levels_src = {0.0, 2.0};
    EXPECT_NO_THROW(validate(p));
    p.dims.relays = 1;
    EXPECT_THROW(validate(p), std::invalid_argument);
}

TEST(Threshold, BidIsMinimumOverDensePowerGrid)
{
    Rng rng(31);
    const AuctionParams params = default_params(PowerMode::threshold);
    const PerNodeValueTable v = linear_table(2, 10, 6.0, 1.0);
    LagrangeMultipliers lm = LagrangeMultipliers::uniform(2, 0.05);
    for (int trial = 0; trial < 20; ++trial)
    {
        const LocalState local = random_local(rng, 0, 6, 2);
        const FirstStageBid bid = first_stage_bids(local, v, lm, params);
        for (std::size_t n_sr = 1; n_sr <= 2; ++n_sr)
        {
            const SrBidEntry &e = bid.per_nsr[n_sr];
            EXPECT_NEAR(g_sr_metric(local, v, lm, n_sr, e.power, params), e.bid, 1e-9);
            double brute = 0.0;
            for (int i = 0; i <= 20000; ++i)
                brute = std::min(brute, g_sr_metric(local, v, lm, n_sr, i * 0.01, params));
            EXPECT_LE(e.bid, brute + 1e-9);
        }
    }
}

TEST(Threshold, RelayRoomCapsSourceService)
{
    Rng rng(32);
    const AuctionParams params = default_params(PowerMode::threshold);
    const PerNodeValueTable v = linear_table(2, 10, 50.0, 1.0);
    const LagrangeMultipliers lm = LagrangeMultipliers::uniform(2, 1e-3);
    const LocalState local = random_local(rng, 0, 8, 9);
    const FirstStageBid bid = first_stage_bids(local, v, lm, params);
    for (std::size_t n_sr = 1; n_sr <= 2; ++n_sr)
        EXPECT_LE(bid.per_nsr[n_sr].packets, 1);
}

TEST(Auction, TieGoesToLowestRelay)
{
    std::vector<SecondStageBid> bids(2);
    for (std::size_t n = 0; n < 2; ++n)
    {
        bids[n].relay = n;
        bids[n].partner = 1 - n;
        bids[n].total_bid = 1.1;
        bids[n].n_rd = 1;
        bids[n].rd_power = 1.0;
        bids[n].rd_packets = 1;
    }
    const AuctionOutcome o = resolve_auction(bids);
    ASSERT_TRUE(o.n_star.has_value());
    EXPECT_EQ(*o.n_star, 0u);
    EXPECT_FALSE(o.m_star.has_value());
    EXPECT_THROW(resolve_auction(std::span<const SecondStageBid>{}), std::invalid_argument);
}

TEST(Auction, LowestBidWinsAndPartnerReceives)
{
    std::vector<SecondStageBid> bids(3);
    for (std::size_t n = 0; n < 3; ++n)
    {
        bids[n].relay = n;
        bids[n].partner = (n + 1) % 3;
        bids[n].total_bid = -static_cast<double>(n == 1);
        bids[n].n_sr = 1;
        bids[n].sr_power = 2.0;
        bids[n].sr_packets = 3;
    }
    const AuctionOutcome o = resolve_auction(bids);
    EXPECT_EQ(o.m_star, std::optional<std::size_t>(2));
    EXPECT_FALSE(o.n_star.has_value());
    EXPECT_EQ(o.decision().sr_packets, 3);
    EXPECT_EQ(o.winning_bid, -1.0);
}

TEST(Auction, ZeroValuesMeanNoTransmission)
{
    Rng rng(33);
    const NetworkDims dims{2, 2, 4};
    const GlobalCsi csi = sample_csi(rng, dims);
    const PerNodeValueTable v(2, 10);
    const LagrangeMultipliers lm = LagrangeMultipliers::uniform(2, 1.0);
    for (PowerMode mode : {PowerMode::closed_form, PowerMode::golden, PowerMode::threshold})
    {
        const AuctionOutcome o = run_auction(csi, QueueState{5, {5, 5}}, v, lm, default_params(mode));
        EXPECT_FALSE(o.m_star.has_value());
        EXPECT_FALSE(o.n_star.has_value());
    }
}

TEST(Auction, BacklogIsServedAndNullingHolds)
{
    Rng rng(34);
    const NetworkDims dims{2, 2, 4};
    const AuctionParams params = default_params(PowerMode::threshold);
    const PerNodeValueTable v = linear_table(2, 10, 4.0, 1.0);
    const LagrangeMultipliers lm = LagrangeMultipliers::uniform(2, 0.05);
    int served = 0;
    for (int trial = 0; trial < 50; ++trial)
    {
        const GlobalCsi csi = sample_csi(rng, dims);
        const QueueState q{6, {3, 3}};
        const AuctionOutcome o = run_auction(csi, q, v, lm, params);
        if (o.m_star && o.n_star)
            EXPECT_NE(*o.m_star, *o.n_star);
        served += o.sr_packets + o.rd_packets;
        EXPECT_LE(o.sr_packets, q.q_s);
        if (o.n_star)
            EXPECT_LE(o.rd_packets, q.q_relay[*o.n_star]);
    }
    EXPECT_GT(served, 0);
}

TEST(Auction, LocalViewCopiesOwnLinks)
{
    Rng rng(35);
    const GlobalCsi csi = sample_csi(rng, NetworkDims{3, 2, 4});
    const LocalState s = local_view(csi, QueueState{4, {1, 2, 3}}, 2);
    EXPECT_EQ(s.q_s, 4);
    EXPECT_EQ(s.q_m, 3);
    EXPECT_EQ(s.h_sr, csi.h_sr[2]);
    EXPECT_EQ(s.h_out, csi.h_rr[2]);
    EXPECT_THROW(local_view(csi, QueueState{4, {1, 2, 3}}, 3), std::out_of_range);
}
