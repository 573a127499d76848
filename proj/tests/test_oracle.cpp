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

#include "bdfrelay/oracle.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

using namespace bdfrelay;

namespace
{
    /// One queue of size n, Bernoulli(p) arrivals, one CSI state. Action 0
    /// idles at cost q; action 1 (q > 0 only) serves one packet at cost
    /// q + serve_cost.
    FiniteMdp single_queue(int n, double p, double serve_cost, bool serve_only = false)
    {
        FiniteMdp mdp;
        mdp.states = static_cast<std::size_t>(n) + 1;
        mdp.relays = 0;
        mdp.csi_weights = {1.0};
        mdp.actions.resize(mdp.states);
        for (int q = 0; q <= n; ++q)
        {
            mdp.occupancy.push_back(q);
            mdp.src_full.push_back(q == n ? 1 : 0);
            auto &acts = mdp.actions[static_cast<std::size_t>(q)];
            acts.resize(1);
            auto successor = [&](int base, double cost) {
                MdpAction a;
                a.cost = cost;
                const auto lo = static_cast<std::uint32_t>(base);
                const auto hi = static_cast<std::uint32_t>(std::min(base + 1, n));
                if (p < 1.0)
                    a.next.emplace_back(lo, 1.0 - p);
                if (p > 0.0)
                {
                    if (hi == lo && !a.next.empty())
                        a.next.back().second += p;
                    else
                        a.next.emplace_back(hi, p);
                }
                return a;
            };
            if (!serve_only || q == 0)
                acts[0].push_back(successor(q, q));
            if (q > 0)
                acts[0].push_back(successor(q - 1, q + serve_cost));
        }
        return mdp;
    }

    RelayInstanceSpec tiny_spec()
    {
        RelayInstanceSpec spec;
        spec.dims = NetworkDims{2, 1, 2};
        spec.buffer_size = 2;
        spec.packet_bits = 10000.0;
        spec.frame_symbols = 5000.0;
        spec.arrival = ArrivalModel{ArrivalKind::bernoulli, 0.8};
        Rng rng(7);
        spec.csi = make_discrete_csi(spec.dims, 2, rng);
        return spec;
    }

    double lagrangian(const PolicyEvaluation &e, const FiniteMdp &mdp, const LagrangeMultipliers &lm)
    {
        double c = e.avg_occupancy + lm.gamma_sd * e.drop_rate + lm.gamma_sp * e.avg_power_src;
        for (std::size_t m = 0; m < e.avg_power_relay.size(); ++m)
            c += lm.gamma_rp[m] * e.avg_power_relay[m];
        (void)mdp;
        return c;
    }
} // namespace

TEST(Mdp, ValidateCatchesBadRows)
{
    FiniteMdp mdp = single_queue(3, 0.5, 1.0);
    EXPECT_NO_THROW(validate(mdp));
    mdp.actions[1][0][0].next[0].second += 1e-9;
    EXPECT_THROW(validate(mdp), std::invalid_argument);
    mdp = single_queue(3, 0.5, 1.0);
    mdp.csi_weights = {0.5};
    EXPECT_THROW(validate(mdp), std::invalid_argument);
    mdp = single_queue(3, 0.5, 1.0);
    mdp.actions[2][0].clear();
    EXPECT_THROW(validate(mdp), std::invalid_argument);
}

TEST(Rvi, BirthDeathClosedForm)
{
    // Always serving: the chain lives on {0, 1} with P[Q = 1] = p.
    for (double p : {0.2, 0.5, 0.8})
    {
        const SolveResult r = relative_value_iteration(single_queue(4, p, 0.0, true));
        EXPECT_NEAR(r.theta, p, 1e-9);
        EXPECT_LE(r.final_span, 1e-9);
    }
}

TEST(Rvi, ZeroArrivalsCostNothing)
{
    const FiniteMdp mdp = single_queue(3, 0.0, 0.5);
    const SolveResult r = relative_value_iteration(mdp);
    EXPECT_NEAR(r.theta, 0.0, 1e-9);
    EXPECT_EQ(r.value[mdp.reference], 0.0);
}

TEST(Rvi, MatchesBruteForcePolicyEnumeration)
{
    for (double serve_cost : {0.0, 1.5, 4.0})
    {
        const FiniteMdp mdp = single_queue(3, 0.6, serve_cost);
        const SolveResult r = relative_value_iteration(mdp);
        double best = std::numeric_limits<double>::infinity();
        // States 1..3 choose idle (0) or serve (1); state 0 can only idle.
        for (unsigned code = 0; code < 8; ++code)
        {
            Policy p(4, std::vector<std::uint32_t>(1, 0));
            for (unsigned s = 1; s <= 3; ++s)
                p[s][0] = (code >> (s - 1)) & 1u;
            try
            {
                best = std::min(best, evaluate_policy(mdp, p, 0.6).avg_cost);
            }
            catch (const MultichainError &)
            {
            }
        }
        EXPECT_NEAR(r.theta, best, 1e-8) << "serve_cost " << serve_cost;
        EXPECT_NEAR(evaluate_policy(mdp, r.policy, 0.6).avg_cost, r.theta, 1e-8);
    }
}

TEST(Rvi, SpanTraceIsNonincreasing)
{
    const SolveResult r = relative_value_iteration(single_queue(5, 0.7, 2.0));
    ASSERT_FALSE(r.span_trace.empty());
    for (std::size_t i = 1; i < r.span_trace.size(); ++i)
        EXPECT_LE(r.span_trace[i], r.span_trace[i - 1] + 1e-12);
}

TEST(Rvi, IterationCapRaisesWithTrace)
{
    RviOptions o;
    o.max_iterations = 2;
    o.tolerance = 1e-15;
    try
    {
        relative_value_iteration(single_queue(5, 0.7, 2.0), o);
        FAIL();
    }
    catch (const SolverError &e)
    {
        EXPECT_EQ(e.span_trace().size(), 2u);
    }
}

TEST(EvaluatePolicy, IdleSaturates)
{
    // Never serving: Q_S climbs to N_Q and stays, delay = N_Q / lambda.
    const FiniteMdp mdp = single_queue(3, 0.5, 1.0);
    const Policy idle(4, std::vector<std::uint32_t>(1, 0));
    const PolicyEvaluation e = evaluate_policy(mdp, idle, 0.5);
    EXPECT_NEAR(e.drop_rate, 1.0, 1e-12);
    EXPECT_NEAR(e.avg_occupancy, 3.0, 1e-12);
    EXPECT_NEAR(e.avg_delay, 6.0, 1e-12);
}

TEST(EvaluatePolicy, UniformChain)
{
    // Two states swapping deterministically: stationary (1/2, 1/2).
    FiniteMdp mdp;
    mdp.states = 2;
    mdp.csi_weights = {1.0};
    mdp.occupancy = {1.0, 3.0};
    mdp.src_full = {0, 1};
    mdp.actions = {{{MdpAction{5.0, {{1, 1.0}}, 2.0}}}, {{MdpAction{7.0, {{0, 1.0}}, 4.0}}}};
    const PolicyEvaluation e = evaluate_policy(mdp, Policy(2, std::vector<std::uint32_t>{0}), 1.0);
    EXPECT_NEAR(e.avg_cost, 6.0, 1e-12);
    EXPECT_NEAR(e.avg_occupancy, 2.0, 1e-12);
    EXPECT_NEAR(e.drop_rate, 0.5, 1e-12);
    EXPECT_NEAR(e.avg_power_src, 3.0, 1e-12);
}

TEST(EvaluatePolicy, MultichainIsReported)
{
    FiniteMdp mdp;
    mdp.states = 2;
    mdp.csi_weights = {1.0};
    mdp.occupancy = {0.0, 1.0};
    mdp.src_full = {0, 0};
    mdp.actions = {{{MdpAction{0.0, {{0, 1.0}}}}}, {{MdpAction{1.0, {{1, 1.0}}}}}};
    const Policy p(2, std::vector<std::uint32_t>{0});
    EXPECT_EQ(closed_classes(mdp, p).size(), 2u);
    try
    {
        evaluate_policy(mdp, p, 1.0);
        FAIL();
    }
    catch (const MultichainError &e)
    {
        EXPECT_EQ(e.closed_classes().size(), 2u);
    }
}

TEST(DiscreteCsi, ProductOfPerLinkDraws)
{
    Rng rng(3);
    const NetworkDims dims{2, 1, 2};
    EXPECT_EQ(discrete_csi_links(dims), 6u);
    const DiscreteCsi c = make_discrete_csi(dims, 2, rng);
    EXPECT_EQ(c.states.size(), 64u);
    EXPECT_NEAR(std::accumulate(c.weights.begin(), c.weights.end(), 0.0), 1.0, 1e-12);
    EXPECT_THROW(make_discrete_csi(dims, 0, rng), std::invalid_argument);
}

TEST(RelayInstance, StateIndexRoundTrip)
{
    const RelayInstance inst(tiny_spec());
    EXPECT_EQ(inst.num_states(), 27u);
    EXPECT_EQ(queue_state_count(2, 2), 27u);
    for (std::size_t s = 0; s < inst.num_states(); ++s)
        EXPECT_EQ(inst.index(inst.state(s)), s);
    EXPECT_THROW(inst.state(27), std::out_of_range);
}

TEST(RelayInstance, StateCapRefusesLargeInstances)
{
    RelayInstanceSpec spec = tiny_spec();
    spec.buffer_size = 10;
    spec.state_cap = 1000;
    try
    {
        RelayInstance inst(spec);
        FAIL();
    }
    catch (const StateSpaceTooLarge &e)
    {
        EXPECT_EQ(e.states(), 1331u);
    }
}

TEST(RelayInstance, KernelRowsAndIdleAction)
{
    const RelayInstance inst(tiny_spec());
    const FiniteMdp mdp = inst.build_mdp(LagrangeMultipliers::uniform(2, 1.0));
    EXPECT_NO_THROW(validate(mdp));
    // Idle at Q = (1 | 0, 2): Q_S moves to 2 with the arrival probability.
    const std::size_t s = inst.index(QueueState{1, {0, 2}});
    for (std::size_t k = 0; k < inst.num_csi(); ++k)
    {
        const MdpAction &idle = mdp.actions[s][k][0];
        EXPECT_EQ(idle.cost, 3.0);
        ASSERT_EQ(idle.next.size(), 2u);
        EXPECT_EQ(idle.next[0].first, s);
        EXPECT_NEAR(idle.next[0].second, 0.2, 1e-15);
        EXPECT_EQ(idle.next[1].first, inst.index(QueueState{2, {0, 2}}));
        EXPECT_NEAR(idle.next[1].second, 0.8, 1e-15);
    }
}

TEST(RelayInstance, OutcomeMatchRoundTrip)
{
    const RelayInstance inst(tiny_spec());
    const QueueState q{2, {1, 1}};
    for (std::size_t k = 0; k < inst.num_csi(); k += 9)
        for (std::uint32_t a = 0; a < inst.actions(k).size(); ++a)
            EXPECT_EQ(inst.match(k, inst.outcome(k, a, q)), a);
    AuctionOutcome bogus;
    bogus.m_star = 0;
    bogus.n_sr_star = 1;
    bogus.sr_power = 3.3;
    EXPECT_THROW(inst.match(0, bogus), std::exception);
}

TEST(RelayInstance, TinyFixtureIsReproducible)
{
    const RelayInstance inst(tiny_spec());
    const LagrangeMultipliers lm = LagrangeMultipliers::uniform(2, 1.0);
    const FiniteMdp mdp = inst.build_mdp(lm);
    const SolveResult a = relative_value_iteration(mdp);
    const SolveResult b = relative_value_iteration(inst.build_mdp(lm));
    EXPECT_EQ(a.theta, b.theta);
    EXPECT_EQ(a.value, b.value);
    EXPECT_NEAR(a.theta, 3.000000000488, 1e-9);
    EXPECT_LE(a.final_span, 1e-9);
    const PolicyEvaluation e = evaluate_policy(mdp, a.policy, 0.8);
    EXPECT_NEAR(e.avg_cost, a.theta, 1e-8);
    EXPECT_NEAR(lagrangian(e, mdp, lm), a.theta, 1e-8);
}

TEST(BellmanResidual, OffsetRemovedResiduals)
{
    const RelayInstance inst(tiny_spec());
    const FiniteMdp mdp = inst.build_mdp(LagrangeMultipliers::uniform(2, 1.0));
    const BellmanResidual r = bellman_residual(inst, mdp, PerNodeValueTable(2, 2));
    ASSERT_EQ(r.residuals.size(), 6u);
    EXPECT_NEAR(std::accumulate(r.residuals.begin(), r.residuals.end(), 0.0), 0.0, 1e-12);
    double worst = 0.0;
    for (double x : r.residuals)
        worst = std::max(worst, std::abs(x));
    EXPECT_DOUBLE_EQ(r.max_residual, worst);
    EXPECT_THROW(bellman_residual(inst, mdp, PerNodeValueTable(2, 3)), std::invalid_argument);
}
