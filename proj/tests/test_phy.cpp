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

#include "bdfrelay/phy.hpp"
#include "test_support.hpp"

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numeric>

using namespace bdfrelay;
using bdfrelay::testing::max_abs_offdiagonal;
using bdfrelay::testing::random_matrix;

namespace
{
    ComplexMatrix reconstruct(const SvdResult &s)
    {
        return s.u * ComplexMatrix::diagonal(s.sigma) * s.v.adjoint();
    }

    double sum(const std::vector<double> &v) { return std::accumulate(v.begin(), v.end(), 0.0); }
} // namespace

TEST(Svd, IdentityHasUnitSingularValues)
{
    const SvdResult s = svd(ComplexMatrix::identity(2));
    ASSERT_EQ(s.sigma.size(), 2u);
    EXPECT_NEAR(s.sigma[0], 1.0, 1e-14);
    EXPECT_NEAR(s.sigma[1], 1.0, 1e-14);
    EXPECT_LT((reconstruct(s) - ComplexMatrix::identity(2)).frobenius_norm(), 1e-14);
    // U = V up to a common phase per column.
    EXPECT_LT((s.u - s.v).frobenius_norm(), 1e-14);
}

TEST(Svd, DiagonalIsSorted)
{
    const std::vector<double> d{1.0, 3.0};
    const SvdResult s = svd(ComplexMatrix::diagonal(d));
    EXPECT_NEAR(s.sigma[0], 3.0, 1e-14);
    EXPECT_NEAR(s.sigma[1], 1.0, 1e-14);
}

TEST(Svd, RandomTallMatrixReconstructs)
{
    Rng rng(11);
    for (int trial = 0; trial < 200; ++trial)
    {
        const ComplexMatrix a = random_matrix(rng, 4, 2);
        const SvdResult s = svd(a);
        EXPECT_LE((a - reconstruct(s)).frobenius_norm(), 1e-10);
        EXPECT_LE(orthonormality_defect(s.u), 1e-10);
        EXPECT_LE(orthonormality_defect(s.v), 1e-10);
        EXPECT_GE(s.sigma[0], s.sigma[1]);
    }
}

TEST(Svd, WideAndRankDeficientShapes)
{
    Rng rng(12);
    const ComplexMatrix wide = random_matrix(rng, 2, 4);
    SvdResult s = svd(wide);
    EXPECT_LE((wide - reconstruct(s)).frobenius_norm(), 1e-10);

    // Rank one: outer product of two vectors.
    const ComplexMatrix x = random_matrix(rng, 3, 1), y = random_matrix(rng, 1, 3);
    const ComplexMatrix r1 = x * y;
    s = svd(r1);
    EXPECT_LE((r1 - reconstruct(s)).frobenius_norm(), 1e-10);
    EXPECT_LE(s.sigma[1], 1e-12 * s.sigma[0]);

    s = svd(ComplexMatrix::zeros(2, 3));
    for (double v : s.sigma)
        EXPECT_EQ(v, 0.0);
}

TEST(NullSpace, ZeroRowSpansEverything)
{
    const ComplexMatrix n = null_space(ComplexMatrix::zeros(1, 3));
    EXPECT_EQ(n.rows(), 3u);
    EXPECT_EQ(n.cols(), 3u);
    EXPECT_LE(orthonormality_defect(n), 1e-12);
}

TEST(NullSpace, FullRankIsEmpty)
{
    const ComplexMatrix n = null_space(ComplexMatrix::identity(2));
    EXPECT_EQ(n.rows(), 2u);
    EXPECT_EQ(n.cols(), 0u);
}

TEST(NullSpace, RowVectorLeavesOrthogonalDirection)
{
    const double h = 1.0 / std::sqrt(2.0);
    const ComplexMatrix a(1, 2, {h, h});
    const ComplexMatrix n = null_space(a);
    ASSERT_EQ(n.cols(), 1u);
    EXPECT_LE((a * n).frobenius_norm(), 1e-14);
    // Proportional to (1, -1) / sqrt(2).
    EXPECT_NEAR(std::abs(n(0, 0)), h, 1e-14);
    EXPECT_NEAR(std::abs(n(0, 0) + n(1, 0)), 0.0, 1e-14);
}

TEST(NullSpace, RandomWideMatrix)
{
    Rng rng(13);
    for (int trial = 0; trial < 100; ++trial)
    {
        const ComplexMatrix a = random_matrix(rng, 2, 4);
        const ComplexMatrix n = null_space(a);
        ASSERT_EQ(n.cols(), 2u);
        EXPECT_LE((a * n).frobenius_norm(), 1e-9);
        EXPECT_LE(orthonormality_defect(n), 1e-10);
    }
}

TEST(WaterFill, SingleStreamTakesAllPower)
{
    const std::vector<double> g{1.0};
    const WaterFillAllocation w = water_fill(g, 5.0);
    EXPECT_DOUBLE_EQ(w.stream_powers[0], 5.0);
    EXPECT_DOUBLE_EQ(w.water_level, 6.0);
    EXPECT_EQ(w.active_streams, 1u);
}

TEST(WaterFill, TwoActiveStreams)
{
    // 2 mu - 1/4 - 1 = 1 gives mu = 1.125.
    const std::vector<double> g{4.0, 1.0};
    const WaterFillAllocation w = water_fill(g, 1.0);
    EXPECT_NEAR(w.water_level, 1.125, 1e-15);
    EXPECT_NEAR(w.stream_powers[0], 0.875, 1e-15);
    EXPECT_NEAR(w.stream_powers[1], 0.125, 1e-15);
    EXPECT_NEAR(w.achieved_rate, std::log2(1.0 + 4.0 * 0.875) + std::log2(1.0 + 0.125), 1e-14);
}

TEST(WaterFill, WeakStreamStaysInactive)
{
    // mu = 0.75 < 1 / 0.1, so the KKT conditions clamp stream 2.
    const std::vector<double> g{4.0, 0.1};
    const WaterFillAllocation w = water_fill(g, 0.5);
    EXPECT_NEAR(w.stream_powers[0], 0.5, 1e-15);
    EXPECT_EQ(w.stream_powers[1], 0.0);
    EXPECT_NEAR(w.water_level, 0.75, 1e-15);
    EXPECT_EQ(w.active_streams, 1u);
}

TEST(WaterFill, ZeroGainsAndZeroPower)
{
    const std::vector<double> zero{0.0, 0.0};
    const WaterFillAllocation a = water_fill(zero, 3.0);
    EXPECT_EQ(a.active_streams, 0u);
    EXPECT_EQ(a.achieved_rate, 0.0);

    const std::vector<double> g{2.0, 1.0};
    const WaterFillAllocation b = water_fill(g, 0.0);
    EXPECT_EQ(sum(b.stream_powers), 0.0);
    EXPECT_EQ(b.achieved_rate, 0.0);
}

TEST(WaterFill, RejectsBadInput)
{
    const std::vector<double> unsorted{1.0, 2.0};
    EXPECT_THROW(water_fill(unsorted, 1.0), std::invalid_argument);
    const std::vector<double> negative{1.0, -1.0};
    EXPECT_THROW(water_fill(negative, 1.0), std::invalid_argument);
    const std::vector<double> g{1.0};
    EXPECT_THROW(water_fill(g, -1.0), std::invalid_argument);
    EXPECT_THROW(water_fill(g, std::numeric_limits<double>::infinity()), std::invalid_argument);
}

TEST(WaterFill, KktConditionsOnRandomGains)
{
    Rng rng(14);
    std::uniform_real_distribution<double> u(0.01, 10.0), pw(0.0, 50.0);
    for (int trial = 0; trial < 1000; ++trial)
    {
        std::vector<double> g(1 + trial % 4);
        for (double &x : g)
            x = u(rng);
        std::sort(g.begin(), g.end(), std::greater<>());
        const double p = pw(rng);
        const WaterFillAllocation w = water_fill(g, p);
        EXPECT_NEAR(sum(w.stream_powers), p, 1e-9 * (1.0 + p));
        for (std::size_t j = 0; j < g.size(); ++j)
        {
            // p_j (mu - 1/g_j - p_j) = 0 and mu <= 1/g_j for inactive streams.
            EXPECT_LE(std::abs(w.stream_powers[j] * (w.water_level - 1.0 / g[j] - w.stream_powers[j])), 1e-9);
            if (w.stream_powers[j] == 0.0 && p > 0.0)
                EXPECT_LE(w.water_level, 1.0 / g[j] + 1e-12);
        }
    }
}

TEST(PowerForRate, InvertsWaterFilling)
{
    Rng rng(15);
    std::uniform_real_distribution<double> u(0.01, 10.0), pw(0.0, 100.0);
    for (int trial = 0; trial < 1000; ++trial)
    {
        std::vector<double> g(1 + trial % 4);
        for (double &x : g)
            x = u(rng);
        std::sort(g.begin(), g.end(), std::greater<>());
        const double p = pw(rng);
        const double rate = water_fill(g, p).achieved_rate;
        EXPECT_NEAR(power_for_rate(g, rate), p, 1e-9 * (1.0 + p));
    }
}

TEST(PowerForRate, Limits)
{
    const std::vector<double> g{4.0, 1.0};
    EXPECT_EQ(power_for_rate(g, 0.0), 0.0);
    // One stream at gain 4 reaching 1 bit needs p = (2 - 1) / 4.
    EXPECT_NEAR(power_for_rate(g, 1.0), 0.25, 1e-15);
    const std::vector<double> zero{0.0};
    EXPECT_TRUE(std::isinf(power_for_rate(zero, 1.0)));
    EXPECT_THROW(power_for_rate(g, -1.0), std::invalid_argument);
}

TEST(SrLink, BeamformsOnTopMode)
{
    const std::vector<double> d{2.0, 1.0};
    const double symbols = 5000.0;
    const LinkDesign l = design_sr_link(ComplexMatrix::diagonal(d), 1, 1.0, symbols);
    EXPECT_NEAR(l.rate_bits_per_frame, symbols * std::log2(5.0), 1e-9);
    EXPECT_NEAR(std::abs(l.precoder(0, 0)), 1.0, 1e-14);
    EXPECT_NEAR(std::abs(l.precoder(1, 0)), 0.0, 1e-14);
    EXPECT_EQ(l.decorrelator.rows(), 1u);
}

TEST(SrLink, ZeroPowerGivesZeroPrecoder)
{
    Rng rng(16);
    const LinkDesign l = design_sr_link(random_matrix(rng, 4, 2), 2, 0.0, 5000.0);
    EXPECT_EQ(l.rate_bits_per_frame, 0.0);
    EXPECT_EQ(l.precoder.frobenius_norm(), 0.0);
}

TEST(SrLink, PowerAndDiagonalization)
{
    Rng rng(17);
    for (int trial = 0; trial < 200; ++trial)
    {
        const ComplexMatrix h = random_matrix(rng, 4, 2);
        const LinkDesign l = design_sr_link(h, 2, 3.0, 5000.0);
        EXPECT_NEAR(l.total_power, 3.0, 1e-9);
        EXPECT_NEAR((l.precoder * l.precoder.adjoint()).trace().real(), 3.0, 1e-9);
        const ComplexMatrix eff = l.decorrelator * h * l.precoder;
        EXPECT_LE(max_abs_offdiagonal(eff), 1e-9);
        EXPECT_NEAR(l.rate_bits_per_frame / 5000.0, mutual_info(h, l.precoder), 1e-9);
    }
}

TEST(SrLink, StreamCountBeyondRankThrows)
{
    Rng rng(18);
    EXPECT_THROW(design_sr_link(random_matrix(rng, 4, 2), 3, 1.0, 5000.0), RankError);
}

TEST(RdLink, EmptyDecorrelatorIsUnconstrained)
{
    Rng rng(19);
    const ComplexMatrix h_nd = random_matrix(rng, 2, 4), h_nm = random_matrix(rng, 4, 4);
    const LinkDesign constrained = design_rd_link(h_nd, h_nm, ComplexMatrix{}, 2, 5.0, 5000.0);
    const LinkDesign free = allocate_link(eigen_modes(h_nd), 2, 5.0, 5000.0);
    EXPECT_NEAR(constrained.rate_bits_per_frame, free.rate_bits_per_frame, 1e-8);
}

TEST(RdLink, NullsInterferenceAtReceivingRelay)
{
    Rng rng(20);
    for (int trial = 0; trial < 200; ++trial)
    {
        const ComplexMatrix h_sm = random_matrix(rng, 4, 2);
        const ComplexMatrix g_m = design_sr_link(h_sm, 2, 1.0, 5000.0).decorrelator;
        const ComplexMatrix h_nd = random_matrix(rng, 2, 4), h_nm = random_matrix(rng, 4, 4);
        const LinkDesign l = design_rd_link(h_nd, h_nm, g_m, 2, 4.0, 5000.0);
        EXPECT_LE((g_m * h_nm * l.precoder).frobenius_norm(), 1e-9);
        EXPECT_NEAR(l.total_power, 4.0, 1e-9);
        EXPECT_NEAR(l.rate_bits_per_frame / 5000.0, mutual_info(h_nd, l.precoder), 1e-9);
    }
}

TEST(RdLink, ZeroPower)
{
    Rng rng(21);
    const LinkDesign l =
        design_rd_link(random_matrix(rng, 2, 4), random_matrix(rng, 4, 4), ComplexMatrix{}, 2, 0.0, 5000.0);
    EXPECT_EQ(l.rate_bits_per_frame, 0.0);
    EXPECT_EQ(l.precoder.frobenius_norm(), 0.0);
}

TEST(RdLink, TrivialNullSpaceIsInfeasible)
{
    Rng rng(22);
    // Two transmit antennas cannot null a two-stream decorrelator.
    const ComplexMatrix g_m = design_sr_link(random_matrix(rng, 2, 2), 2, 1.0, 5000.0).decorrelator;
    EXPECT_THROW(design_rd_link(random_matrix(rng, 2, 2), random_matrix(rng, 2, 2), g_m, 1, 1.0, 5000.0),
                 NullingInfeasible);
}

TEST(MutualInfo, ClosedForms)
{
    EXPECT_EQ(mutual_info(ComplexMatrix::identity(2), ComplexMatrix::zeros(2, 2)), 0.0);
    const ComplexMatrix h(1, 1, {1.0});
    const ComplexMatrix f(1, 1, {std::sqrt(3.0)});
    EXPECT_NEAR(mutual_info(h, f), 2.0, 1e-15);
}

TEST(MutualInfo, MatchesEigenvalueSum)
{
    Rng rng(23);
    for (int trial = 0; trial < 100; ++trial)
    {
        const ComplexMatrix h = random_matrix(rng, 2, 2), f = random_matrix(rng, 2, 2);
        const ComplexMatrix k = h * f * f.adjoint() * h.adjoint();
        Eigen::Matrix2cd m;
        for (int r = 0; r < 2; ++r)
            for (int c = 0; c < 2; ++c)
                m(r, c) = k(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
        const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(m);
        double expected = 0.0;
        for (int i = 0; i < 2; ++i)
            expected += std::log2(1.0 + es.eigenvalues()(i));
        EXPECT_NEAR(mutual_info(h, f), expected, 1e-10);
    }
}
