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

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace bdfrelay
{
    namespace
    {
        constexpr int kMaxSweeps = 80;
        constexpr double kOffDiagonalTol = 1e-14;
        // Singular values below this fraction of the largest one are treated as
        // numerically zero (rank deficiency).
        constexpr double kRankTol = 1e-12;

        // Columns of an m x n matrix stored contiguously for the Jacobi sweeps.
        using Columns = std::vector<std::vector<cplx>>;

        Columns to_columns(const ComplexMatrix &a)
        {
            Columns out(a.cols(), std::vector<cplx>(a.rows()));
            for (std::size_t r = 0; r < a.rows(); ++r)
                for (std::size_t c = 0; c < a.cols(); ++c)
                    out[c][r] = a(r, c);
            return out;
        }

        double squared_norm(const std::vector<cplx> &x)
        {
            double s = 0.0;
            for (const auto &z : x)
                s += std::norm(z);
            return s;
        }

        cplx inner(const std::vector<cplx> &x, const std::vector<cplx> &y)
        {
            cplx s = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i)
                s += std::conj(x[i]) * y[i];
            return s;
        }

        // Hestenes one-sided Jacobi for rows >= cols.
        SvdResult svd_tall(const ComplexMatrix &a)
        {
            const std::size_t m = a.rows();
            const std::size_t n = a.cols();
            Columns w = to_columns(a);
            Columns v(n, std::vector<cplx>(n, 0.0));
            for (std::size_t i = 0; i < n; ++i)
                v[i][i] = 1.0;

            auto rotate = [](std::vector<cplx> &xp, std::vector<cplx> &xq, double c, double s, cplx phase_conj) {
                for (std::size_t i = 0; i < xp.size(); ++i)
                {
                    const cplx p = xp[i];
                    const cplx q = xq[i] * phase_conj;
                    xp[i] = c * p - s * q;
                    xq[i] = s * p + c * q;
                }
            };

            double frob = 0.0;
            for (const auto &col : w)
                frob += squared_norm(col);
            const double negligible = 1e-60 * frob;

            bool converged = (n < 2);
            double worst = 0.0;
            for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep)
            {
                converged = true;
                worst = 0.0;
                for (std::size_t p = 0; p + 1 < n; ++p)
                    for (std::size_t q = p + 1; q < n; ++q)
                    {
                        const double alpha = squared_norm(w[p]);
                        const double beta = squared_norm(w[q]);
                        const cplx gamma = inner(w[p], w[q]);
                        const double g = std::abs(gamma);
                        const double scale = std::sqrt(alpha) * std::sqrt(beta);
                        if (g == 0.0 || std::min(alpha, beta) <= negligible || g <= kOffDiagonalTol * scale)
                            continue;
                        worst = std::max(worst, g / scale);
                        converged = false;
                        const cplx phase_conj = std::conj(gamma / g);
                        const double zeta = (beta - alpha) / (2.0 * g);
                        const double t = (zeta >= 0.0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                        const double c = 1.0 / std::sqrt(1.0 + t * t);
                        const double s = c * t;
                        rotate(w[p], w[q], c, s, phase_conj);
                        rotate(v[p], v[q], c, s, phase_conj);
                    }
            }
            if (!converged)
                throw SvdError("svd: Jacobi sweeps did not converge, off-diagonal ratio " + std::to_string(worst),
                               worst);

            std::vector<double> norms(n);
            for (std::size_t j = 0; j < n; ++j)
                norms[j] = std::sqrt(squared_norm(w[j]));
            std::vector<std::size_t> order(n);
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::stable_sort(order.begin(), order.end(),
                             [&](std::size_t x, std::size_t y) { return norms[x] > norms[y]; });

            SvdResult out{ComplexMatrix(m, n), std::vector<double>(n), ComplexMatrix(n, n)};
            const double sigma_max = n > 0 ? norms[order[0]] : 0.0;
            std::vector<std::vector<cplx>> ucols;
            std::vector<std::size_t> deficient;
            for (std::size_t k = 0; k < n; ++k)
            {
                const std::size_t j = order[k];
                out.sigma[k] = norms[j];
                for (std::size_t i = 0; i < n; ++i)
                    out.v(i, k) = v[j][i];
                if (sigma_max > 0.0 && norms[j] > 1e-13 * sigma_max)
                {
                    std::vector<cplx> u = w[j];
                    for (auto &z : u)
                        z /= norms[j];
                    ucols.push_back(std::move(u));
                }
                else
                {
                    ucols.emplace_back();
                    deficient.push_back(k);
                }
            }
            // Complete left vectors of (numerically) zero singular values with
            // Gram-Schmidt over the standard basis.
            for (std::size_t k : deficient)
            {
                for (std::size_t e = 0; e < m; ++e)
                {
                    std::vector<cplx> cand(m, 0.0);
                    cand[e] = 1.0;
                    for (int pass = 0; pass < 2; ++pass)
                        for (std::size_t o = 0; o < n; ++o)
                        {
                            if (ucols[o].empty() || o == k)
                                continue;
                            const cplx proj = inner(ucols[o], cand);
                            for (std::size_t i = 0; i < m; ++i)
                                cand[i] -= proj * ucols[o][i];
                        }
                    const double nn = std::sqrt(squared_norm(cand));
                    if (nn > 0.5)
                    {
                        for (auto &z : cand)
                            z /= nn;
                        ucols[k] = std::move(cand);
                        break;
                    }
                }
            }
            for (std::size_t k = 0; k < n; ++k)
                for (std::size_t i = 0; i < m; ++i)
                    out.u(i, k) = ucols[k][i];
            return out;
        }
    } // namespace

    SvdResult svd(const ComplexMatrix &a)
    {
        if (a.empty())
            throw std::invalid_argument("svd: empty matrix");
        if (!a.all_finite())
            throw std::invalid_argument("svd: non-finite entries");
        if (a.rows() >= a.cols())
            return svd_tall(a);
        SvdResult t = svd_tall(a.adjoint());
        return SvdResult{std::move(t.v), std::move(t.sigma), std::move(t.u)};
    }

    ComplexMatrix null_space(const ComplexMatrix &a)
    {
        if (a.cols() == 0)
            throw std::invalid_argument("null_space: matrix has no columns");
        const std::size_t c = a.cols();
        if (a.rows() == 0)
            return ComplexMatrix::identity(c);
        // Zero-padding to at least c rows leaves V and sigma unchanged and yields a
        // full c x c right basis.
        ComplexMatrix padded(std::max(a.rows(), c), c);
        for (std::size_t r = 0; r < a.rows(); ++r)
            for (std::size_t j = 0; j < c; ++j)
                padded(r, j) = a(r, j);
        const SvdResult s = svd(padded);
        const double sigma_max = s.sigma.front();
        std::size_t rank = 0;
        for (double sv : s.sigma)
            if (sigma_max > 0.0 && sv > kRankTol * sigma_max)
                ++rank;
        return s.v.columns(rank, c - rank);
    }

    WaterFillAllocation water_fill(std::span<const double> gains, double total_power)
    {
        if (!(total_power >= 0.0) || !std::isfinite(total_power))
            throw std::invalid_argument("water_fill: total power must be finite and >= 0");
        for (std::size_t j = 0; j < gains.size(); ++j)
        {
            if (!(gains[j] >= 0.0) || !std::isfinite(gains[j]))
                throw std::invalid_argument("water_fill: gains must be finite and >= 0");
            if (j > 0 && gains[j] > gains[j - 1])
                throw std::invalid_argument("water_fill: gains must be sorted descending");
        }
        WaterFillAllocation out;
        out.stream_powers.assign(gains.size(), 0.0);
        std::size_t positive = 0;
        while (positive < gains.size() && gains[positive] > 0.0)
            ++positive;
        if (positive == 0)
            return out;
        if (total_power == 0.0)
        {
            out.water_level = 1.0 / gains[0];
            return out;
        }
        // Largest support k whose water level clears the k-th inverse gain.
        double inv_sum = 0.0;
        std::size_t active = 0;
        double level = 0.0;
        for (std::size_t k = 1; k <= positive; ++k)
        {
            inv_sum += 1.0 / gains[k - 1];
            const double mu = (total_power + inv_sum) / static_cast<double>(k);
            if (mu > 1.0 / gains[k - 1])
            {
                active = k;
                level = mu;
            }
            else
                break;
        }
        out.water_level = level;
        out.active_streams = active;
        for (std::size_t j = 0; j < active; ++j)
        {
            out.stream_powers[j] = level - 1.0 / gains[j];
            out.achieved_rate += std::log2(1.0 + gains[j] * out.stream_powers[j]);
        }
        return out;
    }

    double power_for_rate(std::span<const double> gains, double rate)
    {
        if (!(rate >= 0.0) || !std::isfinite(rate))
            throw std::invalid_argument("power_for_rate: rate must be finite and >= 0");
        std::size_t positive = 0;
        while (positive < gains.size() && gains[positive] > 0.0)
            ++positive;
        if (rate == 0.0)
            return 0.0;
        if (positive == 0)
            return std::numeric_limits<double>::infinity();
        double log_sum = 0.0, inv_sum = 0.0;
        for (std::size_t k = 1; k <= positive; ++k)
        {
            log_sum += std::log2(gains[k - 1]);
            inv_sum += 1.0 / gains[k - 1];
            const double mu = std::exp2((rate - log_sum) / static_cast<double>(k));
            if (k == positive || mu <= 1.0 / gains[k])
                return std::max(static_cast<double>(k) * mu - inv_sum, 0.0);
        }
        return std::numeric_limits<double>::infinity();
    }

    EigenModes eigen_modes(const ComplexMatrix &h)
    {
        const SvdResult s = svd(h);
        EigenModes modes{s.v, s.u, std::vector<double>(s.sigma.size(), 0.0)};
        const double sigma_max = s.sigma.front();
        for (std::size_t j = 0; j < s.sigma.size(); ++j)
            if (sigma_max > 0.0 && s.sigma[j] >= kRankTol * sigma_max)
                modes.gains[j] = s.sigma[j] * s.sigma[j];
        return modes;
    }

    LinkDesign allocate_link(const EigenModes &modes, std::size_t n_streams, double power, double frame_symbols)
    {
        if (n_streams == 0 || n_streams > modes.gains.size())
            throw RankError("allocate_link: " + std::to_string(n_streams) + " streams requested, " +
                                std::to_string(modes.gains.size()) + " available",
                            modes.gains.size());
        LinkDesign d;
        d.gains.assign(modes.gains.begin(), modes.gains.begin() + static_cast<std::ptrdiff_t>(n_streams));
        d.allocation = water_fill(d.gains, power);
        std::vector<double> amplitudes(n_streams);
        for (std::size_t j = 0; j < n_streams; ++j)
        {
            amplitudes[j] = std::sqrt(d.allocation.stream_powers[j]);
            d.total_power += d.allocation.stream_powers[j];
        }
        d.precoder = modes.directions.columns(0, n_streams).scale_columns(amplitudes);
        d.decorrelator = modes.receive.columns(0, n_streams).adjoint();
        d.rate_bits_per_frame = frame_symbols * d.allocation.achieved_rate;
        return d;
    }

    LinkDesign design_sr_link(const ComplexMatrix &h_sm, std::size_t n_sr, double power, double frame_symbols)
    {
        const std::size_t dim = std::min(h_sm.rows(), h_sm.cols());
        if (n_sr == 0 || n_sr > dim)
            throw RankError("design_sr_link: " + std::to_string(n_sr) + " streams exceed channel rank " +
                                std::to_string(dim),
                            dim);
        return allocate_link(eigen_modes(h_sm), n_sr, power, frame_symbols);
    }

    EigenModes nulled_modes(const ComplexMatrix &h_nd, const ComplexMatrix &h_nm, const ComplexMatrix &g_m)
    {
        ComplexMatrix basis;
        if (g_m.rows() == 0)
            basis = ComplexMatrix::identity(h_nd.cols());
        else
        {
            basis = null_space(g_m * h_nm);
            if (basis.cols() == 0)
                throw NullingInfeasible("design_rd_link: nulling infeasible, null(G_m H_nm) is trivial");
        }
        const ComplexMatrix h_eff = h_nd * basis;
        EigenModes inner_modes = eigen_modes(h_eff);
        return EigenModes{basis * inner_modes.directions, std::move(inner_modes.receive),
                          std::move(inner_modes.gains)};
    }

    LinkDesign design_rd_link(const ComplexMatrix &h_nd, const ComplexMatrix &h_nm, const ComplexMatrix &g_m,
                              std::size_t n_rd, double power, double frame_symbols)
    {
        const EigenModes modes = nulled_modes(h_nd, h_nm, g_m);
        LinkDesign d = allocate_link(modes, n_rd, power, frame_symbols);
        d.decorrelator = ComplexMatrix();
        return d;
    }

    double mutual_info(const ComplexMatrix &h_eff, const ComplexMatrix &f)
    {
        if (h_eff.cols() != f.rows())
            throw std::invalid_argument("mutual_info: nonconformable H and F");
        if (f.cols() == 0 || h_eff.rows() == 0)
            return 0.0;
        const ComplexMatrix k = h_eff * f;
        ComplexMatrix gram = k.cols() <= k.rows() ? k.adjoint() * k : k * k.adjoint();
        const std::size_t n = gram.rows();
        for (std::size_t i = 0; i < n; ++i)
            gram(i, i) += 1.0;
        // Cholesky: gram = L L^H, HPD with eigenvalues >= 1.
        ComplexMatrix l(n, n);
        double log_det = 0.0;
        for (std::size_t j = 0; j < n; ++j)
        {
            double d = gram(j, j).real();
            for (std::size_t p = 0; p < j; ++p)
                d -= std::norm(l(j, p));
            const double ljj = std::sqrt(d);
            l(j, j) = ljj;
            log_det += 2.0 * std::log(ljj);
            for (std::size_t i = j + 1; i < n; ++i)
            {
                cplx s = gram(i, j);
                for (std::size_t p = 0; p < j; ++p)
                    s -= l(i, p) * std::conj(l(j, p));
                l(i, j) = s / ljj;
            }
        }
        return log_det / std::log(2.0);
    }

} // namespace bdfrelay
