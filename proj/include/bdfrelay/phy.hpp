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

#ifndef BDFRELAY_PHY_HPP
#define BDFRELAY_PHY_HPP

/*
Physical layer of the two-hop relay model.

- svd / null_space: one-sided Jacobi on small complex matrices.
- water_fill: exact active-set water-filling over eigen-stream gains.
- design_sr_link: source precoder + Rx-relay decorrelator on the strongest modes.
- design_rd_link: Tx-relay precoder restricted to the null space of the
  interference it would cause at the concurrently receiving relay.
- mutual_info: log2 det(I + H F F^H H^H).

Stream gains are the eigenvalues of H H^H (squared singular values); the
precoder columns are scaled by the square roots of the stream powers, so
tr(F F^H) equals the allocated power.
*/

#include "bdfrelay/complex_matrix.hpp"

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace bdfrelay
{
    struct SvdResult
    {
        ComplexMatrix u;          ///< rows x k, orthonormal columns
        std::vector<double> sigma; ///< k values, nonincreasing
        ComplexMatrix v;          ///< cols x k, orthonormal columns
    };

    class SvdError : public std::runtime_error
    {
    public:
        SvdError(const std::string &what, double residual) : std::runtime_error(what), residual_(residual) {}
        double residual() const { return residual_; }

    private:
        double residual_;
    };

    /// Thin SVD, k = min(rows, cols). Throws SvdError if the Jacobi sweeps do not
    /// converge within the iteration cap.
    SvdResult svd(const ComplexMatrix &a);

    /// Orthonormal basis (as columns) of the right null space. Returns a
    /// cols x 0 matrix when the null space is trivial.
    ComplexMatrix null_space(const ComplexMatrix &a);

    struct WaterFillAllocation
    {
        std::vector<double> stream_powers;
        double water_level = 0.0;
        double achieved_rate = 0.0; ///< bits/s/Hz
        std::size_t active_streams = 0;
    };

    /// gains: descending, >= 0 (zero-gain streams are never active).
    WaterFillAllocation water_fill(std::span<const double> gains, double total_power);

    /// Smallest total power whose water-filled rate over `gains` reaches
    /// `rate` bits/s/Hz; infinity when no stream has positive gain.
    double power_for_rate(std::span<const double> gains, double rate);

    /// Precoding directions and stream gains of one link, computed once per
    /// channel realization and reused across candidate powers.
    struct EigenModes
    {
        ComplexMatrix directions;  ///< transmit-side unit vectors (columns), best first
        ComplexMatrix receive;     ///< receive-side unit vectors (columns), best first
        std::vector<double> gains; ///< eigenvalues of H H^H, descending; 0 beyond numerical rank
    };

    EigenModes eigen_modes(const ComplexMatrix &h);

    struct LinkDesign
    {
        ComplexMatrix precoder;
        ComplexMatrix decorrelator; ///< n x N_R for S-R links; empty for R-D links
        double rate_bits_per_frame = 0.0;
        double total_power = 0.0;
        std::vector<double> gains;  ///< gains of the selected streams
        WaterFillAllocation allocation;
    };

    /// Water-filled design over the first n_streams modes.
    LinkDesign allocate_link(const EigenModes &modes, std::size_t n_streams, double power, double frame_symbols);

    class RankError : public std::invalid_argument
    {
    public:
        RankError(const std::string &what, std::size_t available) : std::invalid_argument(what), available_(available) {}
        std::size_t available() const { return available_; }

    private:
        std::size_t available_;
    };

    class NullingInfeasible : public std::runtime_error
    {
    public:
        using std::runtime_error::runtime_error;
    };

    /// S-R link. H_sm is N_R x N_T. Throws RankError when n_sr exceeds the
    /// dimensional rank min(N_T, N_R).
    LinkDesign design_sr_link(const ComplexMatrix &h_sm, std::size_t n_sr, double power, double frame_symbols);

    /// Modes of H_nD restricted to null(G_m H_nm). An empty g_m means no
    /// concurrent S-R reception, so the constraint is vacuous.
    EigenModes nulled_modes(const ComplexMatrix &h_nd, const ComplexMatrix &h_nm, const ComplexMatrix &g_m);

    /// R-D link under the interference nulling constraint G_m H_nm F = 0.
    /// Throws NullingInfeasible when the null space is trivial.
    LinkDesign design_rd_link(const ComplexMatrix &h_nd, const ComplexMatrix &h_nm, const ComplexMatrix &g_m,
                              std::size_t n_rd, double power, double frame_symbols);

    /// log2 det(I + H F F^H H^H) via Cholesky of the smaller Gram matrix.
    double mutual_info(const ComplexMatrix &h_eff, const ComplexMatrix &f);

} // namespace bdfrelay

#endif
