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

#include "bdfrelay/traffic.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace bdfrelay
{
    namespace
    {
        ComplexMatrix gaussian_matrix(Rng &rng, std::size_t rows, std::size_t cols)
        {
            std::normal_distribution<double> half(0.0, std::sqrt(0.5));
            ComplexMatrix m(rows, cols);
            for (std::size_t r = 0; r < rows; ++r)
                for (std::size_t c = 0; c < cols; ++c)
                {
                    const double re = half(rng);
                    const double im = half(rng);
                    m(r, c) = cplx{re, im};
                }
            return m;
        }
    } // namespace

    GlobalCsi sample_csi(Rng &rng, const NetworkDims &dims)
    {
        if (dims.relays == 0 || dims.tx_antennas == 0 || dims.rx_antennas == 0)
            throw std::invalid_argument("sample_csi: M, N_T and N_R must be >= 1");
        GlobalCsi csi;
        csi.h_sr.reserve(dims.relays);
        csi.h_rd.reserve(dims.relays);
        for (std::size_t m = 0; m < dims.relays; ++m)
            csi.h_sr.push_back(gaussian_matrix(rng, dims.rx_antennas, dims.tx_antennas));
        for (std::size_t m = 0; m < dims.relays; ++m)
            csi.h_rd.push_back(gaussian_matrix(rng, dims.tx_antennas, dims.rx_antennas));
        csi.h_rr.assign(dims.relays, std::vector<ComplexMatrix>(dims.relays));
        for (std::size_t m = 0; m < dims.relays; ++m)
            for (std::size_t n = 0; n < dims.relays; ++n)
                if (m != n)
                    csi.h_rr[m][n] = gaussian_matrix(rng, dims.rx_antennas, dims.rx_antennas);
        return csi;
    }

    int QueueState::total() const { return std::accumulate(q_relay.begin(), q_relay.end(), q_s); }

    std::string to_string(ArrivalKind kind)
    {
        switch (kind)
        {
        case ArrivalKind::poisson:
            return "poisson";
        case ArrivalKind::deterministic:
            return "deterministic";
        case ArrivalKind::bernoulli:
            return "bernoulli";
        }
        return "unknown";
    }

    ArrivalKind arrival_kind_from_string(const std::string &name)
    {
        if (name == "poisson")
            return ArrivalKind::poisson;
        if (name == "deterministic")
            return ArrivalKind::deterministic;
        if (name == "bernoulli")
            return ArrivalKind::bernoulli;
        throw std::invalid_argument("unknown arrival kind '" + name + "' (expected poisson, deterministic, bernoulli)");
    }

    void validate(const ArrivalModel &model)
    {
        if (!(model.mean_per_frame >= 0.0) || !std::isfinite(model.mean_per_frame))
            throw std::invalid_argument("arrival mean must be finite and >= 0");
        if (model.kind == ArrivalKind::bernoulli && model.mean_per_frame > 1.0)
            throw std::invalid_argument("bernoulli arrival mean must be <= 1");
        if (model.kind == ArrivalKind::deterministic && model.mean_per_frame != std::floor(model.mean_per_frame))
            throw std::invalid_argument("deterministic arrival mean must be an integer packet count");
    }

    int sample_arrivals(Rng &rng, const ArrivalModel &model)
    {
        switch (model.kind)
        {
        case ArrivalKind::deterministic:
            return static_cast<int>(model.mean_per_frame);
        case ArrivalKind::bernoulli:
            return std::bernoulli_distribution(model.mean_per_frame)(rng) ? 1 : 0;
        case ArrivalKind::poisson:
            if (model.mean_per_frame == 0.0)
                return 0;
            return std::poisson_distribution<int>(model.mean_per_frame)(rng);
        }
        return 0;
    }

    std::vector<double> arrival_pmf(const ArrivalModel &model, double tail, bool lump_tail)
    {
        validate(model);
        switch (model.kind)
        {
        case ArrivalKind::deterministic:
        {
            std::vector<double> pmf(static_cast<std::size_t>(model.mean_per_frame) + 1, 0.0);
            pmf.back() = 1.0;
            return pmf;
        }
        case ArrivalKind::bernoulli:
            return {1.0 - model.mean_per_frame, model.mean_per_frame};
        case ArrivalKind::poisson:
        {
            const double lambda = model.mean_per_frame;
            std::vector<double> pmf;
            double term = std::exp(-lambda);
            double cumulative = 0.0;
            for (int n = 0;; ++n)
            {
                if (n > 0)
                    term *= lambda / n;
                pmf.push_back(term);
                cumulative += term;
                if (cumulative >= 1.0 - tail || n > 100000)
                    break;
            }
            if (lump_tail)
                pmf.back() += 1.0 - cumulative;
            return pmf;
        }
        }
        return {1.0};
    }

    double mean_arrivals_per_frame(double packets_per_second, double frame_s) { return packets_per_second * frame_s; }

    QueueStep step_queues(const QueueState &q, const ServiceDecision &d, int arrivals, int buffer_size)
    {
        if (arrivals < 0)
            throw std::invalid_argument("step_queues: negative arrival count");
        QueueStep out;
        out.next = q;
        int sr = 0;
        if (d.rx_rs)
        {
            if (*d.rx_rs >= q.q_relay.size())
                throw std::out_of_range("step_queues: rx relay index out of range");
            sr = std::clamp(d.sr_packets, 0, q.q_s);
        }
        out.sr_moved = sr;

        if (d.forward_through)
            out.rd_delivered = sr;
        else
        {
            if (d.tx_rs)
            {
                if (*d.tx_rs >= q.q_relay.size())
                    throw std::out_of_range("step_queues: tx relay index out of range");
                int &qn = out.next.q_relay[*d.tx_rs];
                const int rd = std::clamp(d.rd_packets, 0, qn);
                qn -= rd;
                out.rd_delivered = rd;
            }
            if (d.rx_rs)
            {
                int &qm = out.next.q_relay[*d.rx_rs];
                const int filled = qm + sr;
                qm = std::min(filled, buffer_size);
                out.relay_overflow = filled - qm;
            }
        }

        const int src = q.q_s - sr + arrivals;
        out.next.q_s = std::min(src, buffer_size);
        out.dropped = src - out.next.q_s;
        out.src_buffer_full = (out.next.q_s == buffer_size);
        return out;
    }

    int packets_from_bits(double bits, double packet_bits)
    {
        if (!(packet_bits > 0.0))
            throw std::invalid_argument("packets_from_bits: packet size must be positive");
        if (!(bits > 0.0))
            return 0;
        return static_cast<int>(std::floor(bits / packet_bits));
    }

} // namespace bdfrelay
