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

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

namespace bdfrelay
{
    void validate(const FiniteMdp &mdp)
    {
        if (mdp.states == 0)
            throw std::invalid_argument("FiniteMdp: no states");
        if (mdp.actions.size() != mdp.states || mdp.occupancy.size() != mdp.states || mdp.src_full.size() != mdp.states)
            throw std::invalid_argument("FiniteMdp: per-state tables have inconsistent sizes");
        if (mdp.reference >= mdp.states)
            throw std::invalid_argument("FiniteMdp: reference state out of range");
        const double wsum = std::accumulate(mdp.csi_weights.begin(), mdp.csi_weights.end(), 0.0);
        if (mdp.csi_weights.empty() || std::abs(wsum - 1.0) > 1e-12)
            throw std::invalid_argument("FiniteMdp: CSI probabilities sum to " + std::to_string(wsum));
        for (std::size_t s = 0; s < mdp.states; ++s)
        {
            if (mdp.actions[s].size() != mdp.csi_weights.size())
                throw std::invalid_argument("FiniteMdp: state " + std::to_string(s) + " lacks CSI branches");
            for (std::size_t k = 0; k < mdp.actions[s].size(); ++k)
            {
                if (mdp.actions[s][k].empty())
                    throw std::invalid_argument("FiniteMdp: state " + std::to_string(s) + ", CSI " +
                                                std::to_string(k) + " has no action");
                for (const MdpAction &a : mdp.actions[s][k])
                {
                    double row = 0.0;
                    for (const auto &[j, p] : a.next)
                    {
                        if (j >= mdp.states || p < 0.0)
                            throw std::invalid_argument("FiniteMdp: bad successor entry");
                        row += p;
                    }
                    if (std::abs(row - 1.0) > 1e-12)
                        throw std::invalid_argument("FiniteMdp: transition row sums to " + std::to_string(row));
                }
            }
        }
    }

    namespace
    {
        double q_value(const MdpAction &a, const std::vector<double> &h)
        {
            double x = a.cost;
            for (const auto &[j, p] : a.next)
                x += p * h[j];
            return x;
        }

        std::uint32_t greedy(const std::vector<MdpAction> &acts, const std::vector<double> &h, double &best)
        {
            std::uint32_t arg = 0;
            best = q_value(acts[0], h);
            for (std::uint32_t a = 1; a < acts.size(); ++a)
            {
                const double x = q_value(acts[a], h);
                if (x < best)
                {
                    best = x;
                    arg = a;
                }
            }
            return arg;
        }

        std::string describe_classes(const std::vector<std::vector<std::uint32_t>> &classes)
        {
            std::ostringstream os;
            for (std::size_t c = 0; c < classes.size(); ++c)
            {
                os << (c ? "; " : "") << "{";
                for (std::size_t i = 0; i < classes[c].size() && i < 8; ++i)
                    os << (i ? "," : "") << classes[c][i];
                if (classes[c].size() > 8)
                    os << ",...";
                os << "}";
            }
            return os.str();
        }

        std::vector<std::map<std::uint32_t, double>> induced_chain(const FiniteMdp &mdp, const Policy &policy)
        {
            if (policy.size() != mdp.states)
                throw std::invalid_argument("policy does not cover every state");
            std::vector<std::map<std::uint32_t, double>> rows(mdp.states);
            for (std::size_t s = 0; s < mdp.states; ++s)
            {
                if (policy[s].size() != mdp.csi_weights.size())
                    throw std::invalid_argument("policy does not cover every CSI branch");
                for (std::size_t k = 0; k < mdp.csi_weights.size(); ++k)
                {
                    const MdpAction &a = mdp.actions[s][k].at(policy[s][k]);
                    for (const auto &[j, p] : a.next)
                        rows[s][j] += mdp.csi_weights[k] * p;
                }
            }
            return rows;
        }
    } // namespace

    std::vector<std::vector<std::uint32_t>> closed_classes(const FiniteMdp &mdp, const Policy &policy)
    {
        const auto rows = induced_chain(mdp, policy);
        const std::size_t n = mdp.states;

        // Iterative Tarjan.
        std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
        std::vector<char> on_stack(n, 0);
        std::vector<std::uint32_t> stack;
        std::vector<std::vector<std::uint32_t>> sccs;
        int counter = 0;
        for (std::uint32_t root = 0; root < n; ++root)
        {
            if (index[root] >= 0)
                continue;
            std::vector<std::pair<std::uint32_t, std::map<std::uint32_t, double>::const_iterator>> call;
            index[root] = low[root] = counter++;
            stack.push_back(root);
            on_stack[root] = 1;
            call.emplace_back(root, rows[root].begin());
            while (!call.empty())
            {
                auto &[v, it] = call.back();
                if (it != rows[v].end())
                {
                    const std::uint32_t w = it->first;
                    const bool edge = it->second > 0.0;
                    ++it;
                    if (!edge)
                        continue;
                    if (index[w] < 0)
                    {
                        index[w] = low[w] = counter++;
                        stack.push_back(w);
                        on_stack[w] = 1;
                        call.emplace_back(w, rows[w].begin());
                    }
                    else if (on_stack[w])
                        low[v] = std::min(low[v], index[w]);
                    continue;
                }
                if (low[v] == index[v])
                {
                    std::vector<std::uint32_t> scc;
                    std::uint32_t w;
                    do
                    {
                        w = stack.back();
                        stack.pop_back();
                        on_stack[w] = 0;
                        comp[w] = static_cast<int>(sccs.size());
                        scc.push_back(w);
                    } while (w != v);
                    std::sort(scc.begin(), scc.end());
                    sccs.push_back(std::move(scc));
                }
                const std::uint32_t done = v;
                call.pop_back();
                if (!call.empty())
                    low[call.back().first] = std::min(low[call.back().first], low[done]);
            }
        }

        std::vector<std::vector<std::uint32_t>> closed;
        for (std::size_t c = 0; c < sccs.size(); ++c)
        {
            bool leaves = false;
            for (std::uint32_t s : sccs[c])
                for (const auto &[j, p] : rows[s])
                    if (p > 0.0 && comp[j] != static_cast<int>(c))
                        leaves = true;
            if (!leaves)
                closed.push_back(sccs[c]);
        }
        std::sort(closed.begin(), closed.end());
        return closed;
    }

    SolveResult relative_value_iteration(const FiniteMdp &mdp, const RviOptions &options)
    {
        validate(mdp);
        if (!(options.damping > 0.0 && options.damping <= 1.0))
            throw std::invalid_argument("relative_value_iteration: damping must lie in (0, 1]");
        const std::size_t n = mdp.states;
        std::vector<double> h(n, 0.0), th(n, 0.0);
        SolveResult r;
        for (std::size_t it = 0;; ++it)
        {
            double hi = -std::numeric_limits<double>::infinity();
            double lo = std::numeric_limits<double>::infinity();
            for (std::size_t s = 0; s < n; ++s)
            {
                double acc = 0.0;
                for (std::size_t k = 0; k < mdp.csi_weights.size(); ++k)
                {
                    double best = 0.0;
                    greedy(mdp.actions[s][k], h, best);
                    acc += mdp.csi_weights[k] * best;
                }
                th[s] = acc;
                hi = std::max(hi, acc - h[s]);
                lo = std::min(lo, acc - h[s]);
            }
            const double span = hi - lo;
            r.span_trace.push_back(span);
            if (span <= options.tolerance)
            {
                r.theta = 0.5 * (hi + lo);
                r.iterations = it + 1;
                r.final_span = span;
                break;
            }
            if (it + 1 >= options.max_iterations)
            {
                std::ostringstream os;
                os << "relative_value_iteration: span " << span << " above tolerance " << options.tolerance
                   << " after " << options.max_iterations << " iterations";
                throw SolverError(os.str(), r.span_trace);
            }
            for (std::size_t s = 0; s < n; ++s)
                h[s] += options.damping * (th[s] - h[s]);
            const double ref = h[mdp.reference];
            for (double &x : h)
                x -= ref;
        }

        r.value = h;
        r.policy.assign(n, std::vector<std::uint32_t>(mdp.csi_weights.size(), 0));
        for (std::size_t s = 0; s < n; ++s)
            for (std::size_t k = 0; k < mdp.csi_weights.size(); ++k)
            {
                double best = 0.0;
                r.policy[s][k] = greedy(mdp.actions[s][k], h, best);
            }
        const auto classes = closed_classes(mdp, r.policy);
        if (classes.size() != 1)
            throw MultichainError("relative_value_iteration: greedy policy has " + std::to_string(classes.size()) +
                                      " closed classes: " + describe_classes(classes),
                                  classes);
        return r;
    }

    PolicyEvaluation evaluate_policy(const FiniteMdp &mdp, const Policy &policy, double arrival_mean)
    {
        validate(mdp);
        const auto classes = closed_classes(mdp, policy);
        if (classes.size() != 1)
            throw MultichainError("evaluate_policy: induced chain has " + std::to_string(classes.size()) +
                                      " closed classes: " + describe_classes(classes),
                                  classes);
        const auto rows = induced_chain(mdp, policy);
        const std::size_t n = mdp.states;

        // pi (P - I) = 0 with the first balance equation replaced by sum(pi) = 1.
        std::vector<Eigen::Triplet<double>> trip;
        for (std::size_t s = 0; s < n; ++s)
            for (const auto &[j, p] : rows[s])
                if (j != 0)
                    trip.emplace_back(static_cast<int>(j), static_cast<int>(s), p);
        for (std::size_t s = 1; s < n; ++s)
            trip.emplace_back(static_cast<int>(s), static_cast<int>(s), -1.0);
        for (std::size_t s = 0; s < n; ++s)
            trip.emplace_back(0, static_cast<int>(s), 1.0);
        Eigen::SparseMatrix<double> a(static_cast<int>(n), static_cast<int>(n));
        a.setFromTriplets(trip.begin(), trip.end());
        a.makeCompressed();
        Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
        lu.compute(a);
        if (lu.info() != Eigen::Success)
            throw std::runtime_error("evaluate_policy: stationary system is singular");
        Eigen::VectorXd b = Eigen::VectorXd::Zero(static_cast<int>(n));
        b(0) = 1.0;
        const Eigen::VectorXd pi = lu.solve(b);

        PolicyEvaluation e;
        e.avg_power_relay.assign(mdp.relays, 0.0);
        e.stationary.assign(n, 0.0);
        for (std::size_t s = 0; s < n; ++s)
        {
            const double w = std::max(pi(static_cast<int>(s)), 0.0);
            e.stationary[s] = w;
            e.avg_occupancy += w * mdp.occupancy[s];
            e.drop_rate += mdp.src_full[s] ? w : 0.0;
            for (std::size_t k = 0; k < mdp.csi_weights.size(); ++k)
            {
                const MdpAction &act = mdp.actions[s][k][policy[s][k]];
                const double wk = w * mdp.csi_weights[k];
                e.avg_cost += wk * act.cost;
                e.avg_power_src += wk * act.p_src;
                if (act.tx_relay >= 0)
                    e.avg_power_relay.at(static_cast<std::size_t>(act.tx_relay)) += wk * act.p_relay;
            }
        }
        e.avg_delay = arrival_mean > 0.0 ? e.avg_occupancy / arrival_mean : 0.0;
        return e;
    }

    std::size_t discrete_csi_links(const NetworkDims &dims)
    {
        return 2 * dims.relays + dims.relays * (dims.relays - 1);
    }

    DiscreteCsi make_discrete_csi(const NetworkDims &dims, std::size_t per_link, Rng &rng)
    {
        if (per_link == 0)
            throw std::invalid_argument("make_discrete_csi: need at least one realization per link");
        const std::size_t links = discrete_csi_links(dims);
        double joint = std::pow(static_cast<double>(per_link), static_cast<double>(links));
        if (joint > 1e6)
            throw std::invalid_argument("make_discrete_csi: " + std::to_string(per_link) + "^" +
                                        std::to_string(links) + " joint CSI states is too many");
        std::vector<GlobalCsi> draws;
        for (std::size_t j = 0; j < per_link; ++j)
            draws.push_back(sample_csi(rng, dims));

        DiscreteCsi out;
        const std::size_t count = static_cast<std::size_t>(joint);
        out.states.reserve(count);
        for (std::size_t k = 0; k < count; ++k)
        {
            std::size_t code = k;
            auto pick = [&]() {
                const std::size_t j = code % per_link;
                code /= per_link;
                return j;
            };
            GlobalCsi g;
            g.h_sr.resize(dims.relays);
            g.h_rd.resize(dims.relays);
            g.h_rr.assign(dims.relays, std::vector<ComplexMatrix>(dims.relays));
            for (std::size_t m = 0; m < dims.relays; ++m)
                g.h_sr[m] = draws[pick()].h_sr[m];
            for (std::size_t m = 0; m < dims.relays; ++m)
                g.h_rd[m] = draws[pick()].h_rd[m];
            for (std::size_t m = 0; m < dims.relays; ++m)
                for (std::size_t n = 0; n < dims.relays; ++n)
                    if (m != n)
                        g.h_rr[m][n] = draws[pick()].h_rr[m][n];
            out.states.push_back(std::move(g));
        }
        out.weights.assign(count, 1.0 / static_cast<double>(count));
        return out;
    }

    ServiceDecision OracleAction::decision() const
    {
        ServiceDecision d;
        d.rx_rs = rx;
        d.tx_rs = tx;
        d.sr_packets = rx ? sr_packets : 0;
        d.rd_packets = tx ? rd_packets : 0;
        return d;
    }

    std::size_t queue_state_count(std::size_t relays, int buffer_size)
    {
        double n = std::pow(static_cast<double>(buffer_size + 1), static_cast<double>(relays + 1));
        return n > 1e15 ? std::numeric_limits<std::size_t>::max() : static_cast<std::size_t>(n);
    }

    RelayInstance::RelayInstance(RelayInstanceSpec spec) : spec_(std::move(spec))
    {
        const NetworkDims &dims = spec_.dims;
        if (dims.relays == 0 || dims.tx_antennas == 0 || dims.rx_antennas == 0)
            throw std::invalid_argument("RelayInstance: dimensions must be >= 1");
        if (spec_.buffer_size < 1)
            throw std::invalid_argument("RelayInstance: buffer size must be >= 1");
        num_states_ = queue_state_count(dims.relays, spec_.buffer_size);
        if (num_states_ > spec_.state_cap)
            throw StateSpaceTooLarge(num_states_, spec_.state_cap);
        if (spec_.csi.states.empty() || spec_.csi.states.size() != spec_.csi.weights.size())
            throw std::invalid_argument("RelayInstance: CSI states and weights are inconsistent");
        for (const auto *levels : {&spec_.levels_src, &spec_.levels_relay})
            if (levels->empty() || levels->front() != 0.0 || !std::is_sorted(levels->begin(), levels->end()))
                throw std::invalid_argument("RelayInstance: power levels must be ascending and start at 0");
        pmf_ = bdfrelay::arrival_pmf(spec_.arrival, 1e-12, true);

        const std::size_t n_t = dims.tx_antennas, n_r = dims.rx_antennas, n_min = dims.max_streams();
        const double fs = spec_.frame_symbols, nb = spec_.packet_bits;
        actions_.resize(spec_.csi.states.size());
        for (std::size_t k = 0; k < spec_.csi.states.size(); ++k)
        {
            const GlobalCsi &h = spec_.csi.states[k];
            std::vector<OracleAction> &acts = actions_[k];
            acts.push_back(OracleAction{});

            std::vector<EigenModes> rd_free;
            for (std::size_t n = 0; n < dims.relays; ++n)
                rd_free.push_back(eigen_modes(h.h_rd[n]));
            const std::size_t n_rd_free = std::min(n_t, n_r);
            for (std::size_t n = 0; n < dims.relays; ++n)
                for (std::size_t l = 1; l < spec_.levels_relay.size(); ++l)
                {
                    const LinkDesign d = allocate_link(rd_free[n], std::min(n_rd_free, rd_free[n].gains.size()),
                                                       spec_.levels_relay[l], fs);
                    OracleAction a;
                    a.tx = n;
                    a.n_rd = n_rd_free;
                    a.rd_power = spec_.levels_relay[l];
                    a.rd_packets = packets_from_bits(d.rate_bits_per_frame, nb);
                    acts.push_back(a);
                }

            for (std::size_t m = 0; m < dims.relays; ++m)
            {
                const EigenModes sr_modes = eigen_modes(h.h_sr[m]);
                for (std::size_t n_sr = 1; n_sr <= n_min; ++n_sr)
                {
                    const ComplexMatrix g_m = sr_modes.receive.columns(0, n_sr).adjoint();
                    std::vector<std::pair<std::size_t, EigenModes>> partners;
                    const std::size_t n_rd = std::min(n_t, n_r - n_sr);
                    if (n_rd > 0)
                        for (std::size_t n = 0; n < dims.relays; ++n)
                        {
                            if (n == m)
                                continue;
                            try
                            {
                                partners.emplace_back(n, nulled_modes(h.h_rd[n], h.h_rr[n][m], g_m));
                            }
                            catch (const NullingInfeasible &)
                            {
                            }
                        }
                    for (std::size_t ls = 1; ls < spec_.levels_src.size(); ++ls)
                    {
                        const LinkDesign sd = allocate_link(sr_modes, n_sr, spec_.levels_src[ls], fs);
                        OracleAction base;
                        base.rx = m;
                        base.n_sr = n_sr;
                        base.sr_power = spec_.levels_src[ls];
                        base.sr_packets = packets_from_bits(sd.rate_bits_per_frame, nb);
                        acts.push_back(base);
                        for (const auto &[n, modes] : partners)
                        {
                            const std::size_t k_rd = std::min(n_rd, modes.gains.size());
                            if (k_rd == 0)
                                continue;
                            for (std::size_t lr = 1; lr < spec_.levels_relay.size(); ++lr)
                            {
                                const LinkDesign rd = allocate_link(modes, k_rd, spec_.levels_relay[lr], fs);
                                OracleAction a = base;
                                a.tx = n;
                                a.n_rd = k_rd;
                                a.rd_power = spec_.levels_relay[lr];
                                a.rd_packets = packets_from_bits(rd.rate_bits_per_frame, nb);
                                acts.push_back(a);
                            }
                        }
                    }
                }
            }
        }
    }

    QueueState RelayInstance::state(std::size_t index) const
    {
        if (index >= num_states_)
            throw std::out_of_range("RelayInstance::state: index out of range");
        const std::size_t base = static_cast<std::size_t>(spec_.buffer_size) + 1;
        QueueState q;
        q.q_s = static_cast<int>(index % base);
        index /= base;
        q.q_relay.resize(spec_.dims.relays);
        for (auto &x : q.q_relay)
        {
            x = static_cast<int>(index % base);
            index /= base;
        }
        return q;
    }

    std::size_t RelayInstance::index(const QueueState &q) const
    {
        const std::size_t base = static_cast<std::size_t>(spec_.buffer_size) + 1;
        if (q.q_relay.size() != spec_.dims.relays)
            throw std::invalid_argument("RelayInstance::index: relay count mismatch");
        std::size_t idx = 0;
        for (std::size_t m = q.q_relay.size(); m-- > 0;)
            idx = idx * base + static_cast<std::size_t>(q.q_relay[m]);
        return idx * base + static_cast<std::size_t>(q.q_s);
    }

    FiniteMdp RelayInstance::build_mdp(const LagrangeMultipliers &lm) const
    {
        if (lm.gamma_rp.size() != spec_.dims.relays)
            throw std::invalid_argument("build_mdp: LM vector does not match relay count");
        FiniteMdp mdp;
        mdp.states = num_states_;
        mdp.relays = spec_.dims.relays;
        mdp.csi_weights = spec_.csi.weights;
        mdp.actions.resize(num_states_);
        mdp.occupancy.resize(num_states_);
        mdp.src_full.resize(num_states_);
        mdp.reference = 0;
        const int nq = spec_.buffer_size;
        for (std::size_t s = 0; s < num_states_; ++s)
        {
            const QueueState q = state(s);
            const bool full = q.q_s == nq;
            mdp.occupancy[s] = q.total();
            mdp.src_full[s] = full ? 1 : 0;
            const double base = q.total() + (full ? lm.gamma_sd : 0.0);
            mdp.actions[s].resize(actions_.size());
            for (std::size_t k = 0; k < actions_.size(); ++k)
            {
                auto &out = mdp.actions[s][k];
                out.reserve(actions_[k].size());
                for (const OracleAction &a : actions_[k])
                {
                    MdpAction ma;
                    ma.cost = base + lm.gamma_sp * a.sr_power;
                    ma.p_src = a.sr_power;
                    if (a.tx)
                    {
                        ma.tx_relay = static_cast<int>(*a.tx);
                        ma.p_relay = a.rd_power;
                        ma.cost += lm.gamma_rp[*a.tx] * a.rd_power;
                    }
                    ServiceDecision d = a.decision();
                    if (a.rx)
                        d.sr_packets = std::min(d.sr_packets, nq - q.q_relay[*a.rx]);
                    for (std::size_t x = 0; x < pmf_.size(); ++x)
                    {
                        if (pmf_[x] <= 0.0)
                            continue;
                        const auto j = static_cast<std::uint32_t>(index(step_queues(q, d, static_cast<int>(x), nq).next));
                        auto it = std::find_if(ma.next.begin(), ma.next.end(), [&](const auto &e) { return e.first == j; });
                        if (it == ma.next.end())
                            ma.next.emplace_back(j, pmf_[x]);
                        else
                            it->second += pmf_[x];
                    }
                    out.push_back(std::move(ma));
                }
            }
        }
        return mdp;
    }

    namespace
    {
        bool same_power(double a, double b) { return std::abs(a - b) <= 1e-9 * (1.0 + std::abs(a) + std::abs(b)); }
    } // namespace

    std::uint32_t RelayInstance::match(std::size_t csi_index, const AuctionOutcome &o) const
    {
        const auto &acts = actions_.at(csi_index);
        for (std::uint32_t i = 0; i < acts.size(); ++i)
        {
            const OracleAction &a = acts[i];
            if (a.rx != o.m_star || a.tx != o.n_star)
                continue;
            if (a.rx && (a.n_sr != o.n_sr_star || !same_power(a.sr_power, o.sr_power)))
                continue;
            if (a.tx && (a.n_rd != o.n_rd_star || !same_power(a.rd_power, o.rd_power)))
                continue;
            return i;
        }
        std::ostringstream os;
        os << "RelayInstance::match: outcome (rx " << (o.m_star ? std::to_string(*o.m_star) : "-") << ", N_SR "
           << o.n_sr_star << ", p " << o.sr_power << "; tx " << (o.n_star ? std::to_string(*o.n_star) : "-")
           << ", N_RD " << o.n_rd_star << ", p " << o.rd_power << ") is not in the action set of CSI state "
           << csi_index;
        throw std::invalid_argument(os.str());
    }

    Policy RelayInstance::tabulate(const std::function<AuctionOutcome(const QueueState &, std::size_t)> &decide) const
    {
        Policy p(num_states_, std::vector<std::uint32_t>(actions_.size(), 0));
        for (std::size_t s = 0; s < num_states_; ++s)
        {
            const QueueState q = state(s);
            for (std::size_t k = 0; k < actions_.size(); ++k)
                p[s][k] = match(k, decide(q, k));
        }
        return p;
    }

    AuctionOutcome RelayInstance::outcome(std::size_t csi_index, std::uint32_t action, const QueueState &q) const
    {
        const OracleAction &a = actions_.at(csi_index).at(action);
        AuctionOutcome o;
        o.m_star = a.rx;
        o.n_star = a.tx;
        if (a.rx)
        {
            o.n_sr_star = a.n_sr;
            o.sr_power = a.sr_power;
            o.sr_packets = std::min({a.sr_packets, q.q_s, spec_.buffer_size - q.q_relay.at(*a.rx)});
        }
        if (a.tx)
        {
            o.n_rd_star = a.n_rd;
            o.rd_power = a.rd_power;
            o.rd_packets = std::min(a.rd_packets, q.q_relay.at(*a.tx));
        }
        return o;
    }

    BellmanResidual bellman_residual(const RelayInstance &inst, const FiniteMdp &mdp, const PerNodeValueTable &v)
    {
        const std::size_t relays = inst.spec().dims.relays;
        const int nq = inst.spec().buffer_size;
        if (v.relays() != relays || v.buffer_size() != nq)
            throw std::invalid_argument("bellman_residual: value table dimensions do not match the instance");
        std::vector<double> approx(mdp.states, 0.0);
        for (std::size_t s = 0; s < mdp.states; ++s)
        {
            const QueueState q = inst.state(s);
            double x = v(source_node, q.q_s);
            for (std::size_t m = 0; m < relays; ++m)
                x += v(relay_node(m), q.q_relay[m]);
            approx[s] = x;
        }

        BellmanResidual out;
        for (std::size_t node = 0; node <= relays; ++node)
            for (int level = 1; level <= nq; ++level)
            {
                QueueState q;
                q.q_relay.assign(relays, 0);
                if (node == source_node)
                    q.q_s = level;
                else
                    q.q_relay[node - 1] = level;
                const std::size_t s = inst.index(q);
                double rhs = 0.0;
                for (std::size_t k = 0; k < mdp.csi_weights.size(); ++k)
                {
                    double best = 0.0;
                    greedy(mdp.actions[s][k], approx, best);
                    rhs += mdp.csi_weights[k] * best;
                }
                out.nodes.push_back(node);
                out.levels.push_back(level);
                out.residuals.push_back(rhs - approx[s]);
            }
        out.offset = std::accumulate(out.residuals.begin(), out.residuals.end(), 0.0) /
                     static_cast<double>(out.residuals.size());
        for (double &r : out.residuals)
        {
            r -= out.offset;
            out.max_residual = std::max(out.max_residual, std::abs(r));
        }
        return out;
    }

} // namespace bdfrelay
