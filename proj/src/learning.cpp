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

#include "bdfrelay/learning.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace bdfrelay
{
    StepSchedule::StepSchedule(std::array<double, 3> exponents, std::array<double, 3> constants)
        : exponents_(exponents), constants_(constants)
    {
    }

    double StepSchedule::eps_v(double t) const { return constants_[0] / std::pow(1.0 + t, exponents_[0]); }
    double StepSchedule::eps_p(double t) const { return constants_[1] / std::pow(1.0 + t, exponents_[1]); }
    double StepSchedule::eps_d(double t) const { return constants_[2] / std::pow(1.0 + t, exponents_[2]); }

    StepSchedule make_schedule(std::array<double, 3> exponents, std::array<double, 3> constants)
    {
        const auto [a_v, a_p, a_d] = exponents;
        std::ostringstream why;
        if (!(a_v > 0.5))
            why << "a_v = " << a_v << " <= 0.5: eps_v is not square-summable; ";
        if (!(a_v < a_p))
            why << "a_p = " << a_p << " <= a_v = " << a_v << ": eps_p/eps_v does not vanish; ";
        if (!(a_p <= a_d))
            why << "a_d = " << a_d << " < a_p = " << a_p << ": LM exponents out of order; ";
        if (!(a_d <= 1.0))
            why << "a_d = " << a_d << " > 1: eps_d is summable; ";
        for (double c : constants)
            if (!(c > 0.0) || !std::isfinite(c))
            {
                why << "step constants must be positive and finite; ";
                break;
            }
        const std::string msg = why.str();
        if (!msg.empty())
            throw std::invalid_argument("make_schedule: " + msg.substr(0, msg.size() - 2));
        return StepSchedule(exponents, constants);
    }

    std::string to_string(UpdateMode mode)
    {
        return mode == UpdateMode::per_paper ? "per_paper" : "every_visit";
    }

    UpdateMode update_mode_from_string(const std::string &name)
    {
        if (name == "per_paper")
            return UpdateMode::per_paper;
        if (name == "every_visit")
            return UpdateMode::every_visit;
        throw std::invalid_argument("unknown update mode '" + name + "' (expected per_paper, every_visit)");
    }

    LearnerState::LearnerState(std::size_t relays, int buffer_size, double initial_lm)
        : v(relays, buffer_size), lm(LagrangeMultipliers::uniform(relays, initial_lm)),
          visit_counts(relays + 1, std::vector<std::uint64_t>(static_cast<std::size_t>(buffer_size) + 1, 0))
    {
    }

    bool representative_state(const QueueState &q, std::size_t &node, int &level)
    {
        int nonzero = 0;
        if (q.q_s > 0)
        {
            ++nonzero;
            node = source_node;
            level = q.q_s;
        }
        for (std::size_t m = 0; m < q.q_relay.size(); ++m)
            if (q.q_relay[m] > 0)
            {
                ++nonzero;
                node = relay_node(m);
                level = q.q_relay[m];
            }
        return nonzero == 1;
    }

    namespace
    {
        void step_cell(LearnerState &ls, std::size_t node, int q, double target, double eps)
        {
            const double old = ls.v(node, q);
            ls.v.set(node, q, old + eps * (target - old));
        }
    } // namespace

    int update_values(LearnerState &ls, const QueueState &q_t, double winning_bid, const StepSchedule &sched,
                      UpdateMode mode)
    {
        const int nq = ls.v.buffer_size();
        const double full = q_t.q_s == nq ? ls.lm.gamma_sd : 0.0;
        if (mode == UpdateMode::per_paper)
        {
            std::size_t node = 0;
            int q = 0;
            if (!representative_state(q_t, node, q))
                return 0;
            const double eps = sched.eps_v(static_cast<double>(ls.t));
            ++ls.visit_counts[node][static_cast<std::size_t>(q)];
            if (eps == 0.0)
                return 0;
            step_cell(ls, node, q, full + q + winning_bid, eps);
            return 1;
        }

        int changed = 0;
        for (std::size_t node = 0; node < ls.v.nodes(); ++node)
        {
            const int q = node == source_node ? q_t.q_s : q_t.q_relay.at(node - 1);
            if (q <= 0)
                continue;
            auto &count = ls.visit_counts[node][static_cast<std::size_t>(q)];
            const double eps = sched.eps_v(static_cast<double>(count));
            ++count;
            step_cell(ls, node, q, (node == source_node ? full : 0.0) + q + winning_bid, eps);
            ++changed;
        }
        return changed;
    }

    void update_lms(LearnerState &ls, const FrameObservation &obs, const StepSchedule &sched,
                    const Constraints &constraints)
    {
        const double t = static_cast<double>(ls.t);
        LagrangeMultipliers &lm = ls.lm;
        lm.gamma_sd = std::max(0.0, lm.gamma_sd + sched.eps_d(t) * ((obs.src_full ? 1.0 : 0.0) - constraints.drop_rate));
        lm.gamma_sp = std::max(0.0, lm.gamma_sp + sched.eps_p(t) * (obs.src_power - constraints.src_power));
        if (obs.relay_power.size() != lm.gamma_rp.size())
            throw std::invalid_argument("update_lms: relay power count does not match the LM vector");
        for (std::size_t m = 0; m < lm.gamma_rp.size(); ++m)
            lm.gamma_rp[m] =
                std::max(0.0, lm.gamma_rp[m] + sched.eps_p(t) * (obs.relay_power[m] - constraints.relay_power));
    }

    ConvergenceReport convergence_report(const std::vector<LearningSnapshot> &history, std::size_t window,
                                         const ConvergenceThresholds &thresholds, const Constraints &constraints)
    {
        if (window < 2)
            throw std::invalid_argument("convergence_report: window must cover at least two snapshots");
        if (window > history.size())
            throw std::invalid_argument("convergence_report: window of " + std::to_string(window) +
                                        " snapshots exceeds history length " + std::to_string(history.size()));

        const std::size_t first = history.size() - window;
        const std::size_t half = window / 2;
        const PerNodeValueTable &shape = history.back().v;
        const std::size_t nodes = shape.nodes();
        const int nq = shape.buffer_size();

        std::vector<double> mean_a(nodes * static_cast<std::size_t>(nq + 1), 0.0);
        std::vector<double> mean_b(mean_a.size(), 0.0);
        for (std::size_t i = first; i < history.size(); ++i)
        {
            auto &acc = (i < first + half) ? mean_a : mean_b;
            for (std::size_t node = 0; node < nodes; ++node)
                for (int q = 0; q <= nq; ++q)
                    acc[node * static_cast<std::size_t>(nq + 1) + static_cast<std::size_t>(q)] += history[i].v(node, q);
        }
        double scale = 0.0;
        for (std::size_t k = 0; k < mean_a.size(); ++k)
        {
            mean_a[k] /= static_cast<double>(half);
            mean_b[k] /= static_cast<double>(window - half);
            scale = std::max({scale, std::abs(mean_a[k]), std::abs(mean_b[k])});
        }

        ConvergenceReport r;
        if (scale > 0.0)
            for (std::size_t k = 0; k < mean_a.size(); ++k)
            {
                const double ref = std::max({std::abs(mean_b[k]), std::abs(mean_a[k]), 0.01 * scale});
                r.value_delta = std::max(r.value_delta, std::abs(mean_b[k] - mean_a[k]) / ref);
            }

        const LearningSnapshot &a = history[first];
        const LearningSnapshot &b = history.back();
        const double frames = static_cast<double>(b.t - a.t);
        if (frames > 0.0)
        {
            auto slack = [&](double avg, double target, double gamma) {
                const double rel = (avg - target) / target;
                return gamma > thresholds.active_lm ? std::abs(rel) : std::max(rel, 0.0);
            };
            r.lm_slack = std::max(r.lm_slack, slack((b.cum_src_full - a.cum_src_full) / frames, constraints.drop_rate,
                                                    b.lm.gamma_sd));
            r.lm_slack = std::max(r.lm_slack, slack((b.cum_src_power - a.cum_src_power) / frames,
                                                    constraints.src_power, b.lm.gamma_sp));
            for (std::size_t m = 0; m < b.cum_relay_power.size(); ++m)
                r.lm_slack = std::max(r.lm_slack, slack((b.cum_relay_power[m] - a.cum_relay_power[m]) / frames,
                                                        constraints.relay_power, b.lm.gamma_rp[m]));
        }
        r.converged = r.value_delta < thresholds.value_delta && r.lm_slack < thresholds.lm_slack;
        return r;
    }

} // namespace bdfrelay
