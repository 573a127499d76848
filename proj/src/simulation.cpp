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

#include "bdfrelay/simulation.hpp"
#include "bdfrelay/baselines.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <deque>
#include <numeric>
#include <thread>

namespace bdfrelay
{
    RelayInstanceSpec relay_instance_spec(const ExperimentConfig &cfg)
    {
        RelayInstanceSpec spec;
        spec.dims = cfg.dims;
        spec.buffer_size = cfg.buffer_size;
        spec.packet_bits = cfg.packet_bits;
        spec.frame_symbols = cfg.frame_symbols();
        spec.arrival = cfg.arrival();
        spec.levels_src = cfg.levels_src;
        spec.levels_relay = cfg.levels_relay;
        spec.csi = discrete_csi(cfg);
        spec.state_cap = cfg.oracle_state_cap;
        return spec;
    }

    DiscreteCsi discrete_csi(const ExperimentConfig &cfg)
    {
        Rng rng(cfg.csi_seed);
        return make_discrete_csi(cfg.dims, cfg.csi_per_link, rng);
    }

    LagrangeMultipliers cost_multipliers(const ExperimentConfig &cfg)
    {
        LagrangeMultipliers lm = LagrangeMultipliers::uniform(cfg.dims.relays, cfg.initial_lm);
        if (!cfg.oracle_lm.empty())
        {
            lm.gamma_sd = cfg.oracle_lm.at(0);
            lm.gamma_sp = cfg.oracle_lm.at(1);
            for (std::size_t m = 0; m < cfg.dims.relays; ++m)
                lm.gamma_rp[m] = cfg.oracle_lm.at(2 + m);
        }
        return lm;
    }

    OracleSolution solve_oracle(const ExperimentConfig &cfg, const LagrangeMultipliers &lm)
    {
        OracleSolution sol;
        sol.instance = std::make_shared<const RelayInstance>(relay_instance_spec(cfg));
        sol.lm = lm;
        sol.mdp = sol.instance->build_mdp(lm);
        RviOptions opt;
        opt.tolerance = cfg.oracle_tolerance;
        sol.solve = relative_value_iteration(sol.mdp, opt);
        return sol;
    }

    double axis_value_of(const ExperimentConfig &cfg, const std::string &axis)
    {
        if (axis == "snr")
            return cfg.snr_db ? *cfg.snr_db : 10.0 * std::log10(cfg.power_src());
        if (axis == "M")
            return static_cast<double>(cfg.dims.relays);
        if (axis == "N_R")
            return static_cast<double>(cfg.dims.rx_antennas);
        if (axis == "N_b")
            return cfg.packet_bits;
        throw ConfigError("sweep.axis", "unknown axis '" + axis + "'");
    }

    namespace
    {
        Rng stream(std::uint64_t seed, std::uint32_t purpose)
        {
            std::seed_seq seq{static_cast<std::uint32_t>(seed & 0xffffffffu), static_cast<std::uint32_t>(seed >> 32),
                              purpose};
            return Rng(seq);
        }

        /// Arrival frame of every queued packet, oldest first.
        struct FifoTracker
        {
            std::deque<std::uint64_t> src;
            std::vector<std::deque<std::uint64_t>> relay;
            double sojourn_sum = 0.0;
            std::uint64_t sojourn_count = 0;

            void deliver(std::deque<std::uint64_t> &from, int k, std::uint64_t t, bool measure)
            {
                for (int i = 0; i < k; ++i)
                {
                    if (measure)
                    {
                        sojourn_sum += static_cast<double>(t - from.front());
                        ++sojourn_count;
                    }
                    from.pop_front();
                }
            }

            void apply(const ServiceDecision &d, const QueueStep &st, int accepted, std::uint64_t t, bool measure)
            {
                if (d.forward_through)
                    deliver(src, st.sr_moved, t, measure);
                else
                {
                    if (d.tx_rs)
                        deliver(relay[*d.tx_rs], st.rd_delivered, t, measure);
                    if (d.rx_rs)
                    {
                        const int kept = st.sr_moved - st.relay_overflow;
                        for (int i = 0; i < st.sr_moved; ++i)
                        {
                            if (i < kept)
                                relay[*d.rx_rs].push_back(src.front());
                            src.pop_front();
                        }
                    }
                }
                for (int i = 0; i < accepted; ++i)
                    src.push_back(t);
            }
        };

        void check_finite(double x, const char *what)
        {
            if (!std::isfinite(x))
                throw std::runtime_error(std::string("run produced a non-finite ") + what);
        }

        LearnerState initial_learner(const ExperimentConfig &cfg)
        {
            LearnerState ls(cfg.dims.relays, cfg.buffer_size, cfg.initial_lm);
            for (std::size_t node = 0; node < ls.v.nodes(); ++node)
                for (int q = 1; q <= cfg.buffer_size; ++q)
                    ls.v.set(node, q, cfg.initial_value_slope * (node == source_node ? 2.0 : 1.0) * q);
            return ls;
        }
    } // namespace

    EpisodeResult run_episode(const ExperimentConfig &cfg, const EpisodeOptions &options)
    {
        const auto t_start = std::chrono::steady_clock::now();
        validate(cfg);
        const AuctionParams params = cfg.auction_params();
        validate(params);
        const int nq = cfg.buffer_size;
        const std::size_t relays = cfg.dims.relays;
        const bool learned = cfg.policy == "learned";
        const bool oracle = cfg.policy == "oracle";
        const Constraints constraints = cfg.constraints();
        const LagrangeMultipliers cost_lm = options.cost_lm.value_or(cost_multipliers(cfg));
        std::optional<BaselineConfig> baseline;
        if (!learned && !oracle)
            baseline = baseline_from_name(cfg.policy, cfg.power_src(), cfg.power_relay());

        std::shared_ptr<const OracleSolution> sol = options.oracle;
        if (oracle && !sol)
            sol = std::make_shared<const OracleSolution>(solve_oracle(cfg, cost_multipliers(cfg)));
        DiscreteCsi dcsi;
        if (cfg.csi_model == CsiModel::discrete)
            dcsi = sol ? sol->instance->spec().csi : discrete_csi(cfg);

        const StepSchedule sched = make_schedule(cfg.step_exponents, cfg.step_constants);
        EpisodeResult res;
        res.learner = options.initial_state ? *options.initial_state : initial_learner(cfg);
        LearnerState &ls = res.learner;
        if (ls.v.relays() != relays || ls.v.buffer_size() != nq)
            throw std::invalid_argument("run_episode: initial learner state does not match the network");

        Rng csi_rng = stream(cfg.seed, 1);
        Rng arr_rng = stream(cfg.seed, 2);
        const ArrivalModel arrival = cfg.arrival();

        QueueState q;
        q.q_relay.assign(relays, 0);
        FifoTracker fifo;
        fifo.relay.resize(relays);

        const std::uint64_t burn = static_cast<std::uint64_t>(std::floor(cfg.burn_in * static_cast<double>(cfg.frames)));
        const std::uint64_t measured = cfg.frames - burn;
        const std::size_t batches = std::max<std::size_t>(1, std::min<std::size_t>(options.cost_batches, measured));
        const std::uint64_t batch_len = measured / batches;
        std::vector<double> batch_cost(batches, 0.0);

        double sum_occ = 0.0, sum_full = 0.0, sum_ps = 0.0, sum_cost = 0.0;
        std::vector<double> sum_pr(relays, 0.0);
        std::uint64_t arrivals = 0, dropped = 0, overflow = 0, delivered = 0;
        double cum_full = 0.0, cum_ps = 0.0;
        std::vector<double> cum_pr(relays, 0.0);
        std::vector<double> relay_power(relays, 0.0);

        auto snapshot = [&](std::uint64_t t) {
            res.history.push_back(LearningSnapshot{t, ls.v, ls.lm, cum_full, cum_ps, cum_pr});
        };
        auto trace = [&](std::uint64_t t) {
            for (std::size_t node = 0; node < ls.v.nodes(); ++node)
                for (int lvl = 1; lvl <= nq; ++lvl)
                    res.trace.push_back(TraceRow{t, node, lvl, ls.v(node, lvl), ls.lm});
        };
        const bool learning = learned && !options.freeze_learning;
        if (learned)
        {
            snapshot(0);
            if (options.record_trace)
                trace(0);
        }

        GlobalCsi rayleigh_csi;
        for (std::uint64_t t = 0; t < cfg.frames; ++t)
        {
            std::size_t k = 0;
            const GlobalCsi *csi = nullptr;
            if (cfg.csi_model == CsiModel::discrete)
            {
                k = std::uniform_int_distribution<std::size_t>(0, dcsi.states.size() - 1)(csi_rng);
                csi = &dcsi.states[k];
            }
            else
            {
                rayleigh_csi = sample_csi(csi_rng, cfg.dims);
                csi = &rayleigh_csi;
            }

            AuctionOutcome out;
            if (learned)
                out = run_auction(*csi, q, ls.v, ls.lm, params);
            else if (oracle)
            {
                const std::size_t s = sol->instance->index(q);
                out = sol->instance->outcome(k, sol->solve.policy[s][k], q);
            }
            else
                out = baseline_decide(q, *csi, *baseline, params);

            const ServiceDecision d = out.decision();
            const int x = sample_arrivals(arr_rng, arrival);
            const QueueStep st = step_queues(q, d, x, nq);

            const bool src_full = q.q_s == nq;
            const double p_src = out.m_star ? out.sr_power : 0.0;
            std::fill(relay_power.begin(), relay_power.end(), 0.0);
            if (out.n_star)
                relay_power[*out.n_star] += out.rd_power;
            double cost = q.total() + (src_full ? cost_lm.gamma_sd : 0.0) + cost_lm.gamma_sp * p_src;
            for (std::size_t m = 0; m < relays; ++m)
                cost += cost_lm.gamma_rp[m] * relay_power[m];

            const bool measure = t >= burn;
            fifo.apply(d, st, x - st.dropped, t, measure);
            if (measure)
            {
                sum_occ += q.total();
                sum_full += src_full ? 1.0 : 0.0;
                sum_ps += p_src;
                for (std::size_t m = 0; m < relays; ++m)
                    sum_pr[m] += relay_power[m];
                sum_cost += cost;
                const std::uint64_t b = std::min<std::uint64_t>((t - burn) / std::max<std::uint64_t>(batch_len, 1),
                                                                batches - 1);
                batch_cost[b] += cost;
                arrivals += static_cast<std::uint64_t>(x);
                dropped += static_cast<std::uint64_t>(st.dropped);
                overflow += static_cast<std::uint64_t>(st.relay_overflow);
                delivered += static_cast<std::uint64_t>(st.rd_delivered);
            }

            if (learning)
            {
                update_values(ls, q, out.winning_bid, sched, cfg.update_mode);
                update_lms(ls, FrameObservation{src_full, p_src, relay_power}, sched, constraints);
                ++ls.t;
            }
            cum_full += src_full ? 1.0 : 0.0;
            cum_ps += p_src;
            for (std::size_t m = 0; m < relays; ++m)
                cum_pr[m] += relay_power[m];
            q = st.next;

            if (learned)
            {
                const std::uint64_t done = t + 1;
                if (done % cfg.snapshot_interval == 0 || done == cfg.frames)
                    snapshot(done);
                if (options.record_trace && (done % cfg.trace_interval == 0 || done == cfg.frames))
                    trace(done);
            }
        }

        RunSummary &s = res.summary;
        s.policy = cfg.policy;
        s.seed = cfg.seed;
        s.frames = cfg.frames;
        s.measured_frames = measured;
        const double n = static_cast<double>(std::max<std::uint64_t>(measured, 1));
        s.avg_occupancy = sum_occ / n;
        s.drop_rate = sum_full / n;
        s.avg_power_src = sum_ps / n;
        s.avg_power_relay.resize(relays);
        for (std::size_t m = 0; m < relays; ++m)
            s.avg_power_relay[m] = sum_pr[m] / n;
        s.avg_power_relay_mean =
            std::accumulate(s.avg_power_relay.begin(), s.avg_power_relay.end(), 0.0) / static_cast<double>(relays);
        s.arrivals = arrivals;
        s.dropped = dropped;
        s.relay_overflow = overflow;
        s.delivered = delivered;
        s.packet_loss_rate = arrivals ? static_cast<double>(dropped + overflow) / static_cast<double>(arrivals) : 0.0;
        const double accepted = arrival.mean_per_frame * (1.0 - s.packet_loss_rate);
        if (accepted > 0.0)
            s.avg_delay_frames = s.avg_occupancy / accepted;
        else if (s.avg_occupancy > 0.0 && !options.allow_total_loss)
            throw std::runtime_error("every offered packet was lost; the average delay is unbounded");
        s.avg_delay_s = s.avg_delay_frames * cfg.frame_s;
        s.throughput_pps = static_cast<double>(delivered) / n / cfg.frame_s;
        s.fifo_delay_frames = fifo.sojourn_count ? fifo.sojourn_sum / static_cast<double>(fifo.sojourn_count) : 0.0;
        s.avg_cost = sum_cost / n;
        if (batches >= 2 && batch_len > 0)
        {
            double mean = 0.0, var = 0.0;
            std::vector<double> bm(batches);
            for (std::size_t b = 0; b < batches; ++b)
            {
                const double len = b + 1 == batches ? static_cast<double>(measured - batch_len * (batches - 1))
                                                    : static_cast<double>(batch_len);
                bm[b] = batch_cost[b] / len;
                mean += bm[b];
            }
            mean /= static_cast<double>(batches);
            for (double v : bm)
                var += (v - mean) * (v - mean);
            var /= static_cast<double>(batches - 1);
            s.cost_stderr = std::sqrt(var / static_cast<double>(batches));
        }
        s.final_lm = ls.lm;
        if (learned)
        {
            if (res.history.size() >= 2)
            {
                const std::size_t window = std::clamp<std::size_t>(
                    static_cast<std::size_t>(std::llround(cfg.convergence_window * static_cast<double>(res.history.size()))),
                    2, res.history.size());
                res.convergence = convergence_report(res.history, window, ConvergenceThresholds{}, constraints);
            }
            s.converged = res.convergence.converged;
            s.value_delta = res.convergence.value_delta;
            s.lm_slack = res.convergence.lm_slack;
        }
        for (double v : {s.avg_delay_frames, s.throughput_pps, s.drop_rate, s.avg_power_src, s.avg_power_relay_mean,
                         s.avg_cost, s.cost_stderr, s.fifo_delay_frames, s.value_delta, s.lm_slack})
            check_finite(v, "summary metric");
        if (!ls.v.all_finite())
            throw std::runtime_error("run produced a non-finite value table");
        s.wallclock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
        return res;
    }

    OracleReport compare_with_oracle(const ExperimentConfig &cfg)
    {
        validate(cfg);
        ExperimentConfig train = cfg;
        train.policy = "learned";
        train.csi_model = CsiModel::discrete;
        train.power_mode = PowerMode::grid;
        train.frames = cfg.oracle_train_frames;
        validate(train);

        // Refuse oversized instances before training.
        const std::size_t states = queue_state_count(cfg.dims.relays, cfg.buffer_size);
        if (states > cfg.oracle_state_cap)
            throw StateSpaceTooLarge(states, cfg.oracle_state_cap);

        const EpisodeResult tr = run_episode(train);
        OracleReport rep;
        rep.training = tr.summary;
        rep.lm = tr.learner.lm;
        const auto shared = std::make_shared<const OracleSolution>(solve_oracle(train, rep.lm));
        const OracleSolution &sol = *shared;
        const RelayInstance &inst = *sol.instance;
        rep.states = inst.num_states();
        rep.csi_states = inst.num_csi();
        for (std::size_t k = 0; k < inst.num_csi(); ++k)
            rep.actions += inst.actions(k).size();
        rep.theta = sol.solve.theta;
        rep.rvi_iterations = sol.solve.iterations;
        rep.rvi_span = sol.solve.final_span;

        const AuctionParams params = train.auction_params();
        const PerNodeValueTable &v = tr.learner.v;
        const Policy learned = inst.tabulate([&](const QueueState &q, std::size_t k) {
            return run_auction(inst.spec().csi.states[k], q, v, rep.lm, params);
        });
        const double lambda = cfg.arrivals_per_frame();
        rep.learned = evaluate_policy(sol.mdp, learned, lambda);
        rep.optimal = evaluate_policy(sol.mdp, sol.solve.policy, lambda);
        rep.learned_cost = rep.learned.avg_cost;
        rep.gap = rep.theta != 0.0 ? (rep.learned_cost - rep.theta) / rep.theta : 0.0;
        rep.residual = bellman_residual(inst, sol.mdp, v);

        if (cfg.oracle_eval_frames > 0)
        {
            ExperimentConfig replay = train;
            replay.policy = "oracle";
            replay.frames = cfg.oracle_eval_frames;
            EpisodeOptions eo;
            eo.oracle = shared;
            eo.cost_lm = rep.lm;
            eo.allow_total_loss = true;
            rep.replay = run_episode(replay, eo).summary;
        }
        return rep;
    }

    SweepResult sweep(const ExperimentConfig &cfg, const SweepOptions &options)
    {
        validate(cfg);
        SweepResult res;
        res.axis = cfg.sweep_axis;
        std::vector<double> values = cfg.sweep_values;
        if (values.empty())
            values.push_back(axis_value_of(cfg, cfg.sweep_axis));

        std::vector<ExperimentConfig> jobs;
        for (double value : values)
            for (const std::string &policy : cfg.sweep_policies)
                for (std::size_t rep = 0; rep < cfg.sweep_repetitions; ++rep)
                {
                    SweepCell cell;
                    cell.policy = policy;
                    cell.axis_value = value;
                    cell.repetition = rep;
                    cell.seed = cfg.seed + rep;
                    res.cells.push_back(cell);
                    ExperimentConfig c = with_axis(cfg, cfg.sweep_axis, value);
                    c.policy = policy;
                    c.seed = cell.seed;
                    jobs.push_back(std::move(c));
                }

        std::size_t threads = options.threads ? options.threads : cfg.sweep_threads;
        if (threads == 0)
            threads = std::max(1u, std::thread::hardware_concurrency());
        threads = std::min(threads, jobs.size());

        std::atomic<std::size_t> next{0};
        auto worker = [&]() {
            for (std::size_t i = next++; i < jobs.size(); i = next++)
            {
                SweepCell &cell = res.cells[i];
                try
                {
                    EpisodeOptions eo;
                    eo.record_trace = options.record_trace && cell.policy == "learned";
                    EpisodeResult r = run_episode(jobs[i], eo);
                    cell.summary = std::move(r.summary);
                    cell.summary.axis_value = cell.axis_value;
                    cell.trace = std::move(r.trace);
                    cell.ok = true;
                }
                catch (const std::exception &e)
                {
                    cell.ok = false;
                    cell.error = e.what();
                }
            }
        };
        if (threads <= 1)
            worker();
        else
        {
            std::vector<std::thread> pool;
            for (std::size_t i = 0; i < threads; ++i)
                pool.emplace_back(worker);
            for (auto &th : pool)
                th.join();
        }

        std::size_t i = 0;
        for (double value : values)
            for (const std::string &policy : cfg.sweep_policies)
            {
                AggregateRow row;
                row.policy = policy;
                row.axis_value = value;
                std::vector<const RunSummary *> ok;
                for (std::size_t rep = 0; rep < cfg.sweep_repetitions; ++rep, ++i)
                {
                    if (res.cells[i].ok)
                        ok.push_back(&res.cells[i].summary);
                    else
                        ++row.failed;
                }
                row.runs = ok.size();
                auto stats = [&](auto field, double &mean, double &se) {
                    mean = se = 0.0;
                    if (ok.empty())
                        return;
                    for (const RunSummary *r : ok)
                        mean += field(*r);
                    mean /= static_cast<double>(ok.size());
                    if (ok.size() < 2)
                        return;
                    double var = 0.0;
                    for (const RunSummary *r : ok)
                        var += (field(*r) - mean) * (field(*r) - mean);
                    se = std::sqrt(var / static_cast<double>(ok.size() - 1) / static_cast<double>(ok.size()));
                };
                double dummy = 0.0;
                stats([](const RunSummary &r) { return r.avg_delay_frames; }, row.delay_mean, row.delay_se);
                stats([](const RunSummary &r) { return r.throughput_pps; }, row.throughput_mean, row.throughput_se);
                stats([](const RunSummary &r) { return r.drop_rate; }, row.drop_mean, row.drop_se);
                stats([](const RunSummary &r) { return r.avg_power_src; }, row.power_src_mean, dummy);
                stats([](const RunSummary &r) { return r.avg_power_relay_mean; }, row.power_relay_mean, dummy);
                stats([](const RunSummary &r) { return r.converged ? 1.0 : 0.0; }, row.converged_fraction, dummy);
                res.aggregate.push_back(row);
            }
        return res;
    }

} // namespace bdfrelay
