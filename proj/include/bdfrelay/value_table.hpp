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

#ifndef BDFRELAY_VALUE_TABLE_HPP
#define BDFRELAY_VALUE_TABLE_HPP

#include <cstddef>
#include <vector>

namespace bdfrelay
{
    /// Node 0 is the source; relay m (0-based) is node m + 1.
    constexpr std::size_t source_node = 0;
    constexpr std::size_t relay_node(std::size_t relay) { return relay + 1; }

    /// Per-node value functions V_m(q), q = 0..N_Q, with V_m(0) pinned to 0.
    class PerNodeValueTable
    {
    public:
        PerNodeValueTable() = default;
        PerNodeValueTable(std::size_t relays, int buffer_size);

        std::size_t relays() const { return relays_; }
        std::size_t nodes() const { return relays_ + 1; }
        int buffer_size() const { return buffer_size_; }

        double operator()(std::size_t node, int q) const;
        /// Throws when asked to move a pinned V_m(0) away from zero.
        void set(std::size_t node, int q, double value);

        /// Lookup with q clamped to [0, N_Q].
        double clamped(std::size_t node, int q) const;
        /// Piecewise-linear lookup at a real queue length, clamped to [0, N_Q].
        double interpolate(std::size_t node, double q) const;

        const std::vector<double> &row(std::size_t node) const;
        bool all_finite() const;

        friend bool operator==(const PerNodeValueTable &, const PerNodeValueTable &) = default;

    private:
        void check(std::size_t node, int q) const;

        std::size_t relays_ = 0;
        int buffer_size_ = 0;
        std::vector<std::vector<double>> values_;
    };

    /// Central difference, one-sided at q = 0 and q = N_Q.
    double value_derivative(const PerNodeValueTable &v, std::size_t node, int q);

    struct LagrangeMultipliers
    {
        double gamma_sd = 1.0;
        double gamma_sp = 1.0;
        std::vector<double> gamma_rp;

        static LagrangeMultipliers uniform(std::size_t relays, double value);
        bool nonnegative() const;
        friend bool operator==(const LagrangeMultipliers &, const LagrangeMultipliers &) = default;
    };

} // namespace bdfrelay

#endif
