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

#include "bdfrelay/value_table.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace bdfrelay
{
    PerNodeValueTable::PerNodeValueTable(std::size_t relays, int buffer_size)
        : relays_(relays), buffer_size_(buffer_size),
          values_(relays + 1, std::vector<double>(static_cast<std::size_t>(std::max(buffer_size, 0)) + 1, 0.0))
    {
        if (relays == 0)
            throw std::invalid_argument("PerNodeValueTable: need at least one relay");
        if (buffer_size < 1)
            throw std::invalid_argument("PerNodeValueTable: buffer size must be >= 1");
    }

    void PerNodeValueTable::check(std::size_t node, int q) const
    {
        if (node >= values_.size())
            throw std::out_of_range("PerNodeValueTable: node " + std::to_string(node) + " out of range");
        if (q < 0 || q > buffer_size_)
            throw std::out_of_range("PerNodeValueTable: queue index " + std::to_string(q) + " outside [0, " +
                                    std::to_string(buffer_size_) + "]");
    }

    double PerNodeValueTable::operator()(std::size_t node, int q) const
    {
        check(node, q);
        return values_[node][static_cast<std::size_t>(q)];
    }

    void PerNodeValueTable::set(std::size_t node, int q, double value)
    {
        check(node, q);
        if (q == 0 && value != 0.0)
            throw std::invalid_argument("PerNodeValueTable: V(0) is pinned to zero");
        if (!std::isfinite(value))
            throw std::invalid_argument("PerNodeValueTable: non-finite value");
        values_[node][static_cast<std::size_t>(q)] = value;
    }

    double PerNodeValueTable::clamped(std::size_t node, int q) const
    {
        return (*this)(node, std::clamp(q, 0, buffer_size_));
    }

    double PerNodeValueTable::interpolate(std::size_t node, double q) const
    {
        const double x = std::clamp(q, 0.0, static_cast<double>(buffer_size_));
        const int lo = std::min(static_cast<int>(std::floor(x)), buffer_size_ - 1);
        const double w = x - lo;
        const auto &r = row(node);
        return (1.0 - w) * r[static_cast<std::size_t>(lo)] + w * r[static_cast<std::size_t>(lo) + 1];
    }

    const std::vector<double> &PerNodeValueTable::row(std::size_t node) const
    {
        check(node, 0);
        return values_[node];
    }

    bool PerNodeValueTable::all_finite() const
    {
        for (const auto &r : values_)
            for (double x : r)
                if (!std::isfinite(x))
                    return false;
        return true;
    }

    double value_derivative(const PerNodeValueTable &v, std::size_t node, int q)
    {
        const int n = v.buffer_size();
        if (q <= 0)
            return v(node, 1) - v(node, 0);
        if (q >= n)
            return v(node, n) - v(node, n - 1);
        return 0.5 * (v(node, q + 1) - v(node, q - 1));
    }

    LagrangeMultipliers LagrangeMultipliers::uniform(std::size_t relays, double value)
    {
        if (!(value >= 0.0))
            throw std::invalid_argument("LagrangeMultipliers: initial value must be >= 0");
        return LagrangeMultipliers{value, value, std::vector<double>(relays, value)};
    }

    bool LagrangeMultipliers::nonnegative() const
    {
        if (!(gamma_sd >= 0.0) || !(gamma_sp >= 0.0))
            return false;
        return std::all_of(gamma_rp.begin(), gamma_rp.end(), [](double g) { return g >= 0.0; });
    }

} // namespace bdfrelay
