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

#ifndef BDFRELAY_PLOT_HPP
#define BDFRELAY_PLOT_HPP

// Minimal self-contained SVG line charts. Output depends only on the input
// numbers, so equal inputs give equal bytes.

#include "bdfrelay/artifacts.hpp"

#include <string>
#include <utility>
#include <vector>

namespace bdfrelay
{
    struct Series
    {
        std::string name;
        std::vector<double> x;
        std::vector<double> y;
    };

    struct PlotSpec
    {
        std::string title;
        std::string x_label;
        std::string y_label;
        std::vector<Series> series;
        double width = 640.0;
        double height = 420.0;
    };

    std::string line_plot_svg(const PlotSpec &spec);

    /// (file name, SVG) per figure style for an aggregate table on `axis`.
    std::vector<std::pair<std::string, std::string>> sweep_plots(const CsvTable &aggregate, const std::string &axis);

    /// Per-node value of the first relay against t, one line per queue
    /// length, from a trace table.
    std::string value_trace_plot(const CsvTable &trace);

} // namespace bdfrelay

#endif
