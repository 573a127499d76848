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

#include "bdfrelay/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <sstream>

namespace bdfrelay
{
    namespace
    {
        const char *const palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                       "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

        std::string fmt(double x, const char *f = "%.2f")
        {
            char buf[48];
            std::snprintf(buf, sizeof buf, f, x);
            return buf;
        }

        std::string escape(const std::string &s)
        {
            std::string out;
            for (char c : s)
            {
                switch (c)
                {
                case '<': out += "&lt;"; break;
                case '>': out += "&gt;"; break;
                case '&': out += "&amp;"; break;
                case '"': out += "&quot;"; break;
                default: out += c;
                }
            }
            return out;
        }

        /// Round tick step for a span covered by about n ticks.
        double nice_step(double span, int n)
        {
            const double raw = span / n;
            const double mag = std::pow(10.0, std::floor(std::log10(raw)));
            const double r = raw / mag;
            return (r < 1.5 ? 1.0 : r < 3.5 ? 2.0 : r < 7.5 ? 5.0 : 10.0) * mag;
        }
    } // namespace

    std::string line_plot_svg(const PlotSpec &spec)
    {
        double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
        for (const Series &s : spec.series)
        {
            if (s.x.size() != s.y.size())
                throw std::invalid_argument("line_plot_svg: series '" + s.name + "' has mismatched x and y");
            for (std::size_t i = 0; i < s.x.size(); ++i)
            {
                if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i]))
                    throw ArtifactError("line_plot_svg: non-finite point in series '" + s.name + "'");
                x0 = std::min(x0, s.x[i]);
                x1 = std::max(x1, s.x[i]);
                y0 = std::min(y0, s.y[i]);
                y1 = std::max(y1, s.y[i]);
            }
        }
        if (!std::isfinite(x0))
            x0 = 0, x1 = 1, y0 = 0, y1 = 1;
        if (x1 - x0 < 1e-12)
            x0 -= 0.5, x1 += 0.5;
        if (y1 - y0 < 1e-12)
            y0 -= 0.5, y1 += 0.5;
        const double ys = nice_step(y1 - y0, 5);
        y0 = std::floor(y0 / ys) * ys;
        y1 = std::ceil(y1 / ys) * ys;
        const double xs = nice_step(x1 - x0, 6);

        const double left = 70, right = 150, top = 40, bottom = 55;
        const double pw = spec.width - left - right, ph = spec.height - top - bottom;
        auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
        auto py = [&](double y) { return top + (1.0 - (y - y0) / (y1 - y0)) * ph; };

        std::ostringstream os;
        os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(spec.width, "%.0f") << "\" height=\""
           << fmt(spec.height, "%.0f") << "\" viewBox=\"0 0 " << fmt(spec.width, "%.0f") << " "
           << fmt(spec.height, "%.0f") << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
        os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        os << "<text x=\"" << fmt(left + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
           << escape(spec.title) << "</text>\n";
        os << "<rect x=\"" << fmt(left) << "\" y=\"" << fmt(top) << "\" width=\"" << fmt(pw) << "\" height=\""
           << fmt(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
        for (double y = y0; y <= y1 + 1e-9 * ys; y += ys)
        {
            os << "<line x1=\"" << fmt(left) << "\" y1=\"" << fmt(py(y)) << "\" x2=\"" << fmt(left + pw) << "\" y2=\""
               << fmt(py(y)) << "\" stroke=\"#dddddd\"/>\n";
            os << "<text x=\"" << fmt(left - 6) << "\" y=\"" << fmt(py(y) + 4) << "\" text-anchor=\"end\">"
               << fmt(std::abs(y) < 1e-12 * ys ? 0.0 : y, "%g") << "</text>\n";
        }
        for (double x = std::ceil(x0 / xs) * xs; x <= x1 + 1e-9 * xs; x += xs)
            os << "<text x=\"" << fmt(px(x)) << "\" y=\"" << fmt(top + ph + 18) << "\" text-anchor=\"middle\">"
               << fmt(std::abs(x) < 1e-12 * xs ? 0.0 : x, "%g") << "</text>\n";
        os << "<text x=\"" << fmt(left + pw / 2) << "\" y=\"" << fmt(spec.height - 12)
           << "\" text-anchor=\"middle\">" << escape(spec.x_label) << "</text>\n";
        os << "<text transform=\"translate(18 " << fmt(top + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
           << escape(spec.y_label) << "</text>\n";

        for (std::size_t k = 0; k < spec.series.size(); ++k)
        {
            const Series &s = spec.series[k];
            const char *color = palette[k % (sizeof palette / sizeof *palette)];
            os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.8\" points=\"";
            for (std::size_t i = 0; i < s.x.size(); ++i)
                os << (i ? " " : "") << fmt(px(s.x[i])) << "," << fmt(py(s.y[i]));
            os << "\"/>\n";
            if (s.x.size() <= 40)
                for (std::size_t i = 0; i < s.x.size(); ++i)
                    os << "<circle cx=\"" << fmt(px(s.x[i])) << "\" cy=\"" << fmt(py(s.y[i])) << "\" r=\"3\" fill=\""
                       << color << "\"/>\n";
            const double ly = top + 14 + 18.0 * static_cast<double>(k);
            os << "<line x1=\"" << fmt(left + pw + 12) << "\" y1=\"" << fmt(ly - 4) << "\" x2=\"" << fmt(left + pw + 32)
               << "\" y2=\"" << fmt(ly - 4) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
            os << "<text x=\"" << fmt(left + pw + 38) << "\" y=\"" << fmt(ly) << "\">" << escape(s.name) << "</text>\n";
        }
        os << "</svg>\n";
        return os.str();
    }

    namespace
    {
        std::vector<Series> by_policy(const CsvTable &t, const std::string &column)
        {
            std::vector<Series> out;
            std::map<std::string, std::size_t> index;
            const std::size_t pc = t.column("policy");
            for (std::size_t r = 0; r < t.rows.size(); ++r)
            {
                const std::string &p = t.rows[r][pc];
                auto [it, fresh] = index.emplace(p, out.size());
                if (fresh)
                    out.push_back(Series{p, {}, {}});
                Series &s = out[it->second];
                s.x.push_back(t.number(r, "axis_value"));
                s.y.push_back(t.number(r, column));
            }
            for (Series &s : out)
            {
                std::vector<std::size_t> order(s.x.size());
                for (std::size_t i = 0; i < order.size(); ++i)
                    order[i] = i;
                std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return s.x[a] < s.x[b]; });
                Series sorted{s.name, {}, {}};
                for (std::size_t i : order)
                {
                    sorted.x.push_back(s.x[i]);
                    sorted.y.push_back(s.y[i]);
                }
                s = std::move(sorted);
            }
            return out;
        }
    } // namespace

    std::vector<std::pair<std::string, std::string>> sweep_plots(const CsvTable &aggregate, const std::string &axis)
    {
        std::vector<std::pair<std::string, std::string>> out;
        const std::map<std::string, std::pair<std::string, std::string>> names{
            {"snr", {"snr", "average transmit SNR (dB)"}},
            {"M", {"M", "number of relays"}},
            {"N_R", {"NR", "relay antennas"}},
            {"N_b", {"Nb", "packet size (bits)"}}};
        const auto it = names.find(axis);
        if (it == names.end())
            throw std::invalid_argument("sweep_plots: unknown axis '" + axis + "'");
        const auto &[tag, label] = it->second;
        out.emplace_back("delay_vs_" + tag + ".svg",
                         line_plot_svg(PlotSpec{"Average end-to-end delay", label, "delay (frames)",
                                                by_policy(aggregate, "avg_delay_frames_mean")}));
        if (axis == "snr")
            out.emplace_back("throughput_vs_snr.svg",
                             line_plot_svg(PlotSpec{"Average throughput", label, "throughput (packets/s)",
                                                    by_policy(aggregate, "throughput_pps_mean")}));
        return out;
    }

    std::string value_trace_plot(const CsvTable &trace)
    {
        std::map<int, Series> lines;
        const bool multi = std::find(trace.header.begin(), trace.header.end(), "seed") != trace.header.end();
        std::string first_seed, first_axis;
        for (std::size_t r = 0; r < trace.rows.size(); ++r)
        {
            if (multi)
            {
                const std::string &seed = trace.rows[r][trace.column("seed")];
                const std::string &axis = trace.rows[r][trace.column("axis_value")];
                if (first_seed.empty())
                    first_seed = seed, first_axis = axis;
                if (seed != first_seed || axis != first_axis)
                    continue;
            }
            if (trace.number(r, "node") != 1.0)
                continue;
            const int q = static_cast<int>(trace.number(r, "q"));
            Series &s = lines[q];
            s.name = "q = " + std::to_string(q);
            s.x.push_back(trace.number(r, "t"));
            s.y.push_back(trace.number(r, "value"));
        }
        PlotSpec spec{"Per-node value function of relay 1", "frame index", "value", {}};
        for (auto &[q, s] : lines)
            spec.series.push_back(std::move(s));
        return line_plot_svg(spec);
    }

} // namespace bdfrelay
