// SPDX-License-Identifier: Apache-2.0

#include "pentrack/svg.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace pentrack {
namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

} // namespace

void render_trace(const std::vector<Trace>& traces, const ScreenConfig& screen,
                  const std::string& path, double scale) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);

    const double w = screen.width_mm * scale;
    const double h = screen.height_mm * scale;
    f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(w) << "\" height=\""
      << fmt(h) << "\" viewBox=\"0 0 " << fmt(w) << " " << fmt(h) << "\">\n";
    f << "<rect x=\"0\" y=\"0\" width=\"" << fmt(w) << "\" height=\"" << fmt(h)
      << "\" fill=\"white\" stroke=\"black\" stroke-width=\"1\"/>\n";
    for (std::size_t k = 0; k < traces.size(); ++k) {
        f << "<polyline fill=\"none\" stroke=\""
          << kPalette[k % (sizeof kPalette / sizeof kPalette[0])]
          << "\" stroke-width=\"2\" points=\"";
        for (std::size_t i = 0; i < traces[k].size(); ++i) {
            if (i) f << ' ';
            f << fmt(traces[k][i].x * scale) << ',' << fmt(traces[k][i].y * scale);
        }
        f << "\"/>\n";
    }
    f << "</svg>\n";
    if (!f) throw std::runtime_error("write failed: " + path);
}

} // namespace pentrack
