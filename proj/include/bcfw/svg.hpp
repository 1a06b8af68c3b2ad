#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bcfw/trace.hpp"

// Minimal static SVG line plots for the experiment traces. Layout and styling
// are best-effort presentation, not a compatibility surface.

namespace bcfw {

struct PlotSeries {
    std::string label;
    std::vector<std::pair<double, double>> points;  // (x, y)
};

inline void write_svg_line_plot(const std::string& path, const std::string& title,
                                const std::string& x_label, const std::string& y_label,
                                const std::vector<PlotSeries>& series, bool log_y = true) {
    const double width = 720, height = 480;
    const double ml = 80, mr = 24, mt = 40, mb = 56;  // margins
    const double pw = width - ml - mr, ph = height - mt - mb;

    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    auto usable = [&](double y) { return !log_y || y > 0.0; };
    for (const auto& s : series)
        for (auto [x, y] : s.points) {
            if (!std::isfinite(x) || !std::isfinite(y) || !usable(y)) continue;
            xmin = std::min(xmin, x); xmax = std::max(xmax, x);
            ymin = std::min(ymin, y); ymax = std::max(ymax, y);
        }
    if (!(xmin <= xmax)) { xmin = 0; xmax = 1; ymin = log_y ? 1e-1 : 0; ymax = 1; }
    if (xmax == xmin) xmax = xmin + 1;
    if (ymax == ymin) ymax = log_y ? ymin * 10 : ymin + 1;

    auto ty = [&](double y) {
        const double a = log_y ? std::log10(y) : y;
        const double lo = log_y ? std::log10(ymin) : ymin;
        const double hi = log_y ? std::log10(ymax) : ymax;
        return mt + ph * (1.0 - (a - lo) / (hi - lo));
    };
    auto tx = [&](double x) { return ml + pw * (x - xmin) / (xmax - xmin); };

    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("write_svg_line_plot: cannot open " + path);
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << width << "' height='"
        << height << "' viewBox='0 0 " << width << " " << height << "'>\n"
        << "<rect width='100%' height='100%' fill='white'/>\n"
        << "<text x='" << width / 2 << "' y='24' text-anchor='middle' font-size='16' "
        << "font-family='sans-serif'>" << title << "</text>\n";

    // Axes frame and tick labels.
    out << "<rect x='" << ml << "' y='" << mt << "' width='" << pw << "' height='" << ph
        << "' fill='none' stroke='#333'/>\n";
    const int n_ticks = 5;
    for (int k = 0; k <= n_ticks; ++k) {
        const double fx = xmin + (xmax - xmin) * k / n_ticks;
        out << "<line x1='" << tx(fx) << "' y1='" << mt + ph << "' x2='" << tx(fx)
            << "' y2='" << mt + ph + 5 << "' stroke='#333'/>\n"
            << "<text x='" << tx(fx) << "' y='" << mt + ph + 20
            << "' text-anchor='middle' font-size='11' font-family='sans-serif'>"
            << format_double(fx) << "</text>\n";
        double fy;
        if (log_y) {
            const double lo = std::log10(ymin), hi = std::log10(ymax);
            fy = std::pow(10.0, lo + (hi - lo) * k / n_ticks);
        } else {
            fy = ymin + (ymax - ymin) * k / n_ticks;
        }
        char ybuf[32];
        std::snprintf(ybuf, sizeof(ybuf), "%.2e", fy);
        out << "<line x1='" << ml - 5 << "' y1='" << ty(fy) << "' x2='" << ml << "' y2='"
            << ty(fy) << "' stroke='#333'/>\n"
            << "<text x='" << ml - 8 << "' y='" << ty(fy) + 4
            << "' text-anchor='end' font-size='11' font-family='sans-serif'>" << ybuf
            << "</text>\n";
    }
    out << "<text x='" << ml + pw / 2 << "' y='" << height - 12
        << "' text-anchor='middle' font-size='13' font-family='sans-serif'>" << x_label
        << "</text>\n"
        << "<text x='18' y='" << mt + ph / 2
        << "' text-anchor='middle' font-size='13' font-family='sans-serif' "
        << "transform='rotate(-90 18 " << mt + ph / 2 << ")'>" << y_label << "</text>\n";

    for (std::size_t s = 0; s < series.size(); ++s) {
        const char* color = palette[s % (sizeof(palette) / sizeof(palette[0]))];
        std::string pts;
        for (auto [x, y] : series[s].points) {
            if (!std::isfinite(x) || !std::isfinite(y) || !usable(y)) continue;
            pts += format_double(tx(x)) + "," + format_double(ty(y)) + " ";
        }
        out << "<polyline fill='none' stroke='" << color << "' stroke-width='1.5' points='"
            << pts << "'/>\n"
            << "<text x='" << ml + pw - 8 << "' y='" << mt + 18 + 16 * s
            << "' text-anchor='end' font-size='12' font-family='sans-serif' fill='" << color
            << "'>" << series[s].label << "</text>\n";
    }
    out << "</svg>\n";
    if (!out) throw std::runtime_error("write_svg_line_plot: write failed for " + path);
}

}  // namespace bcfw
