#pragma once

// Minimal SVG line plots: valid XML, one <polyline> per series, no external
// renderer. Coordinates are written with fixed precision so repeated runs
// emit identical bytes.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include "phototherm/errors.hpp"

namespace phototherm {

struct PlotSeries {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
};

namespace detail {

inline std::string xml_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += c;
        }
    }
    return out;
}

inline std::string f3(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

} // namespace detail

// Renders series into a self-contained SVG document. Non-finite samples are
// dropped from the polylines; an empty plot is an error.
inline std::string render_svg_plot(const std::string& title, const std::string& x_label,
                                   const std::string& y_label,
                                   const std::vector<PlotSeries>& series) {
    static const char* palette[] = {"#1b6ca8", "#c0392b", "#1e8449", "#8e44ad",
                                    "#d68910", "#148f77", "#7b241c", "#2e4053"};
    constexpr double width = 720.0, height = 480.0;
    constexpr double ml = 72.0, mr = 24.0, mt = 40.0, mb = 56.0;

    double xmin = INFINITY, xmax = -INFINITY, ymin = INFINITY, ymax = -INFINITY;
    std::size_t usable = 0;
    for (const auto& s : series) {
        if (s.x.size() != s.y.size())
            throw params_error("render_svg_plot: series '" + s.label + "' has mismatched lengths");
        for (std::size_t k = 0; k < s.x.size(); ++k) {
            if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
            xmin = std::min(xmin, s.x[k]); xmax = std::max(xmax, s.x[k]);
            ymin = std::min(ymin, s.y[k]); ymax = std::max(ymax, s.y[k]);
            ++usable;
        }
    }
    if (usable == 0) throw params_error("render_svg_plot: no finite samples to plot");
    if (xmax <= xmin) { xmax = xmin + 1.0; xmin -= 1.0; }
    const double ypad = (ymax > ymin) ? 0.05 * (ymax - ymin) : std::max(1.0, std::abs(ymax));
    ymin -= ypad; ymax += ypad;

    auto px = [&](double v) { return ml + (v - xmin) / (xmax - xmin) * (width - ml - mr); };
    auto py = [&](double v) { return height - mb - (v - ymin) / (ymax - ymin) * (height - mt - mb); };

    std::string svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"720\" height=\"480\" "
           "viewBox=\"0 0 720 480\">\n";
    svg += "<rect x=\"0\" y=\"0\" width=\"720\" height=\"480\" fill=\"#ffffff\"/>\n";
    svg += "<rect x=\"" + detail::f3(ml) + "\" y=\"" + detail::f3(mt) + "\" width=\"" +
           detail::f3(width - ml - mr) + "\" height=\"" + detail::f3(height - mt - mb) +
           "\" fill=\"none\" stroke=\"#444444\" stroke-width=\"1\"/>\n";

    // axis extremes as tick labels
    auto text = [&](double x, double y, const std::string& s, const char* anchor,
                    const char* extra = "") {
        svg += "<text x=\"" + detail::f3(x) + "\" y=\"" + detail::f3(y) +
               "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"" + anchor +
               "\"" + extra + ">" + detail::xml_escape(s) + "</text>\n";
    };
    text(ml, height - mb + 16.0, detail::f3(xmin), "middle");
    text(width - mr, height - mb + 16.0, detail::f3(xmax), "middle");
    text(ml - 6.0, height - mb + 4.0, detail::f3(ymin), "end");
    text(ml - 6.0, mt + 4.0, detail::f3(ymax), "end");
    text(width / 2.0, 24.0, title, "middle", " font-weight=\"bold\"");
    text(width / 2.0, height - 16.0, x_label, "middle");
    svg += "<text x=\"16\" y=\"" + detail::f3(height / 2.0) +
           "\" font-family=\"sans-serif\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
           detail::f3(height / 2.0) + ")\">" + detail::xml_escape(y_label) + "</text>\n";

    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const char* color = palette[si % (sizeof(palette) / sizeof(palette[0]))];
        std::string pts;
        for (std::size_t k = 0; k < s.x.size(); ++k) {
            if (!std::isfinite(s.x[k]) || !std::isfinite(s.y[k])) continue;
            if (!pts.empty()) pts += ' ';
            pts += detail::f3(px(s.x[k])) + "," + detail::f3(py(s.y[k]));
        }
        svg += "<polyline fill=\"none\" stroke=\"";
        svg += color;
        svg += "\" stroke-width=\"1.5\" points=\"" + pts + "\"/>\n";
        text(ml + 8.0, mt + 16.0 + 16.0 * static_cast<double>(si), s.label, "start",
             (std::string(" fill=\"") + color + "\"").c_str());
    }
    svg += "</svg>\n";
    return svg;
}

} // namespace phototherm
