#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "mgseir/format.hpp"

namespace mgseir::svg {

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    std::string color = "#1f77b4";
    bool step = false;     // right-continuous step plot
    bool markers = false;  // dots instead of a line
};

struct Chart {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
    std::vector<double> guides_y;  // dashed horizontal lines
    double width = 720;
    double height = 440;
};

inline const std::vector<std::string>& palette() {
    static const std::vector<std::string> p = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
    return p;
}

namespace detail {

inline std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline std::string tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

}  // namespace detail

/// Renders a chart with linear axes. Non-finite points are skipped.
inline std::string render(const Chart& c) {
    const double ml = 70, mr = 20, mt = 40, mb = 60;
    const double pw = c.width - ml - mr, ph = c.height - mt - mb;

    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : c.series)
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, s.y[i]);
            y1 = std::max(y1, s.y[i]);
        }
    for (double g : c.guides_y) {
        y0 = std::min(y0, g);
        y1 = std::max(y1, g);
    }
    if (!std::isfinite(x0)) x0 = 0, x1 = 1;
    if (!std::isfinite(y0)) y0 = 0, y1 = 1;
    if (x1 <= x0) x1 = x0 + 1;
    if (y1 <= y0) y1 = y0 + (y0 == 0 ? 1 : std::abs(y0) * 0.1);
    const double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;

    auto px = [&](double x) { return ml + (x - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) { return mt + (1.0 - (y - y0) / (y1 - y0)) * ph; };

    std::string o;
    o += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + detail::num(c.width) + "\" height=\"" +
         detail::num(c.height) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    o += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    o += "<text x=\"" + detail::num(c.width / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" +
         detail::escape(c.title) + "</text>\n";
    o += "<rect x=\"" + detail::num(ml) + "\" y=\"" + detail::num(mt) + "\" width=\"" + detail::num(pw) +
         "\" height=\"" + detail::num(ph) + "\" fill=\"none\" stroke=\"#333\"/>\n";

    for (int k = 0; k <= 5; ++k) {
        const double xv = x0 + (x1 - x0) * k / 5.0, yv = y0 + (y1 - y0) * k / 5.0;
        o += "<text x=\"" + detail::num(px(xv)) + "\" y=\"" + detail::num(mt + ph + 16) +
             "\" text-anchor=\"middle\">" + detail::tick(xv) + "</text>\n";
        o += "<text x=\"" + detail::num(ml - 6) + "\" y=\"" + detail::num(py(yv) + 4) + "\" text-anchor=\"end\">" +
             detail::tick(yv) + "</text>\n";
    }
    o += "<text x=\"" + detail::num(ml + pw / 2) + "\" y=\"" + detail::num(c.height - 18) +
         "\" text-anchor=\"middle\">" + detail::escape(c.x_label) + "</text>\n";
    o += "<text transform=\"translate(16," + detail::num(mt + ph / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
         detail::escape(c.y_label) + "</text>\n";

    for (double g : c.guides_y)
        o += "<line x1=\"" + detail::num(ml) + "\" x2=\"" + detail::num(ml + pw) + "\" y1=\"" + detail::num(py(g)) +
             "\" y2=\"" + detail::num(py(g)) + "\" stroke=\"#777\" stroke-dasharray=\"6,4\"/>\n";

    for (const auto& s : c.series) {
        const std::size_t n = std::min(s.x.size(), s.y.size());
        if (s.markers) {
            for (std::size_t i = 0; i < n; ++i)
                if (std::isfinite(s.x[i]) && std::isfinite(s.y[i]))
                    o += "<circle cx=\"" + detail::num(px(s.x[i])) + "\" cy=\"" + detail::num(py(s.y[i])) +
                         "\" r=\"3.5\" fill=\"" + s.color + "\"/>\n";
            continue;
        }
        std::string pts;
        for (std::size_t i = 0; i < n; ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            if (s.step && i > 0 && std::isfinite(s.y[i - 1]))
                pts += detail::num(px(s.x[i])) + "," + detail::num(py(s.y[i - 1])) + " ";
            pts += detail::num(px(s.x[i])) + "," + detail::num(py(s.y[i])) + " ";
        }
        o += "<polyline fill=\"none\" stroke=\"" + s.color + "\" stroke-width=\"1.8\" points=\"" + pts + "\"/>\n";
    }

    double ly = mt + 14;
    for (const auto& s : c.series) {
        if (s.label.empty()) continue;
        o += "<rect x=\"" + detail::num(ml + pw - 150) + "\" y=\"" + detail::num(ly - 9) +
             "\" width=\"12\" height=\"10\" fill=\"" + s.color + "\"/>\n";
        o += "<text x=\"" + detail::num(ml + pw - 132) + "\" y=\"" + detail::num(ly) + "\">" +
             detail::escape(s.label) + "</text>\n";
        ly += 16;
    }
    o += "</svg>\n";
    return o;
}

}  // namespace mgseir::svg
