#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <string>
#include <vector>

#include "../error.hpp"

namespace fahtp::io {

struct Series {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

struct HorizontalLine {
    std::string name;
    double y = 0.0;
};

struct LinePlot {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
    std::vector<HorizontalLine> lines;
};

namespace detail {

inline std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

inline std::string escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

inline const char* palette(std::size_t i)
{
    static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                   "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
    return colors[i % 10];
}

} // namespace detail

/// Static line chart. Non-finite points are skipped. Output depends only on the input.
inline std::string render_svg(const LinePlot& plot)
{
    constexpr double width = 640, height = 420, left = 70, right = 170, top = 40, bottom = 55;
    double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
    for (const auto& s : plot.series) {
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            x0 = std::min(x0, s.x[i]);
            x1 = std::max(x1, s.x[i]);
            y0 = std::min(y0, s.y[i]);
            y1 = std::max(y1, s.y[i]);
        }
    }
    for (const auto& h : plot.lines) {
        if (!std::isfinite(h.y)) continue;
        y0 = std::min(y0, h.y);
        y1 = std::max(y1, h.y);
    }
    if (!(x0 <= x1)) x0 = 0, x1 = 1;
    if (!(y0 <= y1)) y0 = 0, y1 = 1;
    if (x0 == x1) x0 -= 0.5, x1 += 0.5;
    if (y0 == y1) y0 -= 0.5, y1 += 0.5;
    const double pad = 0.05 * (y1 - y0);
    y0 -= pad;
    y1 += pad;

    const double pw = width - left - right, ph = height - top - bottom;
    const auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
    const auto py = [&](double y) { return top + (y1 - y) / (y1 - y0) * ph; };
    using detail::num;

    std::string out;
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" + num(height) +
           "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out += "<text x=\"" + num(left + pw / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" +
           detail::escape(plot.title) + "</text>\n";
    out += "<rect x=\"" + num(left) + "\" y=\"" + num(top) + "\" width=\"" + num(pw) + "\" height=\"" + num(ph) +
           "\" fill=\"none\" stroke=\"black\"/>\n";
    for (int k = 0; k <= 4; ++k) {
        const double xv = x0 + (x1 - x0) * k / 4.0, yv = y0 + (y1 - y0) * k / 4.0;
        out += "<text x=\"" + num(px(xv)) + "\" y=\"" + num(top + ph + 16) + "\" text-anchor=\"middle\">" + num(xv) +
               "</text>\n";
        out += "<text x=\"" + num(left - 6) + "\" y=\"" + num(py(yv) + 4) + "\" text-anchor=\"end\">" + num(yv) +
               "</text>\n";
    }
    out += "<text x=\"" + num(left + pw / 2) + "\" y=\"" + num(height - 12) + "\" text-anchor=\"middle\">" +
           detail::escape(plot.x_label) + "</text>\n";
    out += "<text transform=\"translate(16," + num(top + ph / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
           detail::escape(plot.y_label) + "</text>\n";

    std::size_t legend = 0;
    const auto legend_entry = [&](const std::string& name, const char* color, bool dashed) {
        const double ly = top + 10 + 18 * static_cast<double>(legend++);
        const double lx = left + pw + 12;
        out += "<line x1=\"" + num(lx) + "\" y1=\"" + num(ly) + "\" x2=\"" + num(lx + 20) + "\" y2=\"" + num(ly) +
               "\" stroke=\"" + color + "\"" + (dashed ? " stroke-dasharray=\"5,3\"" : "") + "/>\n";
        out += "<text x=\"" + num(lx + 26) + "\" y=\"" + num(ly + 4) + "\">" + detail::escape(name) + "</text>\n";
    };

    for (std::size_t k = 0; k < plot.series.size(); ++k) {
        const auto& s = plot.series[k];
        std::string points;
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
            points += num(px(s.x[i])) + "," + num(py(s.y[i])) + " ";
        }
        if (!points.empty()) points.pop_back();
        out += "<polyline fill=\"none\" stroke-width=\"1.5\" stroke=\"" + std::string(detail::palette(k)) +
               "\" points=\"" + points + "\"/>\n";
        if (!s.name.empty()) legend_entry(s.name, detail::palette(k), false);
    }
    for (const auto& h : plot.lines) {
        if (!std::isfinite(h.y)) continue;
        out += "<line x1=\"" + num(left) + "\" y1=\"" + num(py(h.y)) + "\" x2=\"" + num(left + pw) + "\" y2=\"" +
               num(py(h.y)) + "\" stroke=\"black\" stroke-dasharray=\"5,3\"/>\n";
        if (!h.name.empty()) legend_entry(h.name, "black", true);
    }
    out += "</svg>\n";
    return out;
}

inline void write_svg(const std::string& path, const LinePlot& plot)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) fahtp::detail::fail(ErrorCode::io_error, "cannot write '" + path + "'");
    out << render_svg(plot);
    if (!out) fahtp::detail::fail(ErrorCode::io_error, "write failed on '" + path + "'");
}

} // namespace fahtp::io
