#include "posemark/plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "posemark/errors.hpp"

namespace posemark::plot {

namespace {

double quantile(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) return 0.0;
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const auto hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (pos - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

std::string num(double v) {
    std::ostringstream ss;
    ss.precision(4);
    ss << v;
    return ss.str();
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            default: out += c;
        }
    }
    return out;
}

}  // namespace

BoxStats box_stats(std::vector<double> values) {
    BoxStats b;
    if (values.empty()) return b;
    std::sort(values.begin(), values.end());
    b.q1 = quantile(values, 0.25);
    b.median = quantile(values, 0.5);
    b.q3 = quantile(values, 0.75);
    const double iqr = b.q3 - b.q1;
    const double lo_fence = b.q1 - 1.5 * iqr;
    const double hi_fence = b.q3 + 1.5 * iqr;
    b.whisker_low = *std::lower_bound(values.begin(), values.end(), lo_fence);
    b.whisker_high = *(std::upper_bound(values.begin(), values.end(), hi_fence) - 1);
    for (double v : values) {
        if (v < lo_fence || v > hi_fence) ++b.outliers;
    }
    return b;
}

std::string boxplot_svg(std::span<const Series> series, const std::string& title) {
    const double width = 120.0 + 90.0 * static_cast<double>(series.size());
    const double height = 420.0;
    const double top = 40.0, bottom = 340.0, left = 70.0;

    std::vector<BoxStats> stats;
    double ymax = 0.0;
    for (const auto& s : series) {
        stats.push_back(box_stats(s.values));
        ymax = std::max(ymax, stats.back().whisker_high);
    }
    if (ymax <= 0.0) ymax = 1.0;
    auto y = [&](double v) { return bottom - (bottom - top) * std::min(v, ymax) / ymax; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\"" << num(height)
        << "\" font-family=\"sans-serif\" font-size=\"11\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << num(width / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"13\">" << escape(title)
        << "</text>\n";
    svg << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << bottom
        << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double v = ymax * i / 5.0;
        svg << "<text x=\"" << left - 6 << "\" y=\"" << num(y(v) + 4) << "\" text-anchor=\"end\">" << num(v)
            << "</text>\n";
        svg << "<line x1=\"" << left - 3 << "\" y1=\"" << num(y(v)) << "\" x2=\"" << left << "\" y2=\"" << num(y(v))
            << "\" stroke=\"black\"/>\n";
    }
    svg << "<text x=\"16\" y=\"" << num((top + bottom) / 2) << "\" transform=\"rotate(-90 16 "
        << num((top + bottom) / 2) << ")\" text-anchor=\"middle\">deviation (m)</text>\n";

    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto& b = stats[i];
        const double cx = left + 60.0 + 90.0 * static_cast<double>(i);
        svg << "<line x1=\"" << num(cx) << "\" y1=\"" << num(y(b.whisker_low)) << "\" x2=\"" << num(cx) << "\" y2=\""
            << num(y(b.whisker_high)) << "\" stroke=\"black\"/>\n";
        svg << "<rect x=\"" << num(cx - 25) << "\" y=\"" << num(y(b.q3)) << "\" width=\"50\" height=\""
            << num(std::max(0.5, y(b.q1) - y(b.q3))) << "\" fill=\"#9ecae1\" stroke=\"black\"/>\n";
        svg << "<line x1=\"" << num(cx - 25) << "\" y1=\"" << num(y(b.median)) << "\" x2=\"" << num(cx + 25)
            << "\" y2=\"" << num(y(b.median)) << "\" stroke=\"#d62728\" stroke-width=\"2\"/>\n";
        svg << "<text x=\"" << num(cx) << "\" y=\"" << num(bottom + 16) << "\" text-anchor=\"middle\">"
            << escape(series[i].label) << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

std::string map_svg(std::span<const PathSegment> path, std::span<const Vec3> points, const io::PlotConfig& config) {
    const double s = config.pixels_per_meter;
    const double m = config.margin;
    const double width = config.width_m * s + 2 * m;
    const double height = config.depth_m * s + 2 * m;
    auto px = [&](const Vec3& p) { return m + (p.x() - config.origin_x) * s; };
    auto py = [&](const Vec3& p) { return height - m - (p.y() - config.origin_y) * s; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\"" << num(height)
        << "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<rect x=\"" << num(m) << "\" y=\"" << num(m) << "\" width=\"" << num(config.width_m * s)
        << "\" height=\"" << num(config.depth_m * s) << "\" fill=\"none\" stroke=\"gray\"/>\n";
    for (const auto& seg : path) {
        svg << "<line x1=\"" << num(px(seg.start)) << "\" y1=\"" << num(py(seg.start)) << "\" x2=\""
            << num(px(seg.end)) << "\" y2=\"" << num(py(seg.end)) << "\" stroke=\"green\" stroke-width=\"2\"/>\n";
    }
    for (const auto& p : points) {
        svg << "<circle cx=\"" << num(px(p)) << "\" cy=\"" << num(py(p)) << "\" r=\"1.2\" fill=\"black\"/>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    out << text;
    if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace posemark::plot
