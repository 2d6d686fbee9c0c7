#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "posemark/evaluation.hpp"
#include "posemark/io.hpp"

namespace posemark::plot {

/// Five-number summary with Tukey whiskers (1.5 IQR).
struct BoxStats {
    double q1 = 0.0;
    double median = 0.0;
    double q3 = 0.0;
    double whisker_low = 0.0;
    double whisker_high = 0.0;
    std::size_t outliers = 0;
};

BoxStats box_stats(std::vector<double> values);

struct Series {
    std::string label;
    std::vector<double> values;
};

/// Side-by-side boxplots of deviation distributions, in meters.
std::string boxplot_svg(std::span<const Series> series, const std::string& title);

/// Top-down map of the path segments and estimated positions.
std::string map_svg(std::span<const PathSegment> path, std::span<const Vec3> points, const io::PlotConfig& config);

void write_text(const std::filesystem::path& path, const std::string& text);

}  // namespace posemark::plot
