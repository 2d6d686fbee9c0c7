#include "posemark/sync.hpp"

#include <algorithm>
#include <cmath>

#include "posemark/errors.hpp"

namespace posemark {

CoverEvent detect_cover_event(std::span<const RssiSample> samples, const CoverDetectParams& params) {
    if (!(params.window > 0.0) || !(params.step > 0.0) || params.step > params.window) {
        throw InvalidParameter("window and step must be positive with step <= window");
    }
    if (!(params.threshold > 0.0 && params.threshold < 1.0)) {
        throw InvalidParameter("dip threshold must lie in (0, 1)");
    }

    // Only strong-band samples take part, so weaker traffic cannot move the grid.
    std::vector<double> strong;
    for (const auto& s : samples) {
        if (s.rssi >= params.band_low && s.rssi <= params.band_high) strong.push_back(s.timestamp);
    }
    std::sort(strong.begin(), strong.end());
    if (strong.empty() || strong.back() - strong.front() < 2.0 * params.window) {
        throw DetectionFailure("less than two windows of strong-band data");
    }

    const double origin = strong.front();
    const double w = params.window;
    const auto n_windows = static_cast<std::size_t>(std::floor((strong.back() - origin - w) / params.step)) + 1;
    auto window_start = [&](std::size_t k) { return origin + static_cast<double>(k) * params.step; };

    std::vector<double> counts(n_windows);
    for (std::size_t k = 0; k < n_windows; ++k) {
        const double t = window_start(k);
        const auto lo = std::lower_bound(strong.begin(), strong.end(), t);
        const auto hi = std::lower_bound(lo, strong.end(), t + w);
        counts[k] = static_cast<double>(hi - lo);
    }

    // Windows wholly preceding window k: j * step + w <= k * step.
    const auto lag = static_cast<std::size_t>(std::ceil(w / params.step - 1e-9));
    double preceding_sum = 0.0;
    for (std::size_t k = lag; k < n_windows; ++k) {
        preceding_sum += counts[k - lag];
        const double baseline = preceding_sum / static_cast<double>(k - lag + 1);
        const double level = params.threshold * baseline;
        if (baseline <= 0.0 || counts[k] >= level) continue;

        std::size_t last_low = k;
        double deepest = counts[k];
        while (last_low + 1 < n_windows && counts[last_low + 1] < level) {
            ++last_low;
            deepest = std::min(deepest, counts[last_low]);
        }
        if (last_low + 1 == n_windows) {
            throw DetectionFailure("strong-band count never recovers after the dip");
        }
        // A window straddling an edge holds a count proportional to its overlap
        // with the uncovered side; invert that at the threshold crossing.
        CoverEvent ev;
        ev.cover_time = window_start(k) - 0.5 * params.step + params.threshold * w;
        ev.release_time = window_start(last_low) + 0.5 * params.step + (1.0 - params.threshold) * w;
        ev.confidence = std::clamp(1.0 - deepest / baseline, 0.0, 1.0);
        return ev;
    }
    throw DetectionFailure("no dip in strong-band RSSI count");
}

std::pair<Vec3, RotationMatrix> interpolate_pose(std::span<const FinalPose> trajectory, double t) {
    if (trajectory.empty()) throw ExtrapolationError("empty trajectory");
    if (!(t >= trajectory.front().timestamp && t <= trajectory.back().timestamp)) {
        throw ExtrapolationError("time outside trajectory span");
    }
    const auto upper = std::lower_bound(trajectory.begin(), trajectory.end(), t,
                                        [](const FinalPose& p, double v) { return p.timestamp < v; });
    if (upper->timestamp == t) {
        return {upper->position, rodrigues(upper->rotation)};
    }
    const FinalPose& b = *upper;
    const FinalPose& a = *(upper - 1);
    const double alpha = (t - a.timestamp) / (b.timestamp - a.timestamp);
    const Vec3 position = (1.0 - alpha) * a.position + alpha * b.position;
    const FinalPose& nearer = alpha <= 0.5 ? a : b;
    return {position, rodrigues(nearer.rotation)};
}

AnnotationResult annotate(std::span<const RssiSample> rssi, std::span<const FinalPose> trajectory, double offset) {
    if (trajectory.empty()) throw InvalidParameter("cannot annotate against an empty trajectory");
    AnnotationResult result;
    const double first = trajectory.front().timestamp;
    const double last = trajectory.back().timestamp;
    for (const auto& s : rssi) {
        const double video_time = s.timestamp - offset;
        if (video_time < first || video_time > last) {
            ++result.dropped;
            continue;
        }
        auto [position, rotation] = interpolate_pose(trajectory, video_time);
        result.samples.push_back({s, position, rotation});
    }
    return result;
}

}  // namespace posemark
