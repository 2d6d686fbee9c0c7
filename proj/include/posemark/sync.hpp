#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "posemark/geometry.hpp"
#include "posemark/smoothing.hpp"

namespace posemark {

struct RssiSample {
    double timestamp = 0.0;
    std::string transmitter;
    std::string sensor;
    double rssi = 0.0;  ///< dBm
};

struct AnnotatedSample {
    RssiSample sample;
    Vec3 position = Vec3::Zero();
    RotationMatrix rotation = RotationMatrix::Identity();
};

/// Hand-cover disturbance located in an RSSI stream.
struct CoverEvent {
    double cover_time = 0.0;
    double release_time = 0.0;
    double confidence = 0.0;  ///< 1 - (deepest windowed count / baseline)
};

struct CoverDetectParams {
    double band_low = -85.0;   ///< dBm
    double band_high = -65.0;  ///< dBm
    double window = 1.0;       ///< seconds
    double threshold = 0.25;   ///< dip level as a fraction of the baseline count
    double step = 0.05;        ///< window slide, seconds
};

/// Finds the first interval where the windowed count of strong-band samples
/// (all sensors pooled) falls below `threshold` times the mean count of the
/// windows preceding it. Throws DetectionFailure when there is none.
CoverEvent detect_cover_event(std::span<const RssiSample> samples, const CoverDetectParams& params = {});

/// Offset that maps video-clock times onto the RSSI clock.
inline double align_clocks(double video_release, double rssi_release) { return rssi_release - video_release; }

/// Linear position interpolation with the rotation of the nearer knot (the
/// earlier one on a tie). Throws ExtrapolationError outside the span.
std::pair<Vec3, RotationMatrix> interpolate_pose(std::span<const FinalPose> trajectory, double t);

struct AnnotationResult {
    std::vector<AnnotatedSample> samples;
    std::size_t dropped = 0;  ///< RSSI samples outside the trajectory span
};

/// Labels RSSI samples with interpolated poses. A sample at RSSI time t is
/// matched with video time t - offset. Throws InvalidParameter on an empty
/// trajectory.
AnnotationResult annotate(std::span<const RssiSample> rssi, std::span<const FinalPose> trajectory, double offset);

}  // namespace posemark
