#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "posemark/evaluation.hpp"
#include "posemark/geometry.hpp"
#include "posemark/pipeline.hpp"
#include "posemark/smoothing.hpp"
#include "posemark/sync.hpp"

namespace posemark::sim {

enum class HeadingPolicy { Fixed, AlongPath };

struct TrajectorySpec {
    std::vector<Vec3> waypoints;
    double speed = 0.35;  ///< m/s
    double fps = 60.0;    ///< per camera; the bundle is sampled at 2 fps
    HeadingPolicy heading = HeadingPolicy::Fixed;
    double fixed_yaw = 0.0;        ///< radians about world z, Fixed policy only
    std::optional<double> height;  ///< overrides waypoint z when set
    double lead_in = 0.0;          ///< stationary seconds at the first waypoint
    double tail = 0.0;             ///< stationary seconds at the last waypoint

    void validate() const;
    double path_length() const;
    /// lead_in + path_length / speed + tail
    double duration() const;
};

/// True bundle pose at one camera frame. Frames alternate between cameras.
struct TruthSample {
    FinalPose pose;
    int camera_id = 0;
};

/// Constant-speed piecewise-linear motion sampled at 2 fps over
/// [0, duration).
std::vector<TruthSample> gen_trajectory(const TrajectorySpec& spec);

/// The straight legs of the path with their traversal times.
std::vector<PathSegment> path_segments(const TrajectorySpec& spec);

enum class OutlierMode { AxisInversion, UniformJump };

struct NoiseModel {
    double translation_sigma = 0.0;  ///< meters, per axis
    double distance_growth = 0.0;    ///< extra sigma per meter of marker distance
    double rotation_sigma = 0.0;     ///< radians, per axis
    double outlier_probability = 0.0;
    /// When positive, the outlier probability scales with marker distance and
    /// equals `outlier_probability` at this range (capped at 1).
    double outlier_reference_distance = 0.0;
    OutlierMode outlier_mode = OutlierMode::AxisInversion;
    double jump_scale = 2.0;  ///< meters, half-width of a uniform jump
    double frame_dropout = 0.0;  ///< probability a frame yields no detections
    std::uint64_t seed = 1;

    void validate() const;
    static NoiseModel none() { return {}; }
    /// Noise level fitted so raw poses scatter like real detections.
    static NoiseModel calibrated(std::uint64_t seed = 1);
};

struct CameraModel {
    double fov = 2.0;         ///< full cone angle, radians
    double max_range = 12.0;  ///< meters
};

/// Noisy detections of every visible marker at every frame.
///
/// A marker is visible when it lies within the camera's view cone and range
/// and its face points toward the camera.
std::vector<MarkerObservation> gen_observations(std::span<const TruthSample> truth,
                                                std::span<const MarkerSpec> markers, const CameraRig& rig,
                                                const CameraModel& camera, const NoiseModel& noise);

struct CoverInterval {
    double begin = 0.0;  ///< video clock
    double end = 0.0;
};

/// Log-distance path loss. Scaffolding for sync tests, not a radio model.
struct RssiModel {
    std::string transmitter = "AA:BB:CC:DD:EE:01";
    double reference_power = -59.0;  ///< dBm at 1 m
    double exponent = 2.0;
    double shadowing_sigma = 0.0;  ///< dB
    double rate = 2.0;             ///< Hz per sensor
    std::vector<CoverInterval> covers;
    double cover_attenuation = 20.0;  ///< dB
    double clock_offset = 0.0;        ///< RSSI clock minus video clock
    std::uint64_t seed = 1;

    void validate() const;
};

struct Sensor {
    std::string mac;
    Vec3 position = Vec3::Zero();
};

/// Samples every sensor at the model rate over the truth span. Output is
/// sorted by timestamp on the RSSI clock.
std::vector<RssiSample> gen_rssi(std::span<const TruthSample> truth, std::span<const Sensor> sensors,
                                 const RssiModel& model);

/// Noise-free RSSI at a given distance, without cover attenuation.
double path_loss_rssi(const RssiModel& model, double distance);

// Reference scene: a 20.66 x 17.64 m office with markers on the walls.
inline constexpr double kRoomWidth = 20.66;
inline constexpr double kRoomDepth = 17.64;
inline constexpr double kBundleHeight = 2.0;

/// 30 markers at bundle height: 22 on the walls, 8 on two columns.
std::vector<MarkerSpec> office_markers();
/// 12 wall-mounted sensors.
std::vector<Sensor> office_sensors();

enum class PathShape { Straight, Rectangle, Zigzag };

/// Reference trajectories inside the office.
TrajectorySpec office_path(PathShape shape);

/// Everything one simulated run produces.
struct Dataset {
    std::vector<MarkerSpec> markers;
    std::vector<TruthSample> truth;
    std::vector<MarkerObservation> observations;
    std::vector<RssiSample> rssi;
    std::vector<PathSegment> path;
    double video_release = 0.0;  ///< end of the first cover, video clock
};

struct ScenarioOptions {
    TrajectorySpec trajectory = office_path(PathShape::Straight);
    NoiseModel noise = NoiseModel::calibrated();
    CameraModel camera;
    RssiModel rssi;
};

/// Runs all generators. The default RSSI model is given one cover inside the
/// lead-in when it has none.
Dataset simulate(const ScenarioOptions& options);

}  // namespace posemark::sim
