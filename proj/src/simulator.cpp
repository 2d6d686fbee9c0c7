#include "posemark/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include <Eigen/Geometry>

#include "posemark/errors.hpp"

namespace posemark::sim {

namespace {

constexpr double kPi = std::numbers::pi;

double wrap_angle(double a) {
    a = std::remainder(a, 2.0 * kPi);
    return a <= -kPi ? a + 2.0 * kPi : a;
}

std::vector<Vec3> effective_waypoints(const TrajectorySpec& spec) {
    std::vector<Vec3> pts = spec.waypoints;
    if (spec.height) {
        for (auto& p : pts) p.z() = *spec.height;
    }
    return pts;
}

// Marker frame: x right, y up (world z), z out of the wall toward the viewer.
Vec3 wall_rotation(const Vec3& normal) {
    RotationMatrix R;
    const Vec3 y = Vec3::UnitZ();
    const Vec3 x = y.cross(normal);
    R.col(0) = x;
    R.col(1) = y;
    R.col(2) = normal;
    return rodrigues_inv(R);
}

std::string mac_for(int index) {
    char buf[18];
    std::snprintf(buf, sizeof buf, "00:1A:7D:DA:71:%02X", index);
    return buf;
}

}  // namespace

void TrajectorySpec::validate() const {
    if (waypoints.size() < 2) throw InvalidParameter("a trajectory needs at least two waypoints");
    if (!(speed > 0.0)) throw InvalidParameter("speed must be positive");
    if (!(fps > 0.0)) throw InvalidParameter("fps must be positive");
    if (lead_in < 0.0 || tail < 0.0) throw InvalidParameter("stationary periods must be non-negative");
}

double TrajectorySpec::path_length() const {
    const auto pts = effective_waypoints(*this);
    double len = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) len += (pts[i] - pts[i - 1]).norm();
    return len;
}

double TrajectorySpec::duration() const { return lead_in + path_length() / speed + tail; }

std::vector<TruthSample> gen_trajectory(const TrajectorySpec& spec) {
    spec.validate();
    const auto pts = effective_waypoints(spec);
    std::vector<double> cumulative{0.0};
    for (std::size_t i = 1; i < pts.size(); ++i) cumulative.push_back(cumulative.back() + (pts[i] - pts[i - 1]).norm());
    const double length = cumulative.back();

    const double rate = 2.0 * spec.fps;
    const auto n = static_cast<std::size_t>(std::ceil(spec.duration() * rate - 1e-9));
    std::vector<TruthSample> out;
    out.reserve(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double t = static_cast<double>(k) / rate;
        const double s = std::clamp((t - spec.lead_in) * spec.speed, 0.0, length);

        std::size_t seg = 0;
        while (seg + 2 < pts.size() && s > cumulative[seg + 1]) ++seg;
        const double seg_len = cumulative[seg + 1] - cumulative[seg];
        const double alpha = seg_len > 0.0 ? (s - cumulative[seg]) / seg_len : 0.0;
        const Vec3 dir = pts[seg + 1] - pts[seg];

        TruthSample sample;
        sample.camera_id = static_cast<int>(k % 2);
        sample.pose.timestamp = t;
        sample.pose.position = pts[seg] + alpha * dir;
        const double yaw = spec.heading == HeadingPolicy::Fixed ? spec.fixed_yaw : std::atan2(dir.y(), dir.x());
        sample.pose.rotation = Vec3(0.0, 0.0, wrap_angle(yaw));
        out.push_back(sample);
    }
    return out;
}

std::vector<PathSegment> path_segments(const TrajectorySpec& spec) {
    spec.validate();
    const auto pts = effective_waypoints(spec);
    std::vector<PathSegment> out;
    double t = spec.lead_in;
    for (std::size_t i = 1; i < pts.size(); ++i) {
        PathSegment seg;
        seg.start = pts[i - 1];
        seg.end = pts[i];
        seg.start_time = t;
        t += (pts[i] - pts[i - 1]).norm() / spec.speed;
        seg.end_time = t;
        out.push_back(seg);
    }
    return out;
}

void NoiseModel::validate() const {
    if (translation_sigma < 0.0 || distance_growth < 0.0 || rotation_sigma < 0.0 || jump_scale < 0.0) {
        throw InvalidParameter("noise sigmas must be non-negative");
    }
    if (!(outlier_probability >= 0.0 && outlier_probability <= 1.0)) {
        throw InvalidParameter("outlier probability must lie in [0, 1]");
    }
    if (outlier_reference_distance < 0.0) throw InvalidParameter("outlier reference distance must be non-negative");
    if (!(frame_dropout >= 0.0 && frame_dropout < 1.0)) throw InvalidParameter("frame dropout must lie in [0, 1)");
}

NoiseModel NoiseModel::calibrated(std::uint64_t seed) {
    NoiseModel m;
    m.translation_sigma = 0.01;
    m.distance_growth = 0.012;
    m.rotation_sigma = 0.01;
    m.outlier_probability = 0.3;
    m.outlier_reference_distance = 8.0;  // far markers flip more often
    // detections on roughly 24 of 120 frames per second
    m.frame_dropout = 0.8;
    m.outlier_mode = OutlierMode::AxisInversion;
    m.seed = seed;
    return m;
}

std::vector<MarkerObservation> gen_observations(std::span<const TruthSample> truth,
                                                std::span<const MarkerSpec> markers, const CameraRig& rig,
                                                const CameraModel& camera, const NoiseModel& noise) {
    noise.validate();
    std::mt19937_64 rng(noise.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    const double cos_half_fov = std::cos(0.5 * camera.fov);
    const RotationMatrix flip_xz = rodrigues(Vec3(0.0, kPi, 0.0));

    std::vector<MarkerObservation> out;
    for (const auto& sample : truth) {
        // blurred frame, nothing detected
        if (noise.frame_dropout > 0.0 && uniform(rng) < noise.frame_dropout) continue;
        const RotationMatrix R_wb = rodrigues(sample.pose.rotation);
        const RotationMatrix R_wc = R_wb * rig.mount(sample.camera_id);
        const Vec3& cam = sample.pose.position;
        const Vec3 view = R_wc.col(2);

        for (const auto& marker : markers) {
            const Vec3 to_marker = marker.position - cam;
            const double dist = to_marker.norm();
            if (dist > camera.max_range || dist == 0.0) continue;
            if (view.dot(to_marker) < cos_half_fov * dist) continue;
            const Vec3 normal = rodrigues(marker.rotation).col(2);
            if (normal.dot(-to_marker) <= 0.0) continue;

            MarkerObservation obs = observe_marker(cam, R_wc, marker);
            obs.timestamp = sample.pose.timestamp;
            obs.camera_id = sample.camera_id;

            const double sigma_t = noise.translation_sigma + noise.distance_growth * dist;
            if (sigma_t > 0.0) obs.position += sigma_t * Vec3(gauss(rng), gauss(rng), gauss(rng));
            if (noise.rotation_sigma > 0.0) {
                const Vec3 tilt = noise.rotation_sigma * Vec3(gauss(rng), gauss(rng), gauss(rng));
                obs.rotation = rodrigues_inv(rodrigues(obs.rotation) * rodrigues(tilt));
            }
            double p_out = noise.outlier_probability;
            if (noise.outlier_reference_distance > 0.0) {
                p_out = std::min(1.0, p_out * dist / noise.outlier_reference_distance);
            }
            if (p_out > 0.0 && uniform(rng) < p_out) {
                if (noise.outlier_mode == OutlierMode::AxisInversion) {
                    // marker x and z axes reported inverted
                    obs.rotation = rodrigues_inv(rodrigues(obs.rotation) * flip_xz);
                } else {
                    const double j = noise.jump_scale;
                    obs.position += Vec3((2 * uniform(rng) - 1) * j, (2 * uniform(rng) - 1) * j,
                                         (2 * uniform(rng) - 1) * j);
                }
            }
            out.push_back(obs);
        }
    }
    return out;
}

void RssiModel::validate() const {
    if (!(exponent > 0.0)) throw InvalidParameter("path-loss exponent must be positive");
    if (!(rate > 0.0)) throw InvalidParameter("RSSI sample rate must be positive");
    if (shadowing_sigma < 0.0) throw InvalidParameter("shadowing sigma must be non-negative");
    for (const auto& c : covers) {
        if (!(c.end > c.begin)) throw InvalidParameter("cover interval must have positive length");
    }
}

double path_loss_rssi(const RssiModel& model, double distance) {
    return model.reference_power - 10.0 * model.exponent * std::log10(std::max(distance, 0.1));
}

std::vector<RssiSample> gen_rssi(std::span<const TruthSample> truth, std::span<const Sensor> sensors,
                                 const RssiModel& model) {
    model.validate();
    std::vector<RssiSample> out;
    if (truth.empty()) return out;

    std::vector<FinalPose> poses;
    poses.reserve(truth.size());
    for (const auto& s : truth) poses.push_back(s.pose);
    const double t_begin = poses.front().timestamp;
    const double t_end = poses.back().timestamp;

    std::mt19937_64 rng(model.seed);
    std::uniform_real_distribution<double> phase(0.0, 1.0 / model.rate);
    std::normal_distribution<double> gauss(0.0, 1.0);

    for (const auto& sensor : sensors) {
        const double start = t_begin + phase(rng);
        for (std::size_t k = 0;; ++k) {
            const double t = start + static_cast<double>(k) / model.rate;
            if (t > t_end) break;
            const Vec3 beacon = interpolate_pose(poses, t).first;
            double rssi = path_loss_rssi(model, (beacon - sensor.position).norm());
            if (model.shadowing_sigma > 0.0) rssi += model.shadowing_sigma * gauss(rng);
            for (const auto& c : model.covers) {
                if (t >= c.begin && t < c.end) {
                    rssi -= model.cover_attenuation;
                    break;
                }
            }
            out.push_back({t + model.clock_offset, model.transmitter, sensor.mac, std::clamp(rssi, -120.0, 0.0)});
        }
    }
    std::stable_sort(out.begin(), out.end(),
                     [](const RssiSample& a, const RssiSample& b) { return a.timestamp < b.timestamp; });
    return out;
}

std::vector<MarkerSpec> office_markers() {
    std::vector<MarkerSpec> out;
    int id = 0;
    auto add = [&](double x, double y, const Vec3& normal) {
        MarkerSpec m;
        m.id = id++;
        m.position = Vec3(x, y, kBundleHeight);
        m.rotation = wall_rotation(normal);
        m.edge_length = 0.3;
        out.push_back(m);
    };
    for (int i = 0; i < 6; ++i) {
        const double x = kRoomWidth * (i + 0.5) / 6.0;
        add(x, 0.0, Vec3::UnitY());
        add(x, kRoomDepth, -Vec3::UnitY());
    }
    for (int i = 0; i < 5; ++i) {
        const double y = kRoomDepth * (i + 0.5) / 5.0;
        add(0.0, y, Vec3::UnitX());
        add(kRoomWidth, y, -Vec3::UnitX());
    }
    // two 0.6 m square columns, one marker per face
    for (const Vec3& c : {Vec3(7.0, 4.5, 0.0), Vec3(13.5, 13.0, 0.0)}) {
        for (const Vec3& n : {Vec3(Vec3::UnitX()), Vec3(-Vec3::UnitX()), Vec3(Vec3::UnitY()), Vec3(-Vec3::UnitY())}) {
            add(c.x() + 0.3 * n.x(), c.y() + 0.3 * n.y(), n);
        }
    }
    return out;
}

std::vector<Sensor> office_sensors() {
    std::vector<Sensor> out;
    const double h_adapter = 2.0;
    const double h_onboard = 1.0;
    const std::vector<Vec3> spots = {
        {0.2, 4.0, h_adapter},   {0.2, 13.6, h_adapter},  {20.4, 4.0, h_adapter},  {20.4, 13.6, h_adapter},
        {6.9, 0.2, h_adapter},   {13.8, 0.2, h_adapter},  {6.9, 17.4, h_adapter},  {13.8, 17.4, h_adapter},
        {3.0, 3.0, h_onboard},   {17.6, 3.0, h_onboard},  {3.0, 14.6, h_onboard},  {17.6, 14.6, h_onboard},
    };
    for (std::size_t i = 0; i < spots.size(); ++i) out.push_back({mac_for(static_cast<int>(i)), spots[i]});
    return out;
}

TrajectorySpec office_path(PathShape shape) {
    TrajectorySpec spec;
    spec.speed = 0.35;
    spec.fps = 60.0;
    spec.height = kBundleHeight;
    spec.lead_in = 8.0;
    spec.tail = 2.0;
    const double mid = kRoomDepth / 2.0;
    switch (shape) {
        case PathShape::Straight:
            spec.waypoints = {{3.0, mid, kBundleHeight}, {10.0, mid, kBundleHeight}};
            spec.heading = HeadingPolicy::Fixed;
            spec.fixed_yaw = kPi / 2.0;
            break;
        case PathShape::Rectangle:
            spec.waypoints = {{6.0, 5.5, kBundleHeight},
                              {14.0, 5.5, kBundleHeight},
                              {14.0, 12.0, kBundleHeight},
                              {6.0, 12.0, kBundleHeight},
                              {6.0, 5.5, kBundleHeight}};
            spec.heading = HeadingPolicy::Fixed;
            spec.fixed_yaw = kPi / 2.0;
            break;
        case PathShape::Zigzag:
            spec.waypoints = {{4.0, 6.0, kBundleHeight},
                              {7.5, 11.5, kBundleHeight},
                              {11.0, 6.0, kBundleHeight},
                              {14.5, 11.5, kBundleHeight},
                              {18.0, 6.0, kBundleHeight}};
            spec.heading = HeadingPolicy::AlongPath;
            break;
    }
    return spec;
}

Dataset simulate(const ScenarioOptions& options) {
    Dataset ds;
    ds.markers = office_markers();
    ds.truth = gen_trajectory(options.trajectory);
    ds.path = path_segments(options.trajectory);
    ds.observations = gen_observations(ds.truth, ds.markers, CameraRig::back_to_back(), options.camera, options.noise);

    RssiModel rssi = options.rssi;
    if (rssi.covers.empty()) {
        const double lead = options.trajectory.lead_in;
        if (lead < 6.0) throw InvalidParameter("a default cover event needs at least 6 s of lead-in");
        rssi.covers.push_back({lead - 4.5, lead - 2.0});
    }
    ds.video_release = rssi.covers.front().end;
    ds.rssi = gen_rssi(ds.truth, office_sensors(), rssi);
    return ds;
}

}  // namespace posemark::sim
