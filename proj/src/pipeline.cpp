#include "posemark/pipeline.hpp"

#include <algorithm>
#include <numbers>

#include "posemark/errors.hpp"

namespace posemark {

CameraRig CameraRig::back_to_back() {
    // columns: camera x (right), y (down), z (view) in bundle coordinates
    RotationMatrix forward;
    forward << 0, 0, 1,
              -1, 0, 0,
               0, -1, 0;
    const RotationMatrix backward = forward * rodrigues(Vec3(std::numbers::pi, 0, 0));
    CameraRig rig;
    rig.mounts[0] = rodrigues_inv(forward);
    rig.mounts[1] = rodrigues_inv(backward);
    return rig;
}

RotationMatrix CameraRig::mount(int camera_id) const {
    const auto it = mounts.find(camera_id);
    if (it == mounts.end()) throw InvalidParameter("no mount configured for camera " + std::to_string(camera_id));
    return rodrigues(it->second);
}

RawPose to_bundle(const RawPose& camera, const CameraRig& rig) {
    RawPose out = camera;
    const RotationMatrix R_wc = rodrigues(camera.rotation);
    const RotationMatrix R_bc = rig.mount(camera.camera_id);
    out.rotation = rodrigues_inv(compose_rotations(R_wc, R_bc.transpose()));
    return out;
}

MarkerMap::MarkerMap(std::span<const MarkerSpec> markers) {
    for (const auto& m : markers) {
        if (!markers_.emplace(m.id, m).second) {
            throw InvalidParameter("duplicate marker id " + std::to_string(m.id));
        }
    }
}

const MarkerSpec& MarkerMap::at(int id) const {
    const auto it = markers_.find(id);
    if (it == markers_.end()) throw UnknownMarker(id);
    return it->second;
}

std::vector<MarkerSpec> MarkerMap::list() const {
    std::vector<MarkerSpec> out;
    for (const auto& [id, m] : markers_) out.push_back(m);
    return out;
}

std::vector<RawPose> raw_poses(std::span<const MarkerObservation> observations, const MarkerMap& markers,
                               const CameraRig& rig) {
    std::vector<RawPose> raw;
    raw.reserve(observations.size());
    for (const auto& obs : observations) {
        raw.push_back(to_bundle(camera_pose(obs, markers.at(obs.marker_id)), rig));
    }
    std::stable_sort(raw.begin(), raw.end(), [](const RawPose& a, const RawPose& b) {
        return a.timestamp < b.timestamp;
    });
    return raw;
}

PipelineResult run_pipeline(std::vector<RawPose> raw, const PipelineParams& params) {
    PipelineResult result;
    result.raw = std::move(raw);
    for (const auto& batch : batch_stream(result.raw, params.frame_window)) {
        const PoseBatch kept = prune(batch, params.pruning);
        result.likely.insert(result.likely.end(), kept.poses.begin(), kept.poses.end());
    }
    if (params.filter) {
        result.final_poses = smooth_trajectory(result.likely, *params.filter);
    }
    return result;
}

PipelineResult run_pipeline(std::span<const MarkerObservation> observations, const MarkerMap& markers,
                            const CameraRig& rig, const PipelineParams& params) {
    return run_pipeline(raw_poses(observations, markers, rig), params);
}

std::vector<FinalPose> frame_means(std::span<const RawPose> poses) {
    std::vector<FinalPose> out;
    std::size_t i = 0;
    while (i < poses.size()) {
        std::size_t j = i;
        Vec3 sum = Vec3::Zero();
        for (; j < poses.size() && poses[j].timestamp == poses[i].timestamp; ++j) sum += poses[j].position;
        if (j < poses.size() && poses[j].timestamp < poses[i].timestamp) {
            throw OrderingError("pose " + std::to_string(j) + " is earlier than its predecessor");
        }
        out.push_back({poses[i].timestamp, sum / static_cast<double>(j - i), poses[i].rotation});
        i = j;
    }
    return out;
}

}  // namespace posemark
