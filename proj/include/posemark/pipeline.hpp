#pragma once

#include <map>
#include <optional>
#include <span>
#include <vector>

#include "posemark/geometry.hpp"
#include "posemark/pruning.hpp"
#include "posemark/smoothing.hpp"

namespace posemark {

/// Camera orientations inside the rigid bundle, as rotation vectors of the
/// camera frame expressed in the bundle frame.
///
/// The bundle frame has x forward, y left and z up. Cameras use the usual
/// optical convention (z along the view, y down).
struct CameraRig {
    std::map<int, Vec3> mounts;

    /// Camera 0 looks forward; camera 1 looks backward and is upside down.
    static CameraRig back_to_back();
    RotationMatrix mount(int camera_id) const;
};

/// Converts a camera pose into the pose of the bundle carrying it.
RawPose to_bundle(const RawPose& camera, const CameraRig& rig);

struct PipelineParams {
    int frame_window = 15;  ///< F
    PruningParams pruning;
    std::optional<FilterParams> filter = FilterParams{};
};

struct PipelineResult {
    std::vector<RawPose> raw;     ///< bundle poses, time-sorted
    std::vector<RawPose> likely;  ///< survivors of pruning, time-sorted
    std::vector<FinalPose> final_poses;  ///< empty when the filter is disabled
};

/// Looks up markers by id.
class MarkerMap {
public:
    MarkerMap() = default;
    explicit MarkerMap(std::span<const MarkerSpec> markers);

    /// Throws UnknownMarker.
    const MarkerSpec& at(int id) const;
    bool contains(int id) const { return markers_.count(id) != 0; }
    std::size_t size() const { return markers_.size(); }
    std::vector<MarkerSpec> list() const;

private:
    std::map<int, MarkerSpec> markers_;
};

/// Raw bundle poses for every observation, stable-sorted by time.
std::vector<RawPose> raw_poses(std::span<const MarkerObservation> observations, const MarkerMap& markers,
                               const CameraRig& rig);

/// raw poses -> batches -> pruning -> filter.
PipelineResult run_pipeline(std::span<const MarkerObservation> observations, const MarkerMap& markers,
                            const CameraRig& rig, const PipelineParams& params);

/// One pose per distinct timestamp of time-sorted poses: the mean position,
/// with the rotation of the first pose at that time. Stands in for the
/// filter output when smoothing is off.
std::vector<FinalPose> frame_means(std::span<const RawPose> poses);

/// Pruning and filtering on precomputed raw poses.
PipelineResult run_pipeline(std::vector<RawPose> raw, const PipelineParams& params);

}  // namespace posemark
