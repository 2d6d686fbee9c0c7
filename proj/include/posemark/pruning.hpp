#pragma once

#include <span>
#include <vector>

#include "posemark/geometry.hpp"

namespace posemark {

/// Raw poses from a window of consecutive frames.
struct PoseBatch {
    int frame_window = 1;
    std::vector<RawPose> poses;
    double start_time = 0.0;
    double end_time = 0.0;
};

/// Zero disables a stage.
struct PruningParams {
    int closest_count = 20;  ///< C
    int survivors = 10;      ///< U
};

/// Distance a bundle moving at `speed` covers during one batch of
/// `frame_window` frames shared between two cameras: v F / (2 fps).
double batch_distance(double speed, int frame_window, double fps);

/// Splits time-sorted raw poses into consecutive windows of `frame_window`
/// distinct frame timestamps. A trailing short window is kept.
/// Throws OrderingError on unsorted input.
std::vector<PoseBatch> batch_stream(std::span<const RawPose> poses, int frame_window);

/// Keeps the `closest_count` poses with the smallest marker distance,
/// preserving input order among the survivors.
PoseBatch select_closest(const PoseBatch& batch, int closest_count);

/// Greedy backward elimination: while more than `survivors` poses remain,
/// drop the pose farthest from the mean position. Equal distances drop the
/// later timestamp first (then the later batch position).
PoseBatch eliminate_outliers(const PoseBatch& batch, int survivors);

/// select_closest then eliminate_outliers, skipping any stage set to zero.
PoseBatch prune(const PoseBatch& batch, const PruningParams& params);

}  // namespace posemark
