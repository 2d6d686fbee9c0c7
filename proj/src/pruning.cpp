#include "posemark/pruning.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "posemark/errors.hpp"

namespace posemark {

double batch_distance(double speed, int frame_window, double fps) {
    if (!(fps > 0.0)) throw InvalidParameter("fps must be positive");
    if (frame_window < 1) throw InvalidParameter("frame window must be at least 1");
    if (!(speed >= 0.0)) throw InvalidParameter("speed must be non-negative");
    return speed * frame_window / (2.0 * fps);
}

std::vector<PoseBatch> batch_stream(std::span<const RawPose> poses, int frame_window) {
    if (frame_window < 1) throw InvalidParameter("frame window must be at least 1");
    std::vector<PoseBatch> batches;
    int frames_in_batch = 0;
    for (std::size_t i = 0; i < poses.size(); ++i) {
        const RawPose& p = poses[i];
        const bool new_frame = i == 0 || p.timestamp != poses[i - 1].timestamp;
        if (i > 0 && p.timestamp < poses[i - 1].timestamp) {
            throw OrderingError("raw pose " + std::to_string(i) + " is earlier than its predecessor");
        }
        if (new_frame) {
            if (batches.empty() || frames_in_batch == frame_window) {
                PoseBatch b;
                b.frame_window = frame_window;
                b.start_time = p.timestamp;
                batches.push_back(std::move(b));
                frames_in_batch = 0;
            }
            ++frames_in_batch;
        }
        batches.back().poses.push_back(p);
        batches.back().end_time = p.timestamp;
    }
    return batches;
}

PoseBatch select_closest(const PoseBatch& batch, int closest_count) {
    if (closest_count < 1) throw InvalidParameter("closeness parameter must be at least 1");
    const auto n = batch.poses.size();
    if (n <= static_cast<std::size_t>(closest_count)) return batch;

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return batch.poses[a].marker_distance < batch.poses[b].marker_distance;
    });
    order.resize(closest_count);
    std::sort(order.begin(), order.end());

    PoseBatch out = batch;
    out.poses.clear();
    for (auto i : order) out.poses.push_back(batch.poses[i]);
    return out;
}

PoseBatch eliminate_outliers(const PoseBatch& batch, int survivors) {
    if (survivors < 1) throw InvalidParameter("survivor count must be at least 1");
    PoseBatch out = batch;
    auto& poses = out.poses;
    while (poses.size() > static_cast<std::size_t>(survivors)) {
        Vec3 consensus = Vec3::Zero();
        for (const auto& p : poses) consensus += p.position;
        consensus /= static_cast<double>(poses.size());

        std::size_t worst = 0;
        double worst_dist = -1.0;
        for (std::size_t i = 0; i < poses.size(); ++i) {
            const double dist = (poses[i].position - consensus).squaredNorm();
            // ties: later timestamp, then later position in the batch
            const bool later = poses[i].timestamp >= poses[worst].timestamp;
            if (dist > worst_dist || (dist == worst_dist && later)) {
                worst = i;
                worst_dist = dist;
            }
        }
        poses.erase(poses.begin() + static_cast<std::ptrdiff_t>(worst));
    }
    return out;
}

PoseBatch prune(const PoseBatch& batch, const PruningParams& params) {
    PoseBatch out = batch;
    if (params.closest_count > 0) out = select_closest(out, params.closest_count);
    if (params.survivors > 0) out = eliminate_outliers(out, params.survivors);
    return out;
}

}  // namespace posemark
