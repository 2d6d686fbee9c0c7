#include "posemark/smoothing.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include <Eigen/Dense>

#include "posemark/errors.hpp"

namespace posemark {

void FilterParams::validate() const {
    if (!(measurement_noise >= 0.0) || !(process_noise >= 0.0) || !(initial_covariance >= 0.0)) {
        throw InvalidParameter("filter noise multipliers must be non-negative");
    }
    if (measurement_noise == 0.0 && process_noise == 0.0) {
        throw InvalidParameter("q and r cannot both be zero");
    }
}

Vector6d to_vector(const Vec3& position, const Vec3& rotation) {
    Vector6d v;
    v << position, rotation;
    return v;
}

PoseState kalman_predict(const PoseState& state, const FilterParams& params) {
    PoseState next = state;
    next.P += params.process_noise * Matrix6d::Identity();
    return next;
}

PoseState kalman_update(const PoseState& state, const Vector6d& y, const FilterParams& params) {
    if (!y.allFinite()) throw InvalidParameter("non-finite observation");
    const Matrix6d I = Matrix6d::Identity();
    PoseState next;
    next.timestamp = state.timestamp;
    if (params.measurement_noise == 0.0) {
        // limit of K -> I; avoids a singular solve once P reaches zero
        next.x = y;
        next.P = Matrix6d::Zero();
        return next;
    }
    // K = P (P + Q)^-1, solved as (P + Q)^T K^T = P^T
    const Matrix6d S = state.P + params.measurement_noise * I;
    const Matrix6d K = S.transpose().ldlt().solve(state.P.transpose()).transpose();
    next.x = state.x + K * (y - state.x);
    next.P = (I - K) * state.P;
    next.P = 0.5 * (next.P + next.P.transpose()).eval();
    return next;
}

PoseState kalman_step(const PoseState& state, const Vector6d& y, const FilterParams& params) {
    return kalman_update(kalman_predict(state, params), y, params);
}

std::vector<FinalPose> smooth_trajectory(std::span<const RawPose> likely_poses,
                                         const FilterParams& params, std::optional<Vector6d> x0) {
    params.validate();
    std::vector<FinalPose> out;
    if (likely_poses.empty()) return out;

    PoseState state;
    state.x = x0.value_or(to_vector(likely_poses.front().position, likely_poses.front().rotation));
    state.P = params.initial_covariance * Matrix6d::Identity();

    for (std::size_t i = 0; i < likely_poses.size(); ++i) {
        const RawPose& p = likely_poses[i];
        if (i > 0 && p.timestamp < likely_poses[i - 1].timestamp) {
            throw OrderingError("likely pose " + std::to_string(i) + " is earlier than its predecessor");
        }
        // time advances once per frame; further detections in the same frame
        // are pure measurement updates, so their order does not matter
        const bool first_of_frame = i == 0 || p.timestamp != likely_poses[i - 1].timestamp;
        if (first_of_frame) state = kalman_predict(state, params);
        state = kalman_update(state, to_vector(p.position, p.rotation), params);
        state.timestamp = p.timestamp;

        const bool last_of_frame = i + 1 == likely_poses.size() || likely_poses[i + 1].timestamp != p.timestamp;
        if (last_of_frame) {
            out.push_back({p.timestamp, state.x.head<3>(), state.x.tail<3>()});
        }
    }
    return out;
}

std::size_t count_near_wrap(std::span<const FinalPose> poses, double margin) {
    std::size_t n = 0;
    for (const auto& p : poses) {
        if (p.rotation.norm() > std::numbers::pi - margin) ++n;
    }
    return n;
}

}  // namespace posemark
