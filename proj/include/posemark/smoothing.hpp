#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "posemark/geometry.hpp"

namespace posemark {

using Vector6d = Eigen::Matrix<double, 6, 1>;
using Matrix6d = Eigen::Matrix<double, 6, 6>;

/// Position stacked over rotation vector.
struct PoseState {
    Vector6d x = Vector6d::Zero();
    Matrix6d P = Matrix6d::Identity();
    double timestamp = 0.0;
};

/// Noise multipliers of the identity-dynamics filter.
///
/// `measurement_noise` scales the observation covariance (Q = q I) and
/// `process_noise` the transition covariance (R = r I). Larger q trusts the
/// observations less and smooths harder.
struct FilterParams {
    double measurement_noise = 0.2;   ///< q, recommended in [0.1, 0.2]
    double process_noise = 0.01;      ///< r
    double initial_covariance = 1.0;  ///< P0 = p I

    void validate() const;
};

struct FinalPose {
    double timestamp = 0.0;
    Vec3 position = Vec3::Zero();
    Vec3 rotation = Vec3::Zero();
};

Vector6d to_vector(const Vec3& position, const Vec3& rotation);

/// Time update with A = I: P += r I.
PoseState kalman_predict(const PoseState& state, const FilterParams& params);

/// Measurement update with H = I. Throws InvalidParameter on a non-finite
/// observation.
PoseState kalman_update(const PoseState& state, const Vector6d& y, const FilterParams& params);

/// One predict/update cycle.
PoseState kalman_step(const PoseState& state, const Vector6d& y, const FilterParams& params);

/// Feeds every likely pose to the filter in time order and emits the
/// posterior after the last observation of each distinct timestamp. The
/// time update runs once per timestamp, before its first observation.
/// The prior mean defaults to the first pose.
std::vector<FinalPose> smooth_trajectory(std::span<const RawPose> likely_poses,
                                         const FilterParams& params,
                                         std::optional<Vector6d> x0 = std::nullopt);

/// Number of poses whose rotation vector is within `margin` of the pi wrap,
/// where Euclidean filtering of rotation vectors breaks down.
std::size_t count_near_wrap(std::span<const FinalPose> poses, double margin = 0.1);

}  // namespace posemark
