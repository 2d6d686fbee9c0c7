#pragma once

// Independent reference implementations used by the unit tests and the
// acceptance runner. Nothing here calls into the code it checks, apart from
// plain data types.

#include <random>
#include <utility>
#include <vector>

#include "posemark/geometry.hpp"
#include "posemark/pruning.hpp"

namespace oracle {

using posemark::MarkerObservation;
using posemark::MarkerSpec;
using posemark::RawPose;
using posemark::RotationMatrix;
using posemark::Vec3;

/// Axis-angle matrix via Eigen::AngleAxisd.
RotationMatrix angle_axis(const Vec3& r);

/// Camera pose from 4x4 homogeneous transforms: T_wc = T_wm * inverse(T_cm).
std::pair<Vec3, RotationMatrix> camera_pose(const MarkerObservation& obs, const MarkerSpec& marker);

/// Sort by marker distance (ties by input index), keep C, restore input order.
std::vector<RawPose> select_closest(const std::vector<RawPose>& poses, int c);

/// Greedy elimination written out longhand: each round scans every pose,
/// collects those at the maximum squared distance from the mean and removes
/// the one with the largest (timestamp, index).
std::vector<RawPose> eliminate(const std::vector<RawPose>& poses, int u);

/// Scalar Kalman recursion with A = H = 1. Returns the posterior means.
struct ScalarTrace {
    std::vector<double> x;
    std::vector<double> p;
};
ScalarTrace scalar_filter(double x0, double p0, double q, double r, const std::vector<double>& ys);

/// Uniform random rotation vector with norm below `max_angle`.
Vec3 random_rotation_vector(std::mt19937_64& rng, double max_angle);

}  // namespace oracle
