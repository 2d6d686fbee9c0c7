#pragma once

#include <Eigen/Core>

namespace posemark {

using Vec3 = Eigen::Vector3d;
using RotationMatrix = Eigen::Matrix3d;

/// Tolerance on |R^T R - I| and |det R - 1| for accepting a rotation matrix.
inline constexpr double kRotationTolerance = 1e-9;

/// A stationary fiducial surveyed in the world frame.
struct MarkerSpec {
    int id = 0;
    Vec3 position = Vec3::Zero();  ///< world meters
    Vec3 rotation = Vec3::Zero();  ///< world rotation vector
    double edge_length = 0.3;      ///< meters
};

/// One detection of a marker in one video frame, pose relative to the camera.
struct MarkerObservation {
    double timestamp = 0.0;
    int camera_id = 0;
    int marker_id = 0;
    Vec3 position = Vec3::Zero();  ///< camera-frame meters
    Vec3 rotation = Vec3::Zero();  ///< camera-frame rotation vector
};

/// World-frame camera pose recovered from a single marker detection.
struct RawPose {
    double timestamp = 0.0;
    Vec3 position = Vec3::Zero();
    Vec3 rotation = Vec3::Zero();
    int source_marker = 0;
    double marker_distance = 0.0;  ///< |observation.position|
    int camera_id = 0;
};

/// Rotation matrix of an axis-angle vector.
RotationMatrix rodrigues(const Vec3& r);

/// Axis-angle vector of a rotation matrix, with norm in [0, pi].
///
/// At exactly pi the representative whose first nonzero component is
/// positive is returned. Throws InvalidRotation when `R` is not orthonormal
/// with determinant +1 within kRotationTolerance.
Vec3 rodrigues_inv(const RotationMatrix& R);

bool is_rotation(const RotationMatrix& R, double tol = kRotationTolerance);

inline Vec3 transform_vector(const RotationMatrix& R, const Vec3& v) { return R * v; }

/// R_ki = R_kj * R_ji
inline RotationMatrix compose_rotations(const RotationMatrix& R_kj, const RotationMatrix& R_ji) {
    return R_kj * R_ji;
}

Eigen::Matrix3d skew(const Vec3& v);

/// World pose of the observing camera.
///
/// position = t_wm - R_wm R_cm^T t_cm, rotation = log(R_wm R_cm^T).
/// Throws UnknownMarker if the ids disagree.
RawPose camera_pose(const MarkerObservation& obs, const MarkerSpec& marker);

/// Inverse of camera_pose: the marker pose a camera at (position, R_wc)
/// would observe. Used by the simulator.
MarkerObservation observe_marker(const Vec3& camera_position, const RotationMatrix& R_wc,
                                 const MarkerSpec& marker);

}  // namespace posemark
