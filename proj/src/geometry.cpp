#include "posemark/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "posemark/errors.hpp"

namespace posemark {

namespace {

// Below this, sin(theta) is treated as zero and the degenerate branches apply.
constexpr double kZeroSine = 1e-12;

// First nonzero component positive.
Vec3 canonical_half_turn(Vec3 r) {
    for (int i = 0; i < 3; ++i) {
        if (std::abs(r[i]) > 1e-15) {
            return r[i] < 0.0 ? Vec3(-r) : r;
        }
    }
    return r;
}

}  // namespace

Eigen::Matrix3d skew(const Vec3& v) {
    Eigen::Matrix3d m;
    m << 0.0, -v.z(), v.y(),
         v.z(), 0.0, -v.x(),
         -v.y(), v.x(), 0.0;
    return m;
}

RotationMatrix rodrigues(const Vec3& r) {
    const double theta = r.norm();
    if (theta < 1e-8) {
        // second-order expansion, exact to O(theta^3)
        const Eigen::Matrix3d K = skew(r);
        return RotationMatrix::Identity() + K + 0.5 * K * K;
    }
    const Vec3 k = r / theta;
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return c * RotationMatrix::Identity() + (1.0 - c) * k * k.transpose() + s * skew(k);
}

bool is_rotation(const RotationMatrix& R, double tol) {
    if (!R.allFinite()) return false;
    const double ortho = (R.transpose() * R - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
    return ortho <= tol && std::abs(R.determinant() - 1.0) <= tol;
}

Vec3 rodrigues_inv(const RotationMatrix& R) {
    if (!is_rotation(R)) {
        throw InvalidRotation("matrix is not a rotation within tolerance");
    }
    const Eigen::Matrix3d A = 0.5 * (R - R.transpose());
    const Vec3 rho(A(2, 1), A(0, 2), A(1, 0));
    const double s = rho.norm();
    const double d = 0.5 * (R.trace() - 1.0);

    if (s < kZeroSine) {
        if (d > 0.0) {
            return Vec3::Zero();
        }
        // half turn: any nonzero column of R + I is parallel to the axis
        const Eigen::Matrix3d B = R + Eigen::Matrix3d::Identity();
        Eigen::Index col = 0;
        B.colwise().norm().maxCoeff(&col);
        const Vec3 v = B.col(col);
        return canonical_half_turn(v.normalized() * std::numbers::pi);
    }

    const double theta = std::atan2(s, std::clamp(d, -1.0, 1.0));
    if (d >= 0.0) {
        return rho / s * theta;
    }
    // For theta beyond pi/2 the antisymmetric part loses precision; recover the
    // axis from the symmetric part, (R + R^T)/2 - d I = (1 - d) k k^T, and take
    // its sign from rho.
    const Eigen::Matrix3d S = 0.5 * (R + R.transpose()) - d * Eigen::Matrix3d::Identity();
    Eigen::Index col = 0;
    S.colwise().norm().maxCoeff(&col);
    Vec3 axis = S.col(col).normalized();
    if (axis.dot(rho) < 0.0) axis = -axis;
    return axis * theta;
}

RawPose camera_pose(const MarkerObservation& obs, const MarkerSpec& marker) {
    if (obs.marker_id != marker.id) {
        throw UnknownMarker(obs.marker_id);
    }
    const RotationMatrix R_wm = rodrigues(marker.rotation);
    const RotationMatrix R_cm = rodrigues(obs.rotation);
    const RotationMatrix R_wc = compose_rotations(R_wm, R_cm.transpose());

    RawPose pose;
    pose.timestamp = obs.timestamp;
    pose.position = marker.position - transform_vector(R_wc, obs.position);
    pose.rotation = rodrigues_inv(R_wc);
    pose.source_marker = marker.id;
    pose.marker_distance = obs.position.norm();
    pose.camera_id = obs.camera_id;
    return pose;
}

MarkerObservation observe_marker(const Vec3& camera_position, const RotationMatrix& R_wc,
                                 const MarkerSpec& marker) {
    const RotationMatrix R_wm = rodrigues(marker.rotation);
    MarkerObservation obs;
    obs.marker_id = marker.id;
    obs.position = R_wc.transpose() * (marker.position - camera_position);
    obs.rotation = rodrigues_inv(R_wc.transpose() * R_wm);
    return obs;
}

}  // namespace posemark
