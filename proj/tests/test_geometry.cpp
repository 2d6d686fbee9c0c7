#include <cmath>
#include <numbers>
#include <random>

#include <Eigen/Geometry>

#include "doctest.h"
#include "oracles.hpp"
#include "posemark/errors.hpp"
#include "posemark/geometry.hpp"

using namespace posemark;
using std::numbers::pi;

namespace {

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("rodrigues of zero is the identity") {
    CHECK(max_abs(rodrigues(Vec3::Zero()) - RotationMatrix::Identity()) == 0.0);
}

TEST_CASE("quarter turn about x") {
    RotationMatrix expected;
    expected << 1, 0, 0, 0, 0, -1, 0, 1, 0;
    CHECK(max_abs(rodrigues(Vec3(pi / 2, 0, 0)) - expected) < 1e-15);
}

TEST_CASE("rodrigues matches Eigen's angle-axis") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 500; ++i) {
        const Vec3 r = oracle::random_rotation_vector(rng, 3.0 * pi);
        CHECK(max_abs(rodrigues(r) - oracle::angle_axis(r)) < 1e-12);
    }
}

TEST_CASE("tiny angles stay orthonormal") {
    for (double a : {1e-7, 1e-9, 1e-12, 1e-300}) {
        const Vec3 r(a, -2 * a, a / 3);
        const RotationMatrix R = rodrigues(r);
        CHECK(is_rotation(R));
        CHECK((rodrigues_inv(R) - r).norm() < 1e-15);
    }
}

TEST_CASE("rodrigues_inv branches") {
    SUBCASE("identity") { CHECK(rodrigues_inv(RotationMatrix::Identity()).norm() == 0.0); }

    SUBCASE("half turn about x") {
        const RotationMatrix R = Eigen::Vector3d(1, -1, -1).asDiagonal();
        const Vec3 r = rodrigues_inv(R);
        CHECK((r - Vec3(pi, 0, 0)).norm() < 1e-12);
        CHECK(max_abs(rodrigues(r) - R) < 1e-9);
    }

    SUBCASE("half turns pick the positive representative") {
        std::mt19937_64 rng(5);
        std::normal_distribution<double> g;
        for (int i = 0; i < 200; ++i) {
            const Vec3 axis = Vec3(g(rng), g(rng), g(rng)).normalized();
            const RotationMatrix R = oracle::angle_axis(pi * axis);
            const Vec3 r = rodrigues_inv(R);
            CHECK(std::abs(r.norm() - pi) < 1e-9);
            CHECK(r.x() > 0.0);
            CHECK(max_abs(rodrigues(r) - R) < 1e-9);
        }
        // first component zero: the sign moves to y, then z
        const Vec3 ry = rodrigues_inv(oracle::angle_axis(Vec3(0, -pi, 0)));
        CHECK((ry - Vec3(0, pi, 0)).norm() < 1e-12);
        const Vec3 rz = rodrigues_inv(oracle::angle_axis(Vec3(0, 0, -pi)));
        CHECK((rz - Vec3(0, 0, pi)).norm() < 1e-12);
    }

    SUBCASE("near the half turn") {
        for (double eps : {1e-3, 1e-6, 1e-8, 1e-10}) {
            const Vec3 r = Vec3(0.3, -0.5, 0.8).normalized() * (pi - eps);
            CHECK((rodrigues_inv(rodrigues(r)) - r).norm() < 1e-7);
            CHECK(max_abs(rodrigues(rodrigues_inv(rodrigues(r))) - rodrigues(r)) < 1e-9);
        }
    }
}

TEST_CASE("roundtrip example from a known vector") {
    const Vec3 r(0.3, -0.2, 0.9);
    CHECK((rodrigues_inv(rodrigues(r)) - r).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("rodrigues_inv rejects non-rotations") {
    RotationMatrix scaled = 1.001 * RotationMatrix::Identity();
    CHECK_THROWS_AS(rodrigues_inv(scaled), InvalidRotation);
    const RotationMatrix reflection = Eigen::Vector3d(1, 1, -1).asDiagonal();
    CHECK_THROWS_AS(rodrigues_inv(reflection), InvalidRotation);
    RotationMatrix nan = RotationMatrix::Identity();
    nan(0, 1) = std::nan("");
    CHECK_THROWS_AS(rodrigues_inv(nan), InvalidRotation);
    RotationMatrix nudged = RotationMatrix::Identity();
    nudged(0, 1) = 1e-7;
    CHECK_THROWS_AS(rodrigues_inv(nudged), InvalidRotation);
}

TEST_CASE("transform_vector and compose_rotations") {
    CHECK((transform_vector(RotationMatrix::Identity(), Vec3(1, 2, 3)) - Vec3(1, 2, 3)).norm() == 0.0);
    CHECK((transform_vector(rodrigues(Vec3(0, 0, pi / 2)), Vec3(1, 0, 0)) - Vec3(0, 1, 0)).norm() < 1e-15);

    std::mt19937_64 rng(3);
    std::normal_distribution<double> g;
    for (int i = 0; i < 200; ++i) {
        const RotationMatrix A = rodrigues(oracle::random_rotation_vector(rng, pi));
        const RotationMatrix B = rodrigues(oracle::random_rotation_vector(rng, pi));
        const RotationMatrix C = rodrigues(oracle::random_rotation_vector(rng, pi));
        const Vec3 v(g(rng), g(rng), g(rng));
        CHECK(std::abs(transform_vector(A, v).norm() - v.norm()) < 1e-9);
        CHECK(max_abs(compose_rotations(RotationMatrix::Identity(), A) - A) == 0.0);
        CHECK(max_abs(compose_rotations(A, A.transpose()) - RotationMatrix::Identity()) < 1e-9);
        CHECK(max_abs(compose_rotations(compose_rotations(A, B), C) - compose_rotations(A, compose_rotations(B, C))) <
              1e-9);
        CHECK(is_rotation(compose_rotations(A, B)));
    }
}

TEST_CASE("skew is the cross product") {
    const Vec3 a(0.4, -1.2, 2.0), b(3.0, 0.5, -0.7);
    CHECK((skew(a) * b - a.cross(b)).norm() < 1e-15);
    CHECK(max_abs(skew(a) + skew(a).transpose()) == 0.0);
}

TEST_CASE("camera_pose worked examples") {
    MarkerSpec origin;
    origin.id = 4;
    MarkerObservation obs;
    obs.marker_id = 4;
    obs.position = Vec3(0, 0, 2);
    obs.timestamp = 1.25;
    RawPose p = camera_pose(obs, origin);
    CHECK((p.position - Vec3(0, 0, -2)).norm() == 0.0);
    CHECK(p.rotation.norm() == 0.0);
    CHECK(p.marker_distance == doctest::Approx(2.0));
    CHECK(p.timestamp == 1.25);
    CHECK(p.source_marker == 4);

    MarkerSpec shifted = origin;
    shifted.position = Vec3(2, 0, 1);
    p = camera_pose(obs, shifted);
    CHECK((p.position - Vec3(2, 0, -1)).norm() == 0.0);

    obs.marker_id = 5;
    CHECK_THROWS_AS(camera_pose(obs, origin), UnknownMarker);
}

TEST_CASE("zero rotations reduce to a translation difference") {
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-5, 5);
    for (int i = 0; i < 100; ++i) {
        MarkerSpec m;
        m.position = Vec3(u(rng), u(rng), u(rng));
        MarkerObservation obs;
        obs.position = Vec3(u(rng), u(rng), u(rng));
        CHECK((camera_pose(obs, m).position - (m.position - obs.position)).norm() < 1e-12);
    }
}

TEST_CASE("camera_pose agrees with homogeneous transforms") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> u(-10, 10);
    for (int i = 0; i < 1000; ++i) {
        MarkerSpec m;
        m.position = Vec3(u(rng), u(rng), u(rng));
        m.rotation = oracle::random_rotation_vector(rng, pi - 1e-6);
        MarkerObservation obs;
        obs.position = Vec3(u(rng), u(rng), u(rng));
        obs.rotation = oracle::random_rotation_vector(rng, pi - 1e-6);
        const RawPose p = camera_pose(obs, m);
        const auto [pos, R] = oracle::camera_pose(obs, m);
        REQUIRE((p.position - pos).cwiseAbs().maxCoeff() < 1e-9);
        REQUIRE(max_abs(rodrigues(p.rotation) - R) < 1e-9);
    }
}

TEST_CASE("observe_marker inverts camera_pose") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-8, 8);
    for (int i = 0; i < 300; ++i) {
        MarkerSpec m;
        m.id = i;
        m.position = Vec3(u(rng), u(rng), u(rng));
        m.rotation = oracle::random_rotation_vector(rng, pi - 1e-6);
        const Vec3 cam(u(rng), u(rng), u(rng));
        const RotationMatrix R_wc = rodrigues(oracle::random_rotation_vector(rng, pi - 1e-6));
        const MarkerObservation obs = observe_marker(cam, R_wc, m);
        const RawPose back = camera_pose(obs, m);
        CHECK((back.position - cam).norm() < 1e-9);
        CHECK(max_abs(rodrigues(back.rotation) - R_wc) < 1e-9);
    }
}
