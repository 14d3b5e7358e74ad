// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pentrack/geometry.hpp"

#include <cmath>
#include <random>

using namespace pentrack;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Oracle: rotate v by q through the quaternion sandwich q * (0,v) * conj(q),
// sharing no code with the matrix conversion under test.
Vec3 rotate_by_quat_oracle(const Quaternion& q, Vec3 v) {
    double w = q.w, x = q.x, y = q.y, z = q.z;
    // p = q * (0, v)
    double pw = -x * v.x - y * v.y - z * v.z;
    double px = w * v.x + y * v.z - z * v.y;
    double py = w * v.y + z * v.x - x * v.z;
    double pz = w * v.z + x * v.y - y * v.x;
    // r = p * conj(q)
    return {pw * -x + px * w + py * -z - pz * -y,
            pw * -y + py * w + pz * -x - px * -z,
            pw * -z + pz * w + px * -y - py * -x};
}

Quaternion random_unit_quat(std::mt19937_64& rng) {
    std::normal_distribution<double> g(0.0, 1.0);
    Quaternion q{g(rng), g(rng), g(rng), g(rng)};
    return q.normalized();
}

double quat_angle_between(const Quaternion& a, const Quaternion& b) {
    double d = std::abs(a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z);
    return 2.0 * std::acos(std::min(1.0, d));
}

// Componentwise distance up to the double-cover sign, which resolves far
// below the ~3e-8 floor that acos conditioning puts on the angle metric.
double quat_dist_upto_sign(const Quaternion& a, const Quaternion& b) {
    double dp = std::hypot(std::hypot(a.w + b.w, a.x + b.x), std::hypot(a.y + b.y, a.z + b.z));
    double dm = std::hypot(std::hypot(a.w - b.w, a.x - b.x), std::hypot(a.y - b.y, a.z - b.z));
    return std::min(dp, dm);
}

} // namespace

TEST_CASE("quaternion axes match the sandwich-product oracle") {
    std::mt19937_64 rng(42);
    for (int i = 0; i < 200; ++i) {
        Quaternion q = random_unit_quat(rng);
        RotationAxes a = quat_to_axes(q);
        Vec3 ex = rotate_by_quat_oracle(q, {1, 0, 0});
        Vec3 ey = rotate_by_quat_oracle(q, {0, 1, 0});
        Vec3 ez = rotate_by_quat_oracle(q, {0, 0, 1});
        CHECK(norm(a.x_axis - ex) < 1e-12);
        CHECK(norm(a.y_axis - ey) < 1e-12);
        CHECK(norm(a.z_axis - ez) < 1e-12);
    }
}

TEST_CASE("90 degree rotation about z carries body x to screen y") {
    double s = std::sqrt(0.5);
    RotationAxes a = quat_to_axes({s, 0, 0, s});
    CHECK(norm(a.x_axis - Vec3{0, 1, 0}) < 1e-12);
}

TEST_CASE("axes are orthonormal and right-handed for random quaternions") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i) {
        RotationAxes a = quat_to_axes(random_unit_quat(rng));
        CHECK(std::abs(norm(a.x_axis) - 1.0) < 1e-12);
        CHECK(std::abs(norm(a.y_axis) - 1.0) < 1e-12);
        CHECK(std::abs(norm(a.z_axis) - 1.0) < 1e-12);
        CHECK(std::abs(dot(a.x_axis, a.y_axis)) < 1e-12);
        CHECK(std::abs(dot(a.y_axis, a.z_axis)) < 1e-12);
        CHECK(norm(cross(a.x_axis, a.y_axis) - a.z_axis) < 1e-12);
    }
}

TEST_CASE("quat to axes round trip recovers the rotation up to sign") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 500; ++i) {
        Quaternion q = random_unit_quat(rng);
        Quaternion back = axes_to_quat(quat_to_axes(q));
        CHECK(std::abs(back.norm() - 1.0) < 1e-9);
        CHECK(quat_dist_upto_sign(q, back) < 1e-9);
    }
}

TEST_CASE("q and -q produce identical axes") {
    std::mt19937_64 rng(13);
    Quaternion q = random_unit_quat(rng);
    RotationAxes a = quat_to_axes(q);
    RotationAxes b = quat_to_axes({-q.w, -q.x, -q.y, -q.z});
    CHECK(norm(a.x_axis - b.x_axis) < 1e-15);
    CHECK(norm(a.y_axis - b.y_axis) < 1e-15);
    CHECK(norm(a.z_axis - b.z_axis) < 1e-15);
}

TEST_CASE("non-unit quaternion is rejected") {
    CHECK_THROWS_AS((void)quat_to_axes({1.1, 0, 0, 0}), std::invalid_argument);
}

TEST_CASE("attitude angles place the body axis per the spherical oracle") {
    // Independent oracle: the body z axis direction in spherical coordinates,
    // bearing = azimuth, elevation above the plane = altitude, pointing away
    // from the screen (negative screen z).
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> alt(0.0, 89.5);
    std::uniform_real_distribution<double> az(0.0, 360.0);
    std::uniform_real_distribution<double> roll(0.0, 360.0);
    for (int i = 0; i < 300; ++i) {
        AttitudeAngles ang{alt(rng), az(rng), roll(rng)};
        double t1 = ang.altitude_deg * kPi / 180.0;
        double t2 = ang.azimuth_deg * kPi / 180.0;
        Vec3 want{std::cos(t1) * std::cos(t2), std::cos(t1) * std::sin(t2), -std::sin(t1)};
        RotationAxes a = angles_to_axes(ang);
        CHECK(norm(a.z_axis - want) < 1e-12);
        // The frame must stay orthonormal and right-handed.
        CHECK(norm(cross(a.x_axis, a.y_axis) - a.z_axis) < 1e-12);
    }
}

TEST_CASE("frozen attitude examples") {
    // altitude 45, azimuth 90, roll 0: body axis leans along screen +y.
    RotationAxes a = angles_to_axes({45.0, 90.0, 0.0});
    double s = std::sqrt(0.5);
    CHECK(norm(a.z_axis - Vec3{0.0, s, -s}) < 1e-12);

    // Vertical pencil: body z antiparallel to screen z.
    RotationAxes v = angles_to_axes({90.0, 0.0, 0.0});
    CHECK(norm(v.z_axis - Vec3{0.0, 0.0, -1.0}) < 1e-12);
}

TEST_CASE("angles round trip through axes") {
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> alt(5.0, 89.0);
    std::uniform_real_distribution<double> az(1.0, 359.0);
    std::uniform_real_distribution<double> roll(1.0, 359.0);
    for (int i = 0; i < 300; ++i) {
        AttitudeAngles in{alt(rng), az(rng), roll(rng)};
        AttitudeAngles out = axes_to_angles(angles_to_axes(in));
        CHECK(std::abs(out.altitude_deg - in.altitude_deg) < 1e-9);
        CHECK(std::abs(out.azimuth_deg - in.azimuth_deg) < 1e-9);
        CHECK(std::abs(out.roll_deg - in.roll_deg) < 1e-9);
    }
}

TEST_CASE("azimuth reads 0 at the vertical degeneracy") {
    AttitudeAngles out = axes_to_angles(angles_to_axes({90.0, 123.0, 45.0}));
    CHECK(out.altitude_deg == doctest::Approx(90.0).epsilon(1e-12));
    CHECK(out.azimuth_deg == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("frame transform matches a hand-computed example") {
    // 90 degrees about z: P_s rows are the rotated axes, so the offset
    // (10, 0, 0) lands at (0, -10, 0) in the pencil frame.
    double s = std::sqrt(0.5);
    RotationAxes a = quat_to_axes({s, 0, 0, s});
    Vec3 got = to_pencil_frame({10, 0, 0}, {0, 0, 0}, a);
    CHECK(norm(got - Vec3{0, -10, 0}) < 1e-12);

    Vec3 m = field_to_pencil_frame({1, 2, 3}, a);
    CHECK(norm(m - Vec3{2, -1, 3}) < 1e-12);
}

TEST_CASE("position and field transforms round trip at 1e-9") {
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> pos(-300.0, 300.0);
    std::uniform_real_distribution<double> f(-500.0, 500.0);
    for (int i = 0; i < 1000; ++i) {
        Quaternion q = random_unit_quat(rng);
        RotationAxes a = quat_to_axes(q);
        Vec3 mag{pos(rng), pos(rng), 0.0};
        Vec3 tip{pos(rng), pos(rng), 0.0};
        Vec3 mp = to_pencil_frame(mag, tip, a);
        Vec3 tip_back = tip_from_mag_position(mag, a, mp);
        CHECK(norm(tip_back - tip) < 1e-9);

        Vec3 m{f(rng), f(rng), f(rng)};
        Vec3 back = field_to_screen_frame(field_to_pencil_frame(m, a), a);
        CHECK(norm(back - m) < 1e-9);
    }
}

TEST_CASE("pure translation moves the pencil-frame offset rigidly") {
    // With identity orientation the pencil frame is the screen frame shifted
    // to the tip, so translating both points leaves the offset unchanged.
    RotationAxes ident;
    Vec3 a = to_pencil_frame({50, 40, 0}, {10, 20, 0}, ident);
    Vec3 b = to_pencil_frame({150, 140, 0}, {110, 120, 0}, ident);
    CHECK(norm(a - b) < 1e-12);
    CHECK(norm(a - Vec3{40, 20, 0}) < 1e-12);
}

TEST_CASE("rolling about the offset direction preserves the pencil-frame offset") {
    // The ambiguity at the heart of the mapping: distinct poses can share the
    // same magnetometer position in the pencil frame.
    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> pos(-200.0, 200.0);
    std::uniform_real_distribution<double> ang(0.5, 359.5);
    for (int i = 0; i < 100; ++i) {
        Quaternion q = random_unit_quat(rng);
        RotationAxes a = quat_to_axes(q);
        Vec3 mag{pos(rng), pos(rng), 0.0};
        Vec3 tip{pos(rng), pos(rng), 0.0};
        Vec3 off = mag - tip;
        if (norm(off) < 1.0) continue;

        // Pre-rotate the screen-to-pencil map by a roll about the offset
        // axis: P2 * v = P1 * (R v) leaves P * off unchanged because
        // R * off = off. Rows of P2 are R^T applied to the rows of P1.
        Vec3 axis = normalized(off);
        double phi = ang(rng) * kPi / 180.0;
        double c = std::cos(phi), s = std::sin(phi);
        auto rot_inv = [&](Vec3 v) {
            return v * c - cross(axis, v) * s + axis * (dot(axis, v) * (1.0 - c));
        };
        RotationAxes b{rot_inv(a.x_axis), rot_inv(a.y_axis), rot_inv(a.z_axis)};

        Vec3 ma = to_pencil_frame(mag, tip, a);
        Vec3 mb = to_pencil_frame(mag, tip, b);
        CHECK(norm(ma - mb) < 1e-9);
        CHECK(quat_angle_between(axes_to_quat(a), axes_to_quat(b)) > 1e-3);
    }
}

TEST_CASE("pose range checks the stated attitude box") {
    CHECK(pose_in_range(AttitudeAngles{45.0, 115.0, 200.0}));
    CHECK(pose_in_range(AttitudeAngles{30.0, 60.0, 0.0}));
    CHECK(pose_in_range(AttitudeAngles{90.0, 170.0, 0.0}));
    CHECK_FALSE(pose_in_range(AttitudeAngles{29.9, 115.0, 0.0}));
    CHECK_FALSE(pose_in_range(AttitudeAngles{45.0, 59.9, 0.0}));
    CHECK_FALSE(pose_in_range(AttitudeAngles{45.0, 170.1, 0.0}));

    CHECK(pose_in_range(angles_to_quat({55.0, 100.0, 30.0})));
    CHECK_FALSE(pose_in_range(angles_to_quat({20.0, 100.0, 30.0})));
}
