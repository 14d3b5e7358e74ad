// SPDX-License-Identifier: Apache-2.0
//
// Frames, orientation representations, and the transforms between the screen
// frame and the pencil body frame.
//
// Screen frame: origin at the top-left corner of the display, x along the
// short edge, y along the long edge, z downward (right-handed). A pencil
// standing vertically on the screen therefore has its body axis along -z.
// All lengths are millimetres, all angles degrees.

#pragma once

#include <cmath>
#include <stdexcept>

namespace pentrack {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
};

inline Vec3 operator+(Vec3 a, Vec3 b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline Vec3 operator-(Vec3 a, Vec3 b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline Vec3 operator*(double s, Vec3 v) { return {s * v.x, s * v.y, s * v.z}; }
inline Vec3 operator*(Vec3 v, double s) { return s * v; }
inline Vec3 operator/(Vec3 v, double s) { return {v.x / s, v.y / s, v.z / s}; }
inline Vec3& operator+=(Vec3& a, Vec3 b) { a = a + b; return a; }
inline Vec3& operator-=(Vec3& a, Vec3 b) { a = a - b; return a; }

inline double dot(Vec3 a, Vec3 b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline Vec3 cross(Vec3 a, Vec3 b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}
inline double norm(Vec3 v) { return std::sqrt(dot(v, v)); }
inline Vec3 normalized(Vec3 v) {
    double n = norm(v);
    if (n == 0.0) throw std::invalid_argument("cannot normalize zero vector");
    return v / n;
}

// Unit quaternion, scalar-first. q and -q encode the same rotation.
struct Quaternion {
    double w = 1.0;
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    double norm() const { return std::sqrt(w * w + x * x + y * y + z * z); }
    Quaternion normalized() const;
};

// The pencil body axes expressed in screen coordinates. Rows of the
// screen-to-pencil rotation P_s, so P_s*v = (x_axis.v, y_axis.v, z_axis.v).
struct RotationAxes {
    Vec3 x_axis{1, 0, 0};
    Vec3 y_axis{0, 1, 0};
    Vec3 z_axis{0, 0, 1};
};

// Altitude is the angle between the pencil body and the screen plane
// (90 = perpendicular). Azimuth is the in-plane bearing of the body's
// projection measured from screen +x. Roll turns about the body axis.
struct AttitudeAngles {
    double altitude_deg = 90.0;
    double azimuth_deg = 0.0;
    double roll_deg = 0.0;
};

struct PencilPose {
    Vec2 tip;               // tip contact point on the screen, mm
    Quaternion orientation; // pencil body frame relative to the screen frame
};

struct ScreenConfig {
    double width_mm = 230.0;
    double height_mm = 160.0;
    Vec3 mag_location{215.0, 15.0, 0.0}; // magnetometer position, screen frame

    bool contains(double x, double y) const {
        return x >= 0.0 && x <= width_mm && y >= 0.0 && y <= height_mm;
    }
};

// Valid writing attitude per the threat model's grip assumptions.
constexpr double kAltitudeMinDeg = 30.0;
constexpr double kAltitudeMaxDeg = 90.0;
constexpr double kAzimuthMinDeg = 60.0;
constexpr double kAzimuthMaxDeg = 170.0;

// Conversions between the three orientation representations. quat_to_axes
// rejects quaternions whose norm deviates from 1 by more than 1e-6.
RotationAxes quat_to_axes(const Quaternion& q);
Quaternion axes_to_quat(const RotationAxes& axes); // canonical w >= 0
RotationAxes angles_to_axes(const AttitudeAngles& angles);
// At altitude 90 the azimuth is degenerate and reported as 0.
AttitudeAngles axes_to_angles(const RotationAxes& axes);

inline AttitudeAngles quat_to_angles(const Quaternion& q) {
    return axes_to_angles(quat_to_axes(q));
}
inline Quaternion angles_to_quat(const AttitudeAngles& a) {
    return axes_to_quat(angles_to_axes(a));
}

// Magnetometer position in the pencil frame given the tip location and the
// pencil orientation: P_s * (mag_loc - tip_loc).
Vec3 to_pencil_frame(Vec3 mag_loc, Vec3 tip_loc, const RotationAxes& axes);

// Field vector conversions between frames: P_s * m and its inverse.
Vec3 field_to_pencil_frame(Vec3 m_screen, const RotationAxes& axes);
Vec3 field_to_screen_frame(Vec3 m_pencil, const RotationAxes& axes);

// Inverse of to_pencil_frame: recover the tip location from the magnetometer
// position expressed in the pencil frame.
Vec3 tip_from_mag_position(Vec3 mag_loc, const RotationAxes& axes, Vec3 mag_in_pencil);

// True iff altitude is within [30, 90] and azimuth within [60, 170] degrees.
bool pose_in_range(const AttitudeAngles& angles);
bool pose_in_range(const Quaternion& q);

} // namespace pentrack
