// SPDX-License-Identifier: Apache-2.0

#include "pentrack/geometry.hpp"

#include <algorithm>
#include <array>

namespace pentrack {

namespace {

constexpr double kPi = 3.14159265358979323846;

double deg2rad(double d) { return d * kPi / 180.0; }
double rad2deg(double r) { return r * 180.0 / kPi; }

// Column-major 3x3 helper. cols[i] is the image of the i-th basis vector.
using Mat3 = std::array<Vec3, 3>;

Vec3 mat_apply(const Mat3& m, Vec3 v) {
    return m[0] * v.x + m[1] * v.y + m[2] * v.z;
}

Mat3 mat_mul(const Mat3& a, const Mat3& b) {
    return {mat_apply(a, b[0]), mat_apply(a, b[1]), mat_apply(a, b[2])};
}

Mat3 mat_transpose(const Mat3& m) {
    return {Vec3{m[0].x, m[1].x, m[2].x},
            Vec3{m[0].y, m[1].y, m[2].y},
            Vec3{m[0].z, m[1].z, m[2].z}};
}

// Rodrigues rotation about a unit axis.
Mat3 mat_axis_angle(Vec3 axis, double angle_rad) {
    double c = std::cos(angle_rad);
    double s = std::sin(angle_rad);
    Mat3 m;
    for (int i = 0; i < 3; ++i) {
        Vec3 e{i == 0 ? 1.0 : 0.0, i == 1 ? 1.0 : 0.0, i == 2 ? 1.0 : 0.0};
        m[i] = e * c + cross(axis, e) * s + axis * (dot(axis, e) * (1.0 - c));
    }
    return m;
}

// Tilt that carries the vertical body axis to the given altitude along the
// given azimuth bearing. Identity at altitude 90.
Mat3 tilt_matrix(double altitude_deg, double azimuth_deg) {
    double th2 = deg2rad(azimuth_deg);
    Vec3 axis{std::sin(th2), -std::cos(th2), 0.0};
    return mat_axis_angle(axis, deg2rad(90.0 - altitude_deg));
}

// Vertical pencil with zero roll: body x along screen +x, body z along
// screen -z (right-handed), composed with a roll about the body axis.
Mat3 base_with_roll(double roll_deg) {
    double c = std::cos(deg2rad(roll_deg));
    double s = std::sin(deg2rad(roll_deg));
    // diag(1,-1,-1) * Rz(roll), columns.
    return {Vec3{c, -s, 0.0}, Vec3{-s, -c, 0.0}, Vec3{0.0, 0.0, -1.0}};
}

Mat3 axes_to_mat(const RotationAxes& a) { return {a.x_axis, a.y_axis, a.z_axis}; }

RotationAxes mat_to_axes(const Mat3& m) { return {m[0], m[1], m[2]}; }

double wrap360(double deg) {
    double w = std::fmod(deg, 360.0);
    if (w < 0.0) w += 360.0;
    // fmod can return exactly 360 - eps rounding back up; keep [0, 360).
    return w == 360.0 ? 0.0 : w;
}

} // namespace

Quaternion Quaternion::normalized() const {
    double n = norm();
    if (n == 0.0) throw std::invalid_argument("cannot normalize zero quaternion");
    return {w / n, x / n, y / n, z / n};
}

RotationAxes quat_to_axes(const Quaternion& q_in) {
    if (std::abs(q_in.norm() - 1.0) > 1e-6)
        throw std::invalid_argument("quat_to_axes requires a unit quaternion");
    Quaternion q = q_in.normalized();
    double w = q.w, x = q.x, y = q.y, z = q.z;
    RotationAxes a;
    a.x_axis = {1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y + w * z), 2.0 * (x * z - w * y)};
    a.y_axis = {2.0 * (x * y - w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z + w * x)};
    a.z_axis = {2.0 * (x * z + w * y), 2.0 * (y * z - w * x), 1.0 - 2.0 * (x * x + y * y)};
    return a;
}

Quaternion axes_to_quat(const RotationAxes& axes) {
    // Shepperd's method on the column matrix, branching on the largest
    // diagonal term to keep the divisor well away from zero.
    const Vec3& X = axes.x_axis;
    const Vec3& Y = axes.y_axis;
    const Vec3& Z = axes.z_axis;
    double r00 = X.x, r01 = Y.x, r02 = Z.x;
    double r10 = X.y, r11 = Y.y, r12 = Z.y;
    double r20 = X.z, r21 = Y.z, r22 = Z.z;
    double trace = r00 + r11 + r22;

    Quaternion q;
    if (trace >= r00 && trace >= r11 && trace >= r22) {
        double s = std::sqrt(trace + 1.0) * 2.0;
        q = {0.25 * s, (r21 - r12) / s, (r02 - r20) / s, (r10 - r01) / s};
    } else if (r00 >= r11 && r00 >= r22) {
        double s = std::sqrt(1.0 + r00 - r11 - r22) * 2.0;
        q = {(r21 - r12) / s, 0.25 * s, (r01 + r10) / s, (r02 + r20) / s};
    } else if (r11 >= r22) {
        double s = std::sqrt(1.0 + r11 - r00 - r22) * 2.0;
        q = {(r02 - r20) / s, (r01 + r10) / s, 0.25 * s, (r12 + r21) / s};
    } else {
        double s = std::sqrt(1.0 + r22 - r00 - r11) * 2.0;
        q = {(r10 - r01) / s, (r02 + r20) / s, (r12 + r21) / s, 0.25 * s};
    }
    if (q.w < 0.0) q = {-q.w, -q.x, -q.y, -q.z};
    return q.normalized();
}

RotationAxes angles_to_axes(const AttitudeAngles& angles) {
    Mat3 m = mat_mul(tilt_matrix(angles.altitude_deg, angles.azimuth_deg),
                     base_with_roll(angles.roll_deg));
    return mat_to_axes(m);
}

AttitudeAngles axes_to_angles(const RotationAxes& axes) {
    Vec3 zb = axes.z_axis;
    double sin_alt = std::clamp(-zb.z, -1.0, 1.0);
    double altitude = rad2deg(std::asin(sin_alt));

    double planar = std::hypot(zb.x, zb.y);
    double azimuth = 0.0;
    if (planar > 1e-9) azimuth = wrap360(rad2deg(std::atan2(zb.y, zb.x)));

    // Strip the tilt; what remains is the base frame rolled about its body
    // axis, whose first column reads (cos roll, -sin roll, 0).
    Mat3 residual = mat_mul(mat_transpose(tilt_matrix(altitude, azimuth)), axes_to_mat(axes));
    double roll = wrap360(rad2deg(std::atan2(-residual[0].y, residual[0].x)));
    return {altitude, azimuth, roll};
}

Vec3 to_pencil_frame(Vec3 mag_loc, Vec3 tip_loc, const RotationAxes& axes) {
    Vec3 off = mag_loc - tip_loc;
    return {dot(axes.x_axis, off), dot(axes.y_axis, off), dot(axes.z_axis, off)};
}

Vec3 field_to_pencil_frame(Vec3 m_screen, const RotationAxes& axes) {
    return {dot(axes.x_axis, m_screen), dot(axes.y_axis, m_screen), dot(axes.z_axis, m_screen)};
}

Vec3 field_to_screen_frame(Vec3 m_pencil, const RotationAxes& axes) {
    return axes.x_axis * m_pencil.x + axes.y_axis * m_pencil.y + axes.z_axis * m_pencil.z;
}

Vec3 tip_from_mag_position(Vec3 mag_loc, const RotationAxes& axes, Vec3 mag_in_pencil) {
    Vec3 off = axes.x_axis * mag_in_pencil.x + axes.y_axis * mag_in_pencil.y +
               axes.z_axis * mag_in_pencil.z;
    return mag_loc - off;
}

bool pose_in_range(const AttitudeAngles& angles) {
    return angles.altitude_deg >= kAltitudeMinDeg && angles.altitude_deg <= kAltitudeMaxDeg &&
           angles.azimuth_deg >= kAzimuthMinDeg && angles.azimuth_deg <= kAzimuthMaxDeg;
}

bool pose_in_range(const Quaternion& q) { return pose_in_range(quat_to_angles(q)); }

} // namespace pentrack
