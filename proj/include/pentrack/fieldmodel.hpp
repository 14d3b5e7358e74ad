// SPDX-License-Identifier: Apache-2.0
//
// Synthetic forward model: a pencil carrying a small set of point dipoles,
// an ambient background field, scripted tip trajectories, and a sensor-log
// simulator producing magnetometer/touch/IMU/pose streams at the platform
// rates (50/120/100 Hz). This is the ground-truth oracle the mapping and
// tracking pipelines are validated against.

#pragma once

#include "pentrack/geometry.hpp"
#include "pentrack/logs.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pentrack {

// Point dipole fixed on the pencil body: positioned offset_mm up the body
// z axis from the tip, moment in A*m^2 expressed in the pencil frame.
struct Dipole {
    double offset_mm = 0.0;
    Vec3 moment_Am2;
};

struct DipoleSet {
    std::vector<Dipole> dipoles;

    // Two opposed dipoles partway up the body, deliberately not symmetric
    // about the body axis so that roll is observable in the field.
    static DipoleSet default_pencil();
};

// Uniform background field with optional slow linear drift.
struct AmbientField {
    Vec3 constant{32.0, -12.0, 41.0}; // uT
    Vec3 drift_per_s{0.0, 0.0, 0.0};

    Vec3 at(double t) const { return constant + drift_per_s * t; }
};

struct SensorNoise {
    double sigma_mag_uT = 0.1;
    double sigma_accel = 0.02;      // m/s^2
    double sigma_gyro = 0.002;      // rad/s
    double touch_spike_accel = 0.5; // pen-down/up bump amplitude, m/s^2
    double touch_spike_gyro = 0.05; // rad/s
};

// Field of the dipole set at a point in the pencil frame (mm in, uT out).
// Throws std::domain_error when the point is within 1 mm of a dipole.
Vec3 dipole_field_at(const DipoleSet& set, Vec3 p_pencil_mm);

// Field contributed by the pencil at the magnetometer, screen frame, for a
// given tip position and orientation (ambient not included).
Vec3 pencil_field_at_mag(const DipoleSet& set, const ScreenConfig& screen, Vec2 tip,
                         const RotationAxes& axes);

// Scripts: per-stroke waypoint polylines with absolute timestamps and an
// attitude attached to every waypoint. Position and angles interpolate
// linearly between waypoints; the pencil is lifted between strokes.
struct Waypoint {
    double t_s = 0.0;
    Vec2 tip_mm;
    AttitudeAngles attitude;
};

struct StrokeScript {
    std::vector<Waypoint> points;
};

struct TrajectoryScript {
    std::vector<StrokeScript> strokes;

    double begin_s() const;
    double end_s() const;
};

// Smoothly varying attitude over the course of a glyph, kept strictly
// inside the valid writing ranges.
struct AttitudeProfile {
    double altitude_base = 55.0;
    double altitude_amp = 8.0;
    double azimuth_base = 115.0;
    double azimuth_amp = 25.0;
    double roll_base = 40.0;
    double roll_amp = 120.0;
    double phase = 0.0;

    AttitudeAngles at(double progress) const;
};

// Lay a glyph into one of the three input-region cells (lower half of the
// screen split in thirds; grid is 1-based, left to right). The glyph box is
// size_mm square, centred in the cell. Throws if the glyph is unknown, the
// grid index is out of range, or the box does not fit the cell.
TrajectoryScript script_glyph(const std::string& glyph, int grid, double size_mm,
                              double speed_mm_s, const ScreenConfig& screen,
                              const AttitudeProfile& profile = {});

// Long single-stroke random coverage pass over the screen with the attitude
// random-walking inside the writing ranges; used to build pencil maps.
TrajectoryScript script_wardrive(double duration_s, std::uint64_t seed,
                                 const ScreenConfig& screen);

// Serpentine full-screen scan at a fixed vertical attitude; used to build
// the 2-D screen map.
TrajectoryScript script_scan_2d(const ScreenConfig& screen, double pitch_mm,
                                double speed_mm_s);

// Ground-truth pose at time t, or nothing when the pencil is lifted.
std::optional<PencilPose> script_pose_at(const TrajectoryScript& script, double t);

struct SimOptions {
    double quiet_lead_s = 2.0; // pencil absent before the script starts
    double quiet_tail_s = 1.0;
};

// Renders the script into sensor logs. The magnetometer stream covers the
// whole session (ambient plus pencil field while the tip is down, ambient
// alone while it is lifted, Gaussian noise throughout); touch and pose rows
// exist only while the tip is down; the IMU streams carry noise plus a
// three-sample half-sine bump at every pen-down and pen-up moment.
SessionLogs simulate_session(const TrajectoryScript& script, const DipoleSet& set,
                             const AmbientField& ambient, const ScreenConfig& screen,
                             const SensorNoise& noise, std::uint64_t seed,
                             const SimOptions& opts = {});

} // namespace pentrack
