// SPDX-License-Identifier: Apache-2.0
//
// Timestamped sensor log containers shared by the simulator, the mapping
// pipeline, and the trackers. Timestamps are seconds from session start.

#pragma once

#include "pentrack/geometry.hpp"

#include <vector>

namespace pentrack {

constexpr double kMagRateHz = 50.0;
constexpr double kImuRateHz = 100.0;
constexpr double kTouchRateHz = 120.0;

struct Sample3 {
    double t = 0.0;
    Vec3 v;
};

using MagLog = std::vector<Sample3>;   // magnetometer, uT, screen frame
using ImuStream = std::vector<Sample3>; // accel m/s^2 or gyro rad/s

struct TouchSample {
    double t = 0.0;
    double x = 0.0; // mm
    double y = 0.0;
};
using TouchLog = std::vector<TouchSample>;

struct PoseSample {
    double t = 0.0;
    PencilPose pose;
};
using PoseLog = std::vector<PoseSample>;

struct ImuLog {
    ImuStream accel;
    ImuStream gyro;
};

struct SessionLogs {
    MagLog mag;
    TouchLog touch;
    ImuLog imu;
    PoseLog pose;
};

struct TracePoint {
    double t = 0.0;
    double x = 0.0;
    double y = 0.0;
};
using Trace = std::vector<TracePoint>;

struct StrokeInterval {
    double begin_s = 0.0;
    double end_s = 0.0;
};

} // namespace pentrack
