// SPDX-License-Identifier: Apache-2.0
//
// File formats: CSV with a header row for the sensor streams, traces, and
// stroke intervals; JSON documents for the maps and the behavior model.
// Numbers are written with round-trip precision so a write/read cycle is
// lossless and repeated runs are byte-identical.

#pragma once

#include "pentrack/logs.hpp"
#include "pentrack/magmap.hpp"
#include "pentrack/tracker.hpp"

#include <string>
#include <vector>

namespace pentrack {

// CSV columns: t_s, mx_uT, my_uT, mz_uT
void write_mag_csv(const std::string& path, const MagLog& log);
MagLog read_mag_csv(const std::string& path);

// CSV columns: t_s, ax, ay, az (m/s^2)
void write_accel_csv(const std::string& path, const ImuStream& log);
ImuStream read_accel_csv(const std::string& path);

// CSV columns: t_s, gx, gy, gz (rad/s)
void write_gyro_csv(const std::string& path, const ImuStream& log);
ImuStream read_gyro_csv(const std::string& path);

// CSV columns: t_s, x_mm, y_mm
void write_touch_csv(const std::string& path, const TouchLog& log);
TouchLog read_touch_csv(const std::string& path);

// CSV columns: t_s, x_mm, y_mm, qw, qx, qy, qz
void write_pose_csv(const std::string& path, const PoseLog& log);
PoseLog read_pose_csv(const std::string& path);

// CSV columns: t_s, x_mm, y_mm
void write_trace_csv(const std::string& path, const Trace& trace);
Trace read_trace_csv(const std::string& path);

// CSV columns: begin_s, end_s
void write_intervals_csv(const std::string& path, const std::vector<StrokeInterval>& iv);
std::vector<StrokeInterval> read_intervals_csv(const std::string& path);

// JSON documents; readers validate the format tag and version.
void write_voxel_map(const std::string& path, const VoxelField& map);
VoxelField read_voxel_map(const std::string& path);

void write_screen_map(const std::string& path, const ScreenMap2D& map);
ScreenMap2D read_screen_map(const std::string& path);

void write_behavior_model(const std::string& path, const BehaviorModel& model);
BehaviorModel read_behavior_model(const std::string& path);

} // namespace pentrack
