// SPDX-License-Identifier: Apache-2.0
//
// Two-step stroke detection: rough segmentation from the sliding-window
// variance of the magnetometer stream, then boundary refinement from the
// short accelerometer and gyroscope bumps the pen makes when it touches
// down and lifts off.

#pragma once

#include "pentrack/logs.hpp"

#include <vector>

namespace pentrack {

struct StrokeWindowConfig {
    int window = 100;                 // samples
    double variance_threshold = 0.12; // uT^2, sum of the three per-axis variances
};

struct ImuPeakConfig {
    // Fixed defaults sit well above the simulated sensor noise (about ten
    // sigma) so a single-sample exceedance test stays quiet over the long
    // search ranges left by the rough stage; robust_peak_config derives
    // data-driven values instead.
    double accel_threshold = 0.2; // m/s^2
    double gyro_threshold = 0.02; // rad/s
    int search_margin = 25;       // IMU samples added around each rough interval
};

// Slides a window one sample at a time and marks the window midpoint when
// the summed per-axis variance first exceeds the threshold (stroke begins)
// and again when it falls back under it (stroke ends). Variance ignores the
// constant ambient offset, so the raw stream can be passed directly. Logs
// shorter than the window give an empty list. Throws std::invalid_argument
// on window < 2 or a nonpositive threshold.
std::vector<StrokeInterval> rough_strokes(const MagLog& mag,
                                          const StrokeWindowConfig& cfg = {});

// Snaps each rough interval to the IMU bumps: inside the interval widened
// by search_margin samples on both sides, begin moves to the first sample
// whose accel or gyro magnitude exceeds its threshold and end to the last.
// Ranges without any peak keep the rough boundaries; a lone peak moves only
// the nearer boundary. Output stays sorted and disjoint. Throws
// std::invalid_argument on nonpositive thresholds.
std::vector<StrokeInterval> refine_strokes(const std::vector<StrokeInterval>& rough,
                                           const ImuStream& accel,
                                           const ImuStream& gyro,
                                           const ImuPeakConfig& cfg = {});

// Data-driven thresholds from a quiet interval [t0, t1]: per-stream median
// of the sample magnitudes plus k times the normalized median absolute
// deviation. Throws std::invalid_argument when a stream has no samples in
// the interval.
ImuPeakConfig robust_peak_config(const ImuStream& accel, const ImuStream& gyro,
                                 double t0, double t1, double k = 3.0);

} // namespace pentrack
