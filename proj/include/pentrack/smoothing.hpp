// SPDX-License-Identifier: Apache-2.0
//
// Post-hoc smoothing of recovered orientation tracks. A constant-state
// Kalman filter runs forward over each quaternion component, a
// Rauch-Tung-Striebel pass runs backward, and the result is renormalized.

#pragma once

#include "pentrack/geometry.hpp"

#include <vector>

namespace pentrack {

struct KalmanParams {
    double process_var = 1e-4;
    double obs_var = 1e-2;
};

// Forward filter plus RTS backward pass for a scalar random-walk state
// observed with white noise. Series of length 0 or 1 pass through.
std::vector<double> kalman_smooth_series(const std::vector<double>& obs,
                                         const KalmanParams& params = {});

// Component-wise smoothing of an orientation track. Inputs are first
// hemisphere-aligned (q and -q encode the same rotation), so sign flips in
// the input only matter at index 0, where they negate the whole output.
std::vector<Quaternion> kalman_smooth_quats(const std::vector<Quaternion>& track,
                                            const KalmanParams& params = {});

} // namespace pentrack
