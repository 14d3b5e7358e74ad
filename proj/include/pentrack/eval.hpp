// SPDX-License-Identifier: Apache-2.0
//
// Trace comparison: raw RMSE on a common timeline and RMSE after the best
// similarity alignment (translation, rotation, uniform scale), which scores
// shape recovery the way a reader would, ignoring global placement.

#pragma once

#include "pentrack/logs.hpp"

#include <cstddef>

namespace pentrack {

struct EvalMetrics {
    double raw_rmse_mm = 0.0;
    double aligned_rmse_mm = 0.0;
    double scale = 1.0;        // similarity transform applied to the trace
    double rotation_deg = 0.0;
    double tx_mm = 0.0;
    double ty_mm = 0.0;
    std::size_t samples = 0;   // common-timeline sample count
};

// Resamples both traces (time-sorted, at least 2 points each) onto a shared
// uniform timeline spanning their overlap, then reports the raw RMSE and the
// RMSE after the least-squares similarity transform mapping the trace onto
// the truth. Throws std::invalid_argument on short inputs or when the
// timelines do not overlap.
EvalMetrics run_eval(const Trace& trace, const Trace& truth);

} // namespace pentrack
