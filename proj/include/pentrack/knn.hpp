// SPDX-License-Identifier: Apache-2.0
//
// Nearest-neighbour baseline: three consecutive magnetometer readings form
// a feature, the predicted position is the mean of the k closest training
// features' positions.

#pragma once

#include "pentrack/logs.hpp"

#include <array>
#include <optional>
#include <vector>

namespace pentrack {

struct KnnModel {
    std::vector<std::array<double, 9>> features;
    std::vector<Vec2> targets; // tip position at the window's last reading
    int k = 3;
};

// Builds windows wherever a pose sample lies close to the window's last
// reading. k is grid-searched over 1..5 on a deterministic 80/20 split
// unless fixed. Throws std::invalid_argument with fewer than 50 windows.
KnnModel knn_fit(const MagLog& mag, const PoseLog& poses,
                 std::optional<int> fixed_k = {});

// One prediction per run of three consecutive readings.
Trace knn_track(const KnnModel& model, const MagLog& mag);

} // namespace pentrack
