// SPDX-License-Identifier: Apache-2.0
//
// Minimal vector rendering: recovered traces as polylines over the screen
// outline. Screen coordinates map linearly to document units, and both put
// the origin at the top-left with y growing downward, so no flip is needed.

#pragma once

#include "pentrack/geometry.hpp"
#include "pentrack/logs.hpp"

#include <string>
#include <vector>

namespace pentrack {

// Writes an SVG with the screen outline and one polyline per trace; scale
// is document units per mm. Throws std::runtime_error when the path cannot
// be written.
void render_trace(const std::vector<Trace>& traces, const ScreenConfig& screen,
                  const std::string& path, double scale = 4.0);

} // namespace pentrack
