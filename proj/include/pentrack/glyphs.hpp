// SPDX-License-Identifier: Apache-2.0
//
// A tiny polyline font: a-z, 0-9, and a few shapes, each glyph given as one
// or more strokes of normalized points in the unit box (y grows downward,
// matching the screen frame).

#pragma once

#include "pentrack/geometry.hpp"

#include <string>
#include <vector>

namespace pentrack {

using GlyphStrokes = std::vector<std::vector<Vec2>>;

// Throws std::invalid_argument for names not in the font.
const GlyphStrokes& glyph_polylines(const std::string& name);

std::vector<std::string> glyph_names();

} // namespace pentrack
