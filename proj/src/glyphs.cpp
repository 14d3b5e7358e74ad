// SPDX-License-Identifier: Apache-2.0

#include "pentrack/glyphs.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace pentrack {

namespace {

constexpr double kPi = 3.14159265358979323846;

GlyphStrokes make_circle() {
    std::vector<Vec2> pts;
    for (int i = 0; i <= 24; ++i) {
        double a = 2.0 * kPi * i / 24.0;
        pts.push_back({0.5 + 0.4 * std::cos(a), 0.5 + 0.4 * std::sin(a)});
    }
    return {pts};
}

GlyphStrokes make_heart() {
    // Classic cardioid-style parametric heart, flipped so it points down the
    // screen-frame y axis and squeezed into the unit box.
    std::vector<Vec2> pts;
    for (int i = 0; i <= 26; ++i) {
        double t = 2.0 * kPi * i / 26.0;
        double x = 16.0 * std::pow(std::sin(t), 3);
        double y = 13.0 * std::cos(t) - 5.0 * std::cos(2 * t) - 2.0 * std::cos(3 * t) -
                   std::cos(4 * t);
        pts.push_back({0.5 + x / 40.0, 0.5 - y / 40.0});
    }
    return {pts};
}

GlyphStrokes make_star() {
    std::vector<Vec2> pts;
    for (int i = 0; i <= 10; ++i) {
        double r = (i % 2 == 0) ? 0.45 : 0.18;
        double a = -kPi / 2.0 + kPi * i / 5.0;
        pts.push_back({0.5 + r * std::cos(a), 0.5 + r * std::sin(a)});
    }
    return {pts};
}

const std::map<std::string, GlyphStrokes>& font() {
    static const std::map<std::string, GlyphStrokes> f = [] {
        std::map<std::string, GlyphStrokes> g;

        g["a"] = {{{0.68, 0.42}, {0.5, 0.3}, {0.32, 0.38}, {0.27, 0.55}, {0.32, 0.72},
                   {0.5, 0.8}, {0.68, 0.72}, {0.68, 0.32}, {0.68, 0.8}}};
        g["b"] = {{{0.3, 0.1}, {0.3, 0.8}, {0.5, 0.8}, {0.66, 0.7}, {0.66, 0.5},
                   {0.5, 0.42}, {0.3, 0.48}}};
        g["c"] = {{{0.68, 0.38}, {0.5, 0.3}, {0.33, 0.4}, {0.28, 0.55}, {0.33, 0.7},
                   {0.5, 0.8}, {0.68, 0.72}}};
        g["d"] = {{{0.68, 0.1}, {0.68, 0.8}, {0.48, 0.8}, {0.32, 0.7}, {0.32, 0.5},
                   {0.48, 0.42}, {0.68, 0.48}}};
        g["e"] = {{{0.3, 0.55}, {0.68, 0.55}, {0.66, 0.4}, {0.5, 0.3}, {0.33, 0.4},
                   {0.28, 0.55}, {0.33, 0.72}, {0.5, 0.8}, {0.66, 0.74}}};
        g["f"] = {{{0.6, 0.12}, {0.45, 0.18}, {0.4, 0.3}, {0.4, 0.85}},
                  {{0.28, 0.45}, {0.58, 0.45}}};
        g["g"] = {{{0.66, 0.3}, {0.48, 0.3}, {0.34, 0.4}, {0.34, 0.58}, {0.48, 0.66},
                   {0.66, 0.6}, {0.66, 0.32}, {0.66, 0.78}, {0.52, 0.88}, {0.36, 0.84}}};
        g["h"] = {{{0.3, 0.1}, {0.3, 0.85}},
                  {{0.3, 0.5}, {0.5, 0.4}, {0.66, 0.48}, {0.66, 0.85}}};
        g["i"] = {{{0.5, 0.35}, {0.5, 0.8}}, {{0.5, 0.16}, {0.5, 0.22}}};
        g["j"] = {{{0.55, 0.35}, {0.55, 0.75}, {0.45, 0.88}, {0.33, 0.84}},
                  {{0.55, 0.16}, {0.55, 0.22}}};
        g["k"] = {{{0.3, 0.1}, {0.3, 0.85}}, {{0.62, 0.35}, {0.3, 0.6}, {0.64, 0.85}}};
        g["l"] = {{{0.5, 0.1}, {0.5, 0.9}}};
        g["m"] = {{{0.25, 0.8}, {0.25, 0.32}, {0.38, 0.3}, {0.48, 0.42}, {0.48, 0.8},
                   {0.48, 0.42}, {0.6, 0.3}, {0.72, 0.42}, {0.72, 0.8}}};
        g["n"] = {{{0.3, 0.8}, {0.3, 0.32}, {0.48, 0.3}, {0.66, 0.42}, {0.66, 0.8}}};
        g["o"] = {{{0.5, 0.3}, {0.33, 0.4}, {0.28, 0.55}, {0.33, 0.7}, {0.5, 0.8},
                   {0.67, 0.7}, {0.72, 0.55}, {0.67, 0.4}, {0.5, 0.3}}};
        g["p"] = {{{0.3, 0.3}, {0.3, 0.9}},
                  {{0.3, 0.36}, {0.5, 0.3}, {0.66, 0.4}, {0.66, 0.56}, {0.5, 0.64},
                   {0.3, 0.58}}};
        g["q"] = {{{0.66, 0.36}, {0.48, 0.3}, {0.34, 0.4}, {0.34, 0.56}, {0.48, 0.64},
                   {0.66, 0.58}, {0.66, 0.3}, {0.66, 0.9}}};
        g["r"] = {{{0.32, 0.8}, {0.32, 0.3}, {0.32, 0.42}, {0.5, 0.3}, {0.64, 0.36}}};
        g["s"] = {{{0.66, 0.36}, {0.5, 0.3}, {0.34, 0.36}, {0.34, 0.48}, {0.66, 0.6},
                   {0.66, 0.74}, {0.5, 0.8}, {0.34, 0.74}}};
        g["t"] = {{{0.5, 0.12}, {0.5, 0.75}, {0.58, 0.82}}, {{0.32, 0.35}, {0.66, 0.35}}};
        g["u"] = {{{0.3, 0.3}, {0.3, 0.68}, {0.42, 0.8}, {0.6, 0.76}, {0.66, 0.62},
                   {0.66, 0.3}, {0.66, 0.8}}};
        g["v"] = {{{0.3, 0.3}, {0.5, 0.8}, {0.7, 0.3}}};
        g["w"] = {{{0.25, 0.3}, {0.36, 0.8}, {0.5, 0.45}, {0.64, 0.8}, {0.75, 0.3}}};
        g["x"] = {{{0.3, 0.3}, {0.7, 0.8}}, {{0.7, 0.3}, {0.3, 0.8}}};
        g["y"] = {{{0.3, 0.3}, {0.5, 0.7}}, {{0.7, 0.3}, {0.42, 0.9}, {0.3, 0.86}}};
        g["z"] = {{{0.3, 0.3}, {0.68, 0.3}, {0.3, 0.8}, {0.68, 0.8}}};

        g["0"] = {{{0.5, 0.12}, {0.34, 0.25}, {0.3, 0.5}, {0.34, 0.75}, {0.5, 0.88},
                   {0.66, 0.75}, {0.7, 0.5}, {0.66, 0.25}, {0.5, 0.12}}};
        g["1"] = {{{0.4, 0.25}, {0.55, 0.12}, {0.55, 0.88}}};
        g["2"] = {{{0.32, 0.3}, {0.42, 0.14}, {0.6, 0.12}, {0.68, 0.28}, {0.6, 0.48},
                   {0.3, 0.88}, {0.7, 0.88}}};
        g["3"] = {{{0.32, 0.2}, {0.5, 0.12}, {0.66, 0.24}, {0.56, 0.45}, {0.46, 0.5},
                   {0.58, 0.52}, {0.68, 0.68}, {0.56, 0.86}, {0.34, 0.84}}};
        g["4"] = {{{0.6, 0.88}, {0.6, 0.12}, {0.3, 0.6}, {0.72, 0.6}}};
        g["5"] = {{{0.66, 0.12}, {0.36, 0.12}, {0.33, 0.46}, {0.52, 0.4}, {0.68, 0.52},
                   {0.68, 0.7}, {0.52, 0.86}, {0.33, 0.8}}};
        g["6"] = {{{0.62, 0.14}, {0.42, 0.3}, {0.33, 0.55}, {0.36, 0.75}, {0.52, 0.87},
                   {0.66, 0.76}, {0.66, 0.6}, {0.5, 0.52}, {0.36, 0.6}}};
        g["7"] = {{{0.3, 0.12}, {0.7, 0.12}, {0.45, 0.88}}};
        g["8"] = {{{0.5, 0.48}, {0.36, 0.38}, {0.38, 0.18}, {0.5, 0.12}, {0.62, 0.18},
                   {0.64, 0.38}, {0.5, 0.48}, {0.34, 0.62}, {0.36, 0.82}, {0.5, 0.88},
                   {0.64, 0.82}, {0.66, 0.62}, {0.5, 0.48}}};
        g["9"] = {{{0.64, 0.45}, {0.48, 0.52}, {0.34, 0.4}, {0.34, 0.24}, {0.48, 0.13},
                   {0.64, 0.2}, {0.64, 0.45}, {0.64, 0.88}}};

        g["square"] = {{{0.1, 0.1}, {0.9, 0.1}, {0.9, 0.9}, {0.1, 0.9}, {0.1, 0.1}}};
        g["triangle"] = {{{0.5, 0.1}, {0.9, 0.85}, {0.1, 0.85}, {0.5, 0.1}}};
        g["circle"] = make_circle();
        g["heart"] = make_heart();
        g["star"] = make_star();
        return g;
    }();
    return f;
}

} // namespace

const GlyphStrokes& glyph_polylines(const std::string& name) {
    const auto& f = font();
    auto it = f.find(name);
    if (it == f.end()) throw std::invalid_argument("unknown glyph: " + name);
    return it->second;
}

std::vector<std::string> glyph_names() {
    std::vector<std::string> names;
    for (const auto& [k, v] : font()) names.push_back(k);
    return names;
}

} // namespace pentrack
