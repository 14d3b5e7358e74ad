// SPDX-License-Identifier: Apache-2.0

#include "pentrack/magmap.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <tuple>

namespace pentrack {

namespace {

// Alignment tolerances: a mag row counts as pen-down only when a touch row
// exists within 1.5 touch periods (and a pose row within 1.5 mag periods).
constexpr double kTouchTolS = 1.5 / kTouchRateHz;
constexpr double kPoseTolS = 1.5 / kMagRateHz;

template <typename Row>
const Row* nearest_row(const std::vector<Row>& rows, double t, double tol) {
    if (rows.empty()) return nullptr;
    auto it = std::lower_bound(rows.begin(), rows.end(), t,
                               [](const Row& r, double v) { return r.t < v; });
    const Row* best = nullptr;
    double best_dt = tol;
    if (it != rows.end() && std::abs(it->t - t) <= best_dt) {
        best = &*it;
        best_dt = std::abs(it->t - t);
    }
    if (it != rows.begin()) {
        auto prev = std::prev(it);
        if (std::abs(prev->t - t) <= best_dt) best = &*prev;
    }
    return best;
}

} // namespace

Vec3 estimate_ambient(const MagLog& mag, double t0, double t1) {
    Vec3 sum;
    int n = 0;
    for (const Sample3& row : mag)
        if (row.t >= t0 && row.t <= t1) {
            sum += row.v;
            ++n;
        }
    if (n < 10)
        throw std::invalid_argument("ambient estimation needs at least 10 quiet samples");
    return sum / static_cast<double>(n);
}

WarDriveLog align_streams(const TouchLog& touch, const PoseLog& poses, const MagLog& mag) {
    WarDriveLog out;
    for (const Sample3& row : mag) {
        const TouchSample* ts = nearest_row(touch, row.t, kTouchTolS);
        if (!ts) continue;
        const PoseSample* ps = nearest_row(poses, row.t, kPoseTolS);
        if (!ps) continue;
        WarDriveRow r;
        r.t = row.t;
        r.tip = {ts->x, ts->y, 0.0};
        r.axes = quat_to_axes(ps->pose.orientation);
        r.m = row.v;
        out.push_back(r);
    }
    return out;
}

ScreenMap2D build_2d_map(const WarDriveLog& log, double cell_mm) {
    if (cell_mm <= 0.0) throw std::invalid_argument("cell size must be positive");
    if (log.empty()) throw std::invalid_argument("cannot build a map from an empty log");

    double min_x = log[0].tip.x, max_x = min_x, min_y = log[0].tip.y, max_y = min_y;
    for (const WarDriveRow& r : log) {
        min_x = std::min(min_x, r.tip.x);
        max_x = std::max(max_x, r.tip.x);
        min_y = std::min(min_y, r.tip.y);
        max_y = std::max(max_y, r.tip.y);
    }

    ScreenMap2D map;
    map.cell_mm = cell_mm;
    map.origin = {min_x - cell_mm, min_y - cell_mm};
    map.nx = static_cast<int>(std::floor((max_x - map.origin.x) / cell_mm)) + 2;
    map.ny = static_cast<int>(std::floor((max_y - map.origin.y) / cell_mm)) + 2;
    map.mean.assign(static_cast<size_t>(map.nx) * map.ny, Vec3{});
    map.count.assign(static_cast<size_t>(map.nx) * map.ny, 0);

    // Sorting contributions by (cell, value) makes the accumulated means
    // independent of the input row order, bit for bit.
    std::vector<std::tuple<size_t, double, double, double>> rows;
    rows.reserve(log.size());
    for (const WarDriveRow& r : log) {
        int ix = static_cast<int>(std::floor((r.tip.x - map.origin.x) / cell_mm));
        int iy = static_cast<int>(std::floor((r.tip.y - map.origin.y) / cell_mm));
        rows.emplace_back(map.index(ix, iy), r.m.x, r.m.y, r.m.z);
    }
    std::sort(rows.begin(), rows.end());
    for (const auto& [idx, mx, my, mz] : rows) {
        map.mean[idx] += Vec3{mx, my, mz};
        map.count[idx] += 1;
    }
    for (size_t i = 0; i < map.mean.size(); ++i)
        if (map.count[i] > 0) map.mean[i] = map.mean[i] / map.count[i];
    return map;
}

std::optional<Vec3> query_2d(const ScreenMap2D& map, double x, double y) {
    double u = (x - map.origin.x) / map.cell_mm - 0.5;
    double v = (y - map.origin.y) / map.cell_mm - 0.5;
    int ix = static_cast<int>(std::floor(u));
    int iy = static_cast<int>(std::floor(v));
    if (ix < 0 || iy < 0 || ix + 1 >= map.nx || iy + 1 >= map.ny) return std::nullopt;
    double fx = u - ix, fy = v - iy;

    Vec3 acc;
    for (int dy = 0; dy <= 1; ++dy)
        for (int dx = 0; dx <= 1; ++dx) {
            double w = (dx ? fx : 1.0 - fx) * (dy ? fy : 1.0 - fy);
            if (w <= 1e-12) continue; // zero-weight corners may be unobserved
            size_t idx = map.index(ix + dx, iy + dy);
            if (map.count[idx] <= 0) return std::nullopt;
            acc += w * map.mean[idx];
        }
    return acc;
}

VoxelField build_pencil_map(const WarDriveLog& log, const ScreenConfig& screen,
                            double cell_mm) {
    if (cell_mm <= 0.0) throw std::invalid_argument("cell size must be positive");
    if (log.empty()) throw std::invalid_argument("cannot build a map from an empty log");

    std::vector<Vec3> pos(log.size());
    std::vector<Vec3> field(log.size());
    Vec3 lo{1e300, 1e300, 1e300}, hi{-1e300, -1e300, -1e300};
    for (size_t i = 0; i < log.size(); ++i) {
        pos[i] = to_pencil_frame(screen.mag_location, log[i].tip, log[i].axes);
        field[i] = field_to_pencil_frame(log[i].m, log[i].axes);
        lo = {std::min(lo.x, pos[i].x), std::min(lo.y, pos[i].y), std::min(lo.z, pos[i].z)};
        hi = {std::max(hi.x, pos[i].x), std::max(hi.y, pos[i].y), std::max(hi.z, pos[i].z)};
    }

    VoxelField map;
    map.cell_mm = cell_mm;
    map.origin = lo - Vec3{cell_mm, cell_mm, cell_mm};
    map.nx = static_cast<int>(std::floor((hi.x - map.origin.x) / cell_mm)) + 2;
    map.ny = static_cast<int>(std::floor((hi.y - map.origin.y) / cell_mm)) + 2;
    map.nz = static_cast<int>(std::floor((hi.z - map.origin.z) / cell_mm)) + 2;
    map.mean.assign(map.cells(), Vec3{});
    map.count.assign(map.cells(), 0);

    std::vector<std::tuple<size_t, double, double, double>> rows;
    rows.reserve(log.size());
    for (size_t i = 0; i < log.size(); ++i) {
        int ix = static_cast<int>(std::floor((pos[i].x - map.origin.x) / cell_mm));
        int iy = static_cast<int>(std::floor((pos[i].y - map.origin.y) / cell_mm));
        int iz = static_cast<int>(std::floor((pos[i].z - map.origin.z) / cell_mm));
        rows.emplace_back(map.index(ix, iy, iz), field[i].x, field[i].y, field[i].z);
    }
    std::sort(rows.begin(), rows.end());
    for (const auto& [idx, mx, my, mz] : rows) {
        map.mean[idx] += Vec3{mx, my, mz};
        map.count[idx] += 1;
    }
    for (size_t i = 0; i < map.mean.size(); ++i)
        if (map.count[i] > 0) map.mean[i] = map.mean[i] / map.count[i];
    return map;
}

std::optional<Vec3> query_pencil_map(const VoxelField& map, Vec3 p) {
    double u = (p.x - map.origin.x) / map.cell_mm - 0.5;
    double v = (p.y - map.origin.y) / map.cell_mm - 0.5;
    double w = (p.z - map.origin.z) / map.cell_mm - 0.5;
    int ix = static_cast<int>(std::floor(u));
    int iy = static_cast<int>(std::floor(v));
    int iz = static_cast<int>(std::floor(w));
    if (ix < 0 || iy < 0 || iz < 0 || ix + 1 >= map.nx || iy + 1 >= map.ny ||
        iz + 1 >= map.nz)
        return std::nullopt;
    double fx = u - ix, fy = v - iy, fz = w - iz;

    Vec3 acc;
    for (int dz = 0; dz <= 1; ++dz)
        for (int dy = 0; dy <= 1; ++dy)
            for (int dx = 0; dx <= 1; ++dx) {
                double wt = (dx ? fx : 1.0 - fx) * (dy ? fy : 1.0 - fy) * (dz ? fz : 1.0 - fz);
                if (wt <= 1e-12) continue; // zero-weight corners may be unobserved
                size_t idx = map.index(ix + dx, iy + dy, iz + dz);
                if (map.count[idx] <= 0) return std::nullopt;
                acc += wt * map.mean[idx];
            }
    return acc;
}

long voxel_of(const VoxelField& map, Vec3 p) {
    int ix = static_cast<int>(std::floor((p.x - map.origin.x) / map.cell_mm));
    int iy = static_cast<int>(std::floor((p.y - map.origin.y) / map.cell_mm));
    int iz = static_cast<int>(std::floor((p.z - map.origin.z) / map.cell_mm));
    if (ix < 0 || iy < 0 || iz < 0 || ix >= map.nx || iy >= map.ny || iz >= map.nz)
        return -1;
    return static_cast<long>(map.index(ix, iy, iz));
}

VoxelField nn_fill(const VoxelField& map) {
    bool any = false;
    for (int c : map.count)
        if (c > 0) { any = true; break; }
    if (!any) throw std::invalid_argument("cannot fill a map with no observed cells");

    VoxelField out = map;
    // Multi-source BFS over the 6-neighbourhood: each unobserved cell takes
    // the value of its nearest observed cell in grid distance.
    std::vector<int> src(map.cells(), -1);
    std::deque<size_t> frontier;
    for (size_t i = 0; i < map.cells(); ++i)
        if (map.count[i] > 0) {
            src[i] = static_cast<int>(i);
            frontier.push_back(i);
        }
    auto coords = [&](size_t idx) {
        int ix = static_cast<int>(idx % map.nx);
        int iy = static_cast<int>((idx / map.nx) % map.ny);
        int iz = static_cast<int>(idx / (static_cast<size_t>(map.nx) * map.ny));
        return std::array<int, 3>{ix, iy, iz};
    };
    const int steps[6][3] = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
    while (!frontier.empty()) {
        size_t cur = frontier.front();
        frontier.pop_front();
        auto [ix, iy, iz] = coords(cur);
        for (const auto& s : steps) {
            int jx = ix + s[0], jy = iy + s[1], jz = iz + s[2];
            if (jx < 0 || jy < 0 || jz < 0 || jx >= map.nx || jy >= map.ny || jz >= map.nz)
                continue;
            size_t nb = map.index(jx, jy, jz);
            if (src[nb] >= 0) continue;
            src[nb] = src[cur];
            out.mean[nb] = map.mean[static_cast<size_t>(src[cur])];
            out.count[nb] = 1;
            frontier.push_back(nb);
        }
    }
    return out;
}

} // namespace pentrack
