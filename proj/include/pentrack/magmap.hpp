// SPDX-License-Identifier: Apache-2.0
//
// Magnetic mapping: aligning war-driving streams, depositing readings into
// screen-plane (2-D) and pencil-frame (3-D voxel) maps, interpolated queries,
// discrete vector calculus, and the regularized reconstruction that fills
// unobserved cells while denoising observed ones.

#pragma once

#include "pentrack/geometry.hpp"
#include "pentrack/logs.hpp"

#include <optional>
#include <utility>
#include <vector>

namespace pentrack {

// One aligned war-driving observation: where the tip was, how the pencil was
// held, and the (ambient-subtracted) field the magnetometer saw.
struct WarDriveRow {
    double t = 0.0;
    Vec3 tip;          // mm, screen frame, z = 0
    RotationAxes axes; // screen-to-pencil rotation rows
    Vec3 m;            // uT, screen frame
};
using WarDriveLog = std::vector<WarDriveRow>;

// Regular grid over the screen plane; cell means of the observed field.
struct ScreenMap2D {
    Vec2 origin;          // corner of cell (0,0), mm
    double cell_mm = 5.0;
    int nx = 0, ny = 0;
    std::vector<Vec3> mean;  // x-fastest
    std::vector<int> count;

    size_t index(int ix, int iy) const { return static_cast<size_t>(ix) + nx * iy; }
};

// Regular voxel grid in the pencil frame; cell means of the observed field
// expressed in pencil coordinates.
struct VoxelField {
    Vec3 origin;          // corner of cell (0,0,0), mm
    double cell_mm = 5.0;
    int nx = 0, ny = 0, nz = 0;
    std::vector<Vec3> mean;  // x-fastest, then y, then z
    std::vector<int> count;

    size_t index(int ix, int iy, int iz) const {
        return static_cast<size_t>(ix) + nx * (static_cast<size_t>(iy) + ny * iz);
    }
    size_t cells() const { return static_cast<size_t>(nx) * ny * nz; }
    Vec3 cell_center(int ix, int iy, int iz) const {
        return origin + Vec3{(ix + 0.5) * cell_mm, (iy + 0.5) * cell_mm, (iz + 0.5) * cell_mm};
    }
};

// Mean field over a quiet interval; needs at least 10 samples in [t0, t1].
Vec3 estimate_ambient(const MagLog& mag, double t0, double t1);

// One row per magnetometer sample taken while the pen was down, pairing it
// with the nearest-in-time touch and pose records. Ambient subtraction is
// the caller's job (estimate_ambient exists for that).
WarDriveLog align_streams(const TouchLog& touch, const PoseLog& poses, const MagLog& mag);

// Screen-plane map for a fixed (vertical) grip. Extent is the bounding box
// of the tips padded by one cell.
ScreenMap2D build_2d_map(const WarDriveLog& log, double cell_mm);

// Bilinear interpolation over the four surrounding cell centres. Empty when
// the point leaves the interpolation extent or touches an unobserved cell.
std::optional<Vec3> query_2d(const ScreenMap2D& map, double x, double y);

// Voxel map of the pencil's own field: each row deposits the magnetometer
// position (transformed into the pencil frame) and the field rotated into
// pencil coordinates. Extent is the sample bounding box padded by one cell.
VoxelField build_pencil_map(const WarDriveLog& log, const ScreenConfig& screen,
                            double cell_mm = 5.0);

// Trilinear interpolation over the eight surrounding cell centres; empty on
// leaving the extent or touching an unobserved cell.
std::optional<Vec3> query_pencil_map(const VoxelField& map, Vec3 p_pencil);

// Flat cell index containing p, or -1 outside the grid. Exposed so tests can
// reason about where a sample lands.
long voxel_of(const VoxelField& map, Vec3 p_pencil);

// Central differences inside, one-sided at the boundaries; operates on the
// mean array as-is. Units are uT/mm. Requires at least 2 cells per axis.
struct DivCurl {
    std::vector<double> div;
    std::vector<Vec3> curl;
};
DivCurl discrete_div_curl(const VoxelField& map);

// Copy of the map with every unobserved cell filled from its nearest
// observed neighbour (grid distance); also the reconstruction's start point.
VoxelField nn_fill(const VoxelField& map);

struct ReconstructionConfig {
    double lambda_curl = 0.01;
    double lambda_div = 1.0;
    int max_iters = 500;
    double tol = 1e-6;        // stop once an accepted step improves J by less
    double huber_delta = 1e-3; // smoothing knee for the L1 terms, uT/mm
};

struct ReconstructionResult {
    VoxelField field;           // fully populated (filled cells get count 1)
    bool converged = false;
    int iterations = 0;
    std::vector<double> energy; // accepted objective values, nonincreasing
};

// Minimizes  sum_observed |g - f|^2 + lambda_c |curl g|_1 + lambda_d |div g|_1
// (L1 terms Huber-smoothed) by gradient descent with a backtracking line
// search, so the recorded energy never increases. Needs at least one
// observed cell and 2 cells per axis.
ReconstructionResult reconstruct(const VoxelField& map, const ReconstructionConfig& cfg);

// Picks the candidate pair minimizing squared error on held-out observed
// cells (blanked during the fit). Returns {lambda_curl, lambda_div}.
std::pair<double, double> grid_search_lambda(const VoxelField& map,
                                             const std::vector<std::pair<double, double>>& candidates,
                                             const std::vector<size_t>& validation_cells,
                                             const ReconstructionConfig& base);

std::vector<std::pair<double, double>> default_lambda_candidates();

} // namespace pentrack
