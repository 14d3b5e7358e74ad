// SPDX-License-Identifier: Apache-2.0
//
// Runtime-dispatched particle weighting kernels, the hot loop of the
// tracker. The scalar lane is the reference; vector lanes must agree with
// it to 1e-12 relative and are equivalence-tested. Lane selection happens
// once per process: the PENTRACK_SIMD environment variable ("scalar",
// "avx2", "auto") wins, otherwise the best lane the CPU supports is used.
// Further lanes (e.g. neon) slot in beside avx2.

#pragma once

#include "pentrack/geometry.hpp"
#include "pentrack/magmap.hpp"

#include <cstddef>

namespace pentrack::simd {

enum class Lane { scalar, avx2 };

const char* lane_name(Lane lane);
Lane active_lane();
// True when this binary carries the avx2 lane and the CPU can run it.
bool avx2_available();

// w_i = exp(-|r_i|^2 / (2 sigma^2)) where r_i compares the measured field
// against the map, both taken to particle i's pencil frame. Quaternions are
// assumed unit (callers keep them normalized). Sample points outside the
// map extent, or next to an unobserved corner, give weight exactly 0.
void weights_6d_scalar(const double* px, const double* py, const double* qw,
                       const double* qx, const double* qy, const double* qz,
                       std::size_t n, const VoxelField& map, Vec3 mag_loc,
                       Vec3 m_meas, double sigma, double* out);
void weights_6d_avx2(const double* px, const double* py, const double* qw,
                     const double* qx, const double* qy, const double* qz,
                     std::size_t n, const VoxelField& map, Vec3 mag_loc,
                     Vec3 m_meas, double sigma, double* out);
void weights_6d(const double* px, const double* py, const double* qw,
                const double* qx, const double* qy, const double* qz,
                std::size_t n, const VoxelField& map, Vec3 mag_loc,
                Vec3 m_meas, double sigma, double* out);

// Position-only variant against a screen-frame 2-D map.
void weights_2d_scalar(const double* px, const double* py, std::size_t n,
                       const ScreenMap2D& map, Vec3 m_meas, double sigma,
                       double* out);
void weights_2d_avx2(const double* px, const double* py, std::size_t n,
                     const ScreenMap2D& map, Vec3 m_meas, double sigma,
                     double* out);
void weights_2d(const double* px, const double* py, std::size_t n,
                const ScreenMap2D& map, Vec3 m_meas, double sigma, double* out);

} // namespace pentrack::simd
