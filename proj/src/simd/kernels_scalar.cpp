// SPDX-License-Identifier: Apache-2.0

#include "pentrack/simd/kernels.hpp"

#include <cmath>

namespace pentrack::simd {

void weights_6d_scalar(const double* px, const double* py, const double* qw,
                       const double* qx, const double* qy, const double* qz,
                       std::size_t n, const VoxelField& map, Vec3 mag_loc,
                       Vec3 m_meas, double sigma, double* out) {
    const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
    for (std::size_t i = 0; i < n; ++i) {
        const double w = qw[i], x = qx[i], y = qy[i], z = qz[i];
        // Rows of the screen-to-pencil rotation, i.e. the body axes.
        const double r00 = 1.0 - 2.0 * (y * y + z * z);
        const double r01 = 2.0 * (x * y + w * z);
        const double r02 = 2.0 * (x * z - w * y);
        const double r10 = 2.0 * (x * y - w * z);
        const double r11 = 1.0 - 2.0 * (x * x + z * z);
        const double r12 = 2.0 * (y * z + w * x);
        const double r20 = 2.0 * (x * z + w * y);
        const double r21 = 2.0 * (y * z - w * x);
        const double r22 = 1.0 - 2.0 * (x * x + y * y);

        const double dx = mag_loc.x - px[i];
        const double dy = mag_loc.y - py[i];
        const double dz = mag_loc.z; // tip sits on the screen plane
        Vec3 mp{r00 * dx + r01 * dy + r02 * dz,
                r10 * dx + r11 * dy + r12 * dz,
                r20 * dx + r21 * dy + r22 * dz};
        auto b = query_pencil_map(map, mp);
        if (!b) {
            out[i] = 0.0;
            continue;
        }
        Vec3 mm{r00 * m_meas.x + r01 * m_meas.y + r02 * m_meas.z,
                r10 * m_meas.x + r11 * m_meas.y + r12 * m_meas.z,
                r20 * m_meas.x + r21 * m_meas.y + r22 * m_meas.z};
        Vec3 r = mm - *b;
        out[i] = std::exp(-dot(r, r) * inv2s2);
    }
}

void weights_2d_scalar(const double* px, const double* py, std::size_t n,
                       const ScreenMap2D& map, Vec3 m_meas, double sigma,
                       double* out) {
    const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
    for (std::size_t i = 0; i < n; ++i) {
        auto b = query_2d(map, px[i], py[i]);
        if (!b) {
            out[i] = 0.0;
            continue;
        }
        Vec3 r = m_meas - *b;
        out[i] = std::exp(-dot(r, r) * inv2s2);
    }
}

} // namespace pentrack::simd
