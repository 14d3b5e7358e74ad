// SPDX-License-Identifier: Apache-2.0

#include "pentrack/simd/kernels.hpp"

#include <cstdlib>
#include <stdexcept>
#include <string>

namespace pentrack::simd {

const char* lane_name(Lane lane) {
    return lane == Lane::avx2 ? "avx2" : "scalar";
}

bool avx2_available() {
#if defined(PENTRACK_HAVE_AVX2_TU)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

namespace {

Lane resolve() {
    if (const char* env = std::getenv("PENTRACK_SIMD")) {
        std::string s(env);
        if (s == "scalar") return Lane::scalar;
        if (s == "avx2") {
            if (!avx2_available())
                throw std::runtime_error(
                    "PENTRACK_SIMD=avx2 but this build or CPU lacks avx2");
            return Lane::avx2;
        }
        if (!s.empty() && s != "auto")
            throw std::runtime_error("PENTRACK_SIMD must be scalar, avx2, or auto");
    }
    return avx2_available() ? Lane::avx2 : Lane::scalar;
}

} // namespace

Lane active_lane() {
    static const Lane lane = resolve();
    return lane;
}

#if !defined(PENTRACK_HAVE_AVX2_TU)
void weights_6d_avx2(const double*, const double*, const double*, const double*,
                     const double*, const double*, std::size_t, const VoxelField&,
                     Vec3, Vec3, double, double*) {
    throw std::runtime_error("avx2 lane not built");
}

void weights_2d_avx2(const double*, const double*, std::size_t,
                     const ScreenMap2D&, Vec3, double, double*) {
    throw std::runtime_error("avx2 lane not built");
}
#endif

void weights_6d(const double* px, const double* py, const double* qw,
                const double* qx, const double* qy, const double* qz,
                std::size_t n, const VoxelField& map, Vec3 mag_loc, Vec3 m_meas,
                double sigma, double* out) {
    if (active_lane() == Lane::avx2)
        weights_6d_avx2(px, py, qw, qx, qy, qz, n, map, mag_loc, m_meas, sigma, out);
    else
        weights_6d_scalar(px, py, qw, qx, qy, qz, n, map, mag_loc, m_meas, sigma, out);
}

void weights_2d(const double* px, const double* py, std::size_t n,
                const ScreenMap2D& map, Vec3 m_meas, double sigma, double* out) {
    if (active_lane() == Lane::avx2)
        weights_2d_avx2(px, py, n, map, m_meas, sigma, out);
    else
        weights_2d_scalar(px, py, n, map, m_meas, sigma, out);
}

} // namespace pentrack::simd
