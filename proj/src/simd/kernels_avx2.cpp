// SPDX-License-Identifier: Apache-2.0
//
// AVX2 lane. The quaternion-to-rotation expansion and both frame
// transforms run four particles wide; map sampling and exp stay scalar
// per lane (the trilinear gather is irregular and exp must round exactly
// like the reference lane's libm).

#include "pentrack/simd/kernels.hpp"

#include <cmath>
#include <immintrin.h>

namespace pentrack::simd {

void weights_6d_avx2(const double* px, const double* py, const double* qw,
                     const double* qx, const double* qy, const double* qz,
                     std::size_t n, const VoxelField& map, Vec3 mag_loc,
                     Vec3 m_meas, double sigma, double* out) {
    const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
    const __m256d one = _mm256_set1_pd(1.0);
    const __m256d two = _mm256_set1_pd(2.0);
    const __m256d vmagx = _mm256_set1_pd(mag_loc.x);
    const __m256d vmagy = _mm256_set1_pd(mag_loc.y);
    const __m256d vmagz = _mm256_set1_pd(mag_loc.z);
    const __m256d vmx = _mm256_set1_pd(m_meas.x);
    const __m256d vmy = _mm256_set1_pd(m_meas.y);
    const __m256d vmz = _mm256_set1_pd(m_meas.z);

    alignas(32) double mpx[4], mpy[4], mpz[4], mmx[4], mmy[4], mmz[4];
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d w = _mm256_loadu_pd(qw + i);
        const __m256d x = _mm256_loadu_pd(qx + i);
        const __m256d y = _mm256_loadu_pd(qy + i);
        const __m256d z = _mm256_loadu_pd(qz + i);

        const __m256d r00 = _mm256_fnmadd_pd(
            two, _mm256_fmadd_pd(y, y, _mm256_mul_pd(z, z)), one);
        const __m256d r01 =
            _mm256_mul_pd(two, _mm256_fmadd_pd(x, y, _mm256_mul_pd(w, z)));
        const __m256d r02 =
            _mm256_mul_pd(two, _mm256_fmsub_pd(x, z, _mm256_mul_pd(w, y)));
        const __m256d r10 =
            _mm256_mul_pd(two, _mm256_fmsub_pd(x, y, _mm256_mul_pd(w, z)));
        const __m256d r11 = _mm256_fnmadd_pd(
            two, _mm256_fmadd_pd(x, x, _mm256_mul_pd(z, z)), one);
        const __m256d r12 =
            _mm256_mul_pd(two, _mm256_fmadd_pd(y, z, _mm256_mul_pd(w, x)));
        const __m256d r20 =
            _mm256_mul_pd(two, _mm256_fmadd_pd(x, z, _mm256_mul_pd(w, y)));
        const __m256d r21 =
            _mm256_mul_pd(two, _mm256_fmsub_pd(y, z, _mm256_mul_pd(w, x)));
        const __m256d r22 = _mm256_fnmadd_pd(
            two, _mm256_fmadd_pd(x, x, _mm256_mul_pd(y, y)), one);

        const __m256d dx = _mm256_sub_pd(vmagx, _mm256_loadu_pd(px + i));
        const __m256d dy = _mm256_sub_pd(vmagy, _mm256_loadu_pd(py + i));
        const __m256d dz = vmagz;

        _mm256_store_pd(
            mpx, _mm256_fmadd_pd(r00, dx,
                                 _mm256_fmadd_pd(r01, dy, _mm256_mul_pd(r02, dz))));
        _mm256_store_pd(
            mpy, _mm256_fmadd_pd(r10, dx,
                                 _mm256_fmadd_pd(r11, dy, _mm256_mul_pd(r12, dz))));
        _mm256_store_pd(
            mpz, _mm256_fmadd_pd(r20, dx,
                                 _mm256_fmadd_pd(r21, dy, _mm256_mul_pd(r22, dz))));
        _mm256_store_pd(
            mmx, _mm256_fmadd_pd(r00, vmx,
                                 _mm256_fmadd_pd(r01, vmy, _mm256_mul_pd(r02, vmz))));
        _mm256_store_pd(
            mmy, _mm256_fmadd_pd(r10, vmx,
                                 _mm256_fmadd_pd(r11, vmy, _mm256_mul_pd(r12, vmz))));
        _mm256_store_pd(
            mmz, _mm256_fmadd_pd(r20, vmx,
                                 _mm256_fmadd_pd(r21, vmy, _mm256_mul_pd(r22, vmz))));

        for (int l = 0; l < 4; ++l) {
            auto b = query_pencil_map(map, {mpx[l], mpy[l], mpz[l]});
            if (!b) {
                out[i + l] = 0.0;
                continue;
            }
            const double rx = mmx[l] - b->x;
            const double ry = mmy[l] - b->y;
            const double rz = mmz[l] - b->z;
            out[i + l] = std::exp(-(rx * rx + ry * ry + rz * rz) * inv2s2);
        }
    }
    if (i < n)
        weights_6d_scalar(px + i, py + i, qw + i, qx + i, qy + i, qz + i, n - i,
                          map, mag_loc, m_meas, sigma, out + i);
}

void weights_2d_avx2(const double* px, const double* py, std::size_t n,
                     const ScreenMap2D& map, Vec3 m_meas, double sigma,
                     double* out) {
    const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
    const __m256d vmx = _mm256_set1_pd(m_meas.x);
    const __m256d vmy = _mm256_set1_pd(m_meas.y);
    const __m256d vmz = _mm256_set1_pd(m_meas.z);
    const __m256d vneg = _mm256_set1_pd(-inv2s2);

    alignas(32) double bx[4], by[4], bz[4], arg[4];
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        bool ok[4];
        for (int l = 0; l < 4; ++l) {
            auto b = query_2d(map, px[i + l], py[i + l]);
            ok[l] = b.has_value();
            bx[l] = ok[l] ? b->x : 0.0;
            by[l] = ok[l] ? b->y : 0.0;
            bz[l] = ok[l] ? b->z : 0.0;
        }
        const __m256d rx = _mm256_sub_pd(vmx, _mm256_load_pd(bx));
        const __m256d ry = _mm256_sub_pd(vmy, _mm256_load_pd(by));
        const __m256d rz = _mm256_sub_pd(vmz, _mm256_load_pd(bz));
        const __m256d n2 = _mm256_fmadd_pd(
            rx, rx, _mm256_fmadd_pd(ry, ry, _mm256_mul_pd(rz, rz)));
        _mm256_store_pd(arg, _mm256_mul_pd(n2, vneg));
        for (int l = 0; l < 4; ++l)
            out[i + l] = ok[l] ? std::exp(arg[l]) : 0.0;
    }
    if (i < n)
        weights_2d_scalar(px + i, py + i, n - i, map, m_meas, sigma, out + i);
}

} // namespace pentrack::simd
