// SPDX-License-Identifier: Apache-2.0

#include "pentrack/strokedetect.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace pentrack {
namespace {

double magnitude(Vec3 v) { return std::sqrt(dot(v, v)); }

double median_inplace(std::vector<double>& v) {
    const std::size_t n = v.size();
    auto mid = v.begin() + n / 2;
    std::nth_element(v.begin(), mid, v.end());
    if (n % 2 == 1) return *mid;
    double hi = *mid;
    double lo = *std::max_element(v.begin(), mid);
    return 0.5 * (lo + hi);
}

double robust_threshold(const ImuStream& s, double t0, double t1, double k) {
    std::vector<double> mags;
    for (const Sample3& r : s)
        if (r.t >= t0 && r.t <= t1) mags.push_back(magnitude(r.v));
    if (mags.empty())
        throw std::invalid_argument("robust_peak_config: no samples in quiet interval");
    double med = median_inplace(mags);
    for (double& m : mags) m = std::abs(m - med);
    double mad = median_inplace(mags);
    return med + k * 1.4826 * mad;
}

} // namespace

std::vector<StrokeInterval> rough_strokes(const MagLog& mag,
                                          const StrokeWindowConfig& cfg) {
    if (cfg.window < 2)
        throw std::invalid_argument("rough_strokes: window must be at least 2");
    if (!(cfg.variance_threshold > 0.0))
        throw std::invalid_argument("rough_strokes: threshold must be positive");

    std::vector<StrokeInterval> out;
    const std::size_t n = mag.size();
    const std::size_t w = static_cast<std::size_t>(cfg.window);
    if (n < w) return out;

    // Prefix sums of the readings and their componentwise squares.
    std::vector<Vec3> s1(n + 1), s2(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        Vec3 v = mag[i].v;
        s1[i + 1] = s1[i] + v;
        s2[i + 1] = s2[i] + Vec3{v.x * v.x, v.y * v.y, v.z * v.z};
    }
    auto window_stat = [&](std::size_t i) {
        Vec3 m1 = (s1[i + w] - s1[i]) * (1.0 / w);
        Vec3 m2 = (s2[i + w] - s2[i]) * (1.0 / w);
        return (m2.x - m1.x * m1.x) + (m2.y - m1.y * m1.y) + (m2.z - m1.z * m1.z);
    };

    bool open = false;
    double begin = 0.0;
    for (std::size_t i = 0; i + w <= n; ++i) {
        double mid = mag[i + (w - 1) / 2].t;
        if (!open && window_stat(i) > cfg.variance_threshold) {
            open = true;
            begin = mid;
        } else if (open && window_stat(i) <= cfg.variance_threshold) {
            open = false;
            if (mid > begin) out.push_back({begin, mid});
        }
    }
    if (open) {
        double mid = mag[(n - w) + (w - 1) / 2].t;
        if (mid > begin) out.push_back({begin, mid});
    }
    return out;
}

std::vector<StrokeInterval> refine_strokes(const std::vector<StrokeInterval>& rough,
                                           const ImuStream& accel,
                                           const ImuStream& gyro,
                                           const ImuPeakConfig& cfg) {
    if (!(cfg.accel_threshold > 0.0) || !(cfg.gyro_threshold > 0.0))
        throw std::invalid_argument("refine_strokes: thresholds must be positive");

    const double margin_s = cfg.search_margin / kImuRateHz;
    // Exceedances closer than this belong to the same physical bump.
    const double cluster_gap_s = 5.0 / kImuRateHz;
    std::vector<StrokeInterval> out;
    out.reserve(rough.size());
    std::vector<double> hits;
    for (const StrokeInterval& r : rough) {
        const double lo = r.begin_s - margin_s;
        const double hi = r.end_s + margin_s;
        hits.clear();
        auto scan = [&](const ImuStream& s, double thr) {
            auto it = std::lower_bound(s.begin(), s.end(), lo,
                                       [](const Sample3& a, double t) { return a.t < t; });
            for (; it != s.end() && it->t <= hi; ++it)
                if (magnitude(it->v) > thr) hits.push_back(it->t);
        };
        scan(accel, cfg.accel_threshold);
        scan(gyro, cfg.gyro_threshold);
        std::sort(hits.begin(), hits.end());

        StrokeInterval ri = r;
        if (!hits.empty()) {
            bool one_bump = hits.back() - hits.front() <= cluster_gap_s;
            if (one_bump) {
                // A single bump refines whichever boundary it sits closer to.
                double mid = 0.5 * (hits.front() + hits.back());
                if (std::abs(mid - r.begin_s) <= std::abs(mid - r.end_s))
                    ri.begin_s = hits.front();
                else
                    ri.end_s = hits.back();
                if (!(ri.begin_s < ri.end_s)) ri = r;
            } else {
                ri = {hits.front(), hits.back()};
            }
        }
        // Margin growth must not run intervals into each other.
        if (!out.empty() && ri.begin_s < out.back().end_s)
            ri.begin_s = out.back().end_s;
        if (ri.begin_s < ri.end_s) out.push_back(ri);
    }
    return out;
}

ImuPeakConfig robust_peak_config(const ImuStream& accel, const ImuStream& gyro,
                                 double t0, double t1, double k) {
    ImuPeakConfig cfg;
    cfg.accel_threshold = robust_threshold(accel, t0, t1, k);
    cfg.gyro_threshold = robust_threshold(gyro, t0, t1, k);
    return cfg;
}

} // namespace pentrack
