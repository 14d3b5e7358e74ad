// SPDX-License-Identifier: Apache-2.0

#include "pentrack/eval.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

namespace pentrack {
namespace {

std::complex<double> interp_at(const Trace& tr, double t) {
    auto it = std::lower_bound(tr.begin(), tr.end(), t,
                               [](const TracePoint& p, double x) { return p.t < x; });
    if (it == tr.begin()) return {it->x, it->y};
    if (it == tr.end()) return {tr.back().x, tr.back().y};
    const TracePoint& b = *it;
    const TracePoint& a = *(it - 1);
    double span = b.t - a.t;
    double u = span > 0.0 ? (t - a.t) / span : 0.0;
    return {a.x + u * (b.x - a.x), a.y + u * (b.y - a.y)};
}

} // namespace

EvalMetrics run_eval(const Trace& trace, const Trace& truth) {
    if (trace.size() < 2 || truth.size() < 2)
        throw std::invalid_argument("run_eval: both traces need at least 2 points");
    const double t0 = std::max(trace.front().t, truth.front().t);
    const double t1 = std::min(trace.back().t, truth.back().t);
    if (!(t1 > t0))
        throw std::invalid_argument("run_eval: traces do not overlap in time");

    const std::size_t n =
        std::max<std::size_t>(2, static_cast<std::size_t>(std::floor((t1 - t0) * kMagRateHz)) + 1);
    const double dt = (t1 - t0) / (n - 1);

    std::vector<std::complex<double>> a(n), b(n); // truth, trace
    for (std::size_t i = 0; i < n; ++i) {
        double t = t0 + i * dt;
        a[i] = interp_at(truth, t);
        b[i] = interp_at(trace, t);
    }

    std::complex<double> am{0.0, 0.0}, bm{0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
        am += a[i];
        bm += b[i];
    }
    am /= static_cast<double>(n);
    bm /= static_cast<double>(n);

    double raw = 0.0;
    std::complex<double> cross{0.0, 0.0};
    double denom = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        raw += std::norm(a[i] - b[i]);
        cross += (a[i] - am) * std::conj(b[i] - bm);
        denom += std::norm(b[i] - bm);
    }

    // a ~= c*b + t in the least-squares sense; a degenerate (constant) trace
    // gets translation-only alignment.
    std::complex<double> c = denom > 0.0 ? cross / denom : std::complex<double>{1.0, 0.0};
    std::complex<double> shift = am - c * bm;

    double aligned = 0.0;
    for (std::size_t i = 0; i < n; ++i) aligned += std::norm(a[i] - (c * b[i] + shift));

    EvalMetrics m;
    m.raw_rmse_mm = std::sqrt(raw / n);
    m.aligned_rmse_mm = std::sqrt(aligned / n);
    m.scale = std::abs(c);
    m.rotation_deg = std::arg(c) * 180.0 / 3.14159265358979323846;
    m.tx_mm = shift.real();
    m.ty_mm = shift.imag();
    m.samples = n;
    return m;
}

} // namespace pentrack
