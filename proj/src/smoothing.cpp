// SPDX-License-Identifier: Apache-2.0

#include "pentrack/smoothing.hpp"

#include <stdexcept>

namespace pentrack {

std::vector<double> kalman_smooth_series(const std::vector<double>& obs,
                                         const KalmanParams& params) {
    if (params.process_var <= 0.0 || params.obs_var <= 0.0)
        throw std::invalid_argument("kalman_smooth_series: variances must be positive");
    size_t n = obs.size();
    if (n <= 1) return obs;

    // Forward pass. The first observation initializes the state directly.
    std::vector<double> xf(n), pf(n), xpred(n), ppred(n);
    xf[0] = obs[0];
    pf[0] = params.obs_var;
    for (size_t t = 1; t < n; ++t) {
        xpred[t] = xf[t - 1];
        ppred[t] = pf[t - 1] + params.process_var;
        double k = ppred[t] / (ppred[t] + params.obs_var);
        xf[t] = xpred[t] + k * (obs[t] - xpred[t]);
        pf[t] = (1.0 - k) * ppred[t];
    }

    std::vector<double> xs(n);
    xs[n - 1] = xf[n - 1];
    for (size_t t = n - 1; t-- > 0;) {
        double c = pf[t] / ppred[t + 1];
        xs[t] = xf[t] + c * (xs[t + 1] - xpred[t + 1]);
    }
    return xs;
}

std::vector<Quaternion> kalman_smooth_quats(const std::vector<Quaternion>& track,
                                            const KalmanParams& params) {
    size_t n = track.size();
    if (n == 0) return {};

    std::vector<Quaternion> aligned = track;
    for (size_t i = 1; i < n; ++i) {
        const Quaternion& p = aligned[i - 1];
        Quaternion& q = aligned[i];
        if (p.w * q.w + p.x * q.x + p.y * q.y + p.z * q.z < 0.0)
            q = {-q.w, -q.x, -q.y, -q.z};
    }

    std::vector<double> w(n), x(n), y(n), z(n);
    for (size_t i = 0; i < n; ++i) {
        w[i] = aligned[i].w;
        x[i] = aligned[i].x;
        y[i] = aligned[i].y;
        z[i] = aligned[i].z;
    }
    w = kalman_smooth_series(w, params);
    x = kalman_smooth_series(x, params);
    y = kalman_smooth_series(y, params);
    z = kalman_smooth_series(z, params);

    std::vector<Quaternion> out(n);
    for (size_t i = 0; i < n; ++i)
        out[i] = Quaternion{w[i], x[i], y[i], z[i]}.normalized();
    return out;
}

} // namespace pentrack
