// SPDX-License-Identifier: Apache-2.0

#include "pentrack/tracker.hpp"

#include <cmath>

namespace pentrack {

namespace {

constexpr int kDim = 19; // intercept plus three 6-component deltas

// In-place Cholesky solve of the normal equations for six right-hand
// sides. Returns false when a pivot collapses.
bool cholesky_solve(std::array<std::array<double, kDim>, kDim> a,
                    std::array<std::array<double, 6>, kDim>& b) {
    for (int j = 0; j < kDim; ++j) {
        double d = a[j][j];
        for (int k = 0; k < j; ++k) d -= a[j][k] * a[j][k];
        if (d <= 0.0) return false;
        a[j][j] = std::sqrt(d);
        for (int i = j + 1; i < kDim; ++i) {
            double s = a[i][j];
            for (int k = 0; k < j; ++k) s -= a[i][k] * a[j][k];
            a[i][j] = s / a[j][j];
        }
    }
    for (int c = 0; c < 6; ++c) {
        for (int i = 0; i < kDim; ++i) {
            double s = b[i][c];
            for (int k = 0; k < i; ++k) s -= a[i][k] * b[k][c];
            b[i][c] = s / a[i][i];
        }
        for (int i = kDim - 1; i >= 0; --i) {
            double s = b[i][c];
            for (int k = i + 1; k < kDim; ++k) s -= a[k][i] * b[k][c];
            b[i][c] = s / a[i][i];
        }
    }
    return true;
}

// Feature vector for the step after index t of a track: the deltas ending
// at t, oldest first, zero-padded at the front.
std::array<double, kDim> features_at(const std::vector<StateVec>& track,
                                     std::size_t t) {
    std::array<double, kDim> f{};
    f[0] = 1.0;
    std::size_t nd = std::min<std::size_t>(3, t);
    for (std::size_t j = 0; j < nd; ++j) {
        std::size_t hi = t - nd + j + 1;
        std::size_t base = 1 + (3 - nd + j) * 6;
        for (int c = 0; c < 6; ++c)
            f[base + c] = track[hi][c] - track[hi - 1][c];
    }
    return f;
}

} // namespace

StateVec BehaviorModel::predict(const StateVec* deltas, std::size_t n) const {
    std::array<double, 18> f{};
    std::size_t use = n < 3 ? n : 3;
    for (std::size_t j = 0; j < use; ++j) {
        const StateVec& d = deltas[n - use + j];
        std::size_t base = (3 - use + j) * 6;
        for (int c = 0; c < 6; ++c) f[base + c] = d[c];
    }
    StateVec out{};
    for (int o = 0; o < 6; ++o) {
        double s = coef[o][0];
        for (int i = 0; i < 18; ++i) s += coef[o][i + 1] * f[i];
        out[o] = s;
    }
    return out;
}

BehaviorModel fit_behavior_model(const std::vector<std::vector<StateVec>>& tracks) {
    std::array<std::array<double, kDim>, kDim> xtx{};
    std::array<std::array<double, 6>, kDim> xty{};
    std::size_t windows = 0;
    for (const std::vector<StateVec>& track : tracks) {
        if (track.size() < 2) continue;
        for (std::size_t t = 0; t + 1 < track.size(); ++t) {
            std::array<double, kDim> f = features_at(track, t);
            StateVec target;
            for (int c = 0; c < 6; ++c) target[c] = track[t + 1][c] - track[t][c];
            for (int i = 0; i < kDim; ++i) {
                for (int j = i; j < kDim; ++j) xtx[i][j] += f[i] * f[j];
                for (int c = 0; c < 6; ++c) xty[i][c] += f[i] * target[c];
            }
            ++windows;
        }
    }
    if (windows < 100)
        throw std::invalid_argument("fit_behavior_model: fewer than 100 windows");
    for (int i = 0; i < kDim; ++i)
        for (int j = 0; j < i; ++j) xtx[i][j] = xtx[j][i];

    BehaviorModel model;
    std::array<std::array<double, 6>, kDim> beta = xty;
    if (!cholesky_solve(xtx, beta)) {
        // Collinear features (e.g. constant-velocity training data): damp.
        model.ridge_fallback = true;
        for (int i = 0; i < kDim; ++i) xtx[i][i] += 1e-6;
        beta = xty;
        if (!cholesky_solve(xtx, beta))
            throw std::runtime_error("fit_behavior_model: normal equations unsolvable");
    }
    for (int o = 0; o < 6; ++o)
        for (int i = 0; i < kDim; ++i) model.coef[o][i] = beta[i][o];
    return model;
}

std::vector<std::vector<StateVec>> tracks_from_poses(const PoseLog& poses,
                                                     double gap_s) {
    std::vector<std::vector<StateVec>> tracks;
    std::vector<StateVec> cur;
    Quaternion prev;
    for (std::size_t i = 0; i < poses.size(); ++i) {
        if (i > 0 && poses[i].t - poses[i - 1].t > gap_s) {
            if (cur.size() >= 2) tracks.push_back(cur);
            cur.clear();
        }
        Quaternion q = poses[i].pose.orientation;
        if (!cur.empty() &&
            q.w * prev.w + q.x * prev.x + q.y * prev.y + q.z * prev.z < 0.0)
            q = {-q.w, -q.x, -q.y, -q.z};
        cur.push_back({poses[i].pose.tip.x, poses[i].pose.tip.y, q.w, q.x, q.y, q.z});
        prev = q;
    }
    if (cur.size() >= 2) tracks.push_back(cur);
    return tracks;
}

} // namespace pentrack
