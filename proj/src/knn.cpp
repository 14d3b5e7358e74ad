// SPDX-License-Identifier: Apache-2.0

#include "pentrack/knn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace pentrack {

namespace {

constexpr double kPoseTolS = 1.5 / 50.0;

double dist2(const std::array<double, 9>& a, const std::array<double, 9>& b) {
    double s = 0.0;
    for (int i = 0; i < 9; ++i) {
        double d = a[i] - b[i];
        s += d * d;
    }
    return s;
}

std::array<double, 9> window_at(const MagLog& mag, std::size_t i) {
    return {mag[i - 2].v.x, mag[i - 2].v.y, mag[i - 2].v.z,
            mag[i - 1].v.x, mag[i - 1].v.y, mag[i - 1].v.z,
            mag[i].v.x,     mag[i].v.y,     mag[i].v.z};
}

Vec2 predict(const std::vector<std::array<double, 9>>& feats,
             const std::vector<Vec2>& targets,
             const std::array<double, 9>& query, int k) {
    // Partial selection of the k smallest distances.
    std::vector<std::pair<double, std::size_t>> d(feats.size());
    for (std::size_t i = 0; i < feats.size(); ++i) d[i] = {dist2(feats[i], query), i};
    std::size_t kk = std::min<std::size_t>(static_cast<std::size_t>(k), d.size());
    std::partial_sort(d.begin(), d.begin() + kk, d.end());
    Vec2 out{0.0, 0.0};
    for (std::size_t i = 0; i < kk; ++i) {
        out.x += targets[d[i].second].x;
        out.y += targets[d[i].second].y;
    }
    out.x /= static_cast<double>(kk);
    out.y /= static_cast<double>(kk);
    return out;
}

} // namespace

KnnModel knn_fit(const MagLog& mag, const PoseLog& poses,
                 std::optional<int> fixed_k) {
    KnnModel model;
    std::size_t pi = 0;
    for (std::size_t i = 2; i < mag.size(); ++i) {
        double t = mag[i].t;
        while (pi + 1 < poses.size() &&
               std::abs(poses[pi + 1].t - t) <= std::abs(poses[pi].t - t))
            ++pi;
        if (poses.empty() || std::abs(poses[pi].t - t) > kPoseTolS) continue;
        model.features.push_back(window_at(mag, i));
        model.targets.push_back(poses[pi].pose.tip);
    }
    if (model.features.size() < 50)
        throw std::invalid_argument("knn_fit: fewer than 50 training windows");

    if (fixed_k) {
        if (*fixed_k < 1) throw std::invalid_argument("knn_fit: k must be positive");
        model.k = *fixed_k;
        return model;
    }

    // Deterministic 80/20 split: every fifth window validates.
    std::vector<std::array<double, 9>> train_f, val_f;
    std::vector<Vec2> train_t, val_t;
    for (std::size_t i = 0; i < model.features.size(); ++i) {
        if (i % 5 == 4) {
            val_f.push_back(model.features[i]);
            val_t.push_back(model.targets[i]);
        } else {
            train_f.push_back(model.features[i]);
            train_t.push_back(model.targets[i]);
        }
    }
    double best_err = std::numeric_limits<double>::infinity();
    for (int k = 1; k <= 5; ++k) {
        double err = 0.0;
        for (std::size_t i = 0; i < val_f.size(); ++i) {
            Vec2 p = predict(train_f, train_t, val_f[i], k);
            double dx = p.x - val_t[i].x, dy = p.y - val_t[i].y;
            err += dx * dx + dy * dy;
        }
        if (err < best_err) {
            best_err = err;
            model.k = k;
        }
    }
    return model;
}

Trace knn_track(const KnnModel& model, const MagLog& mag) {
    Trace out;
    for (std::size_t i = 2; i < mag.size(); ++i) {
        Vec2 p = predict(model.features, model.targets, window_at(mag, i), model.k);
        out.push_back({mag[i].t, p.x, p.y});
    }
    return out;
}

} // namespace pentrack
