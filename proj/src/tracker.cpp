// SPDX-License-Identifier: Apache-2.0

#include "pentrack/tracker.hpp"

#include "pentrack/simd/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace pentrack {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::uint64_t bin_key(const StateVec& s, const KldParams& p) {
    // FNV-1a over the six bin indices; used only to count occupied bins.
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](long long v) {
        for (int b = 0; b < 8; ++b) {
            h ^= static_cast<std::uint64_t>(v >> (8 * b)) & 0xff;
            h *= 1099511628211ull;
        }
    };
    mix(static_cast<long long>(std::floor(s[0] / p.pos_bin_mm)));
    mix(static_cast<long long>(std::floor(s[1] / p.pos_bin_mm)));
    for (int c = 2; c < 6; ++c)
        mix(static_cast<long long>(std::floor(s[c] / p.quat_bin)));
    return h;
}

std::size_t argmax_weight(const ParticleSet& ps) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < ps.size(); ++i)
        if (ps.weight[i] > ps.weight[best]) best = i;
    return best;
}

} // namespace

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0))
        throw std::invalid_argument("normal_quantile: p must lie inside (0, 1)");
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00, 2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (p < plow) {
        double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        double q = p - 0.5, r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    // One Halley refinement against the exact CDF.
    double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
    double u = e * std::sqrt(2.0 * kPi) * std::exp(x * x / 2.0);
    return x - u / (1.0 + x * u / 2.0);
}

std::size_t kld_sample_size(std::size_t k, const KldParams& p, std::size_t n_max) {
    if (k <= 1) return std::min(p.n_min, n_max);
    double km1 = static_cast<double>(k - 1);
    double z = normal_quantile(1.0 - p.delta);
    double t = 1.0 - 2.0 / (9.0 * km1) + std::sqrt(2.0 / (9.0 * km1)) * z;
    double n = km1 / (2.0 * p.epsilon) * t * t * t;
    auto target = static_cast<std::size_t>(std::ceil(n));
    target = std::max(target, p.n_min);
    return std::min(target, n_max);
}

ParticleSet init_particles(const VoxelField& map, const ScreenConfig& screen,
                           Vec3 m_meas, const TrackerConfig& cfg,
                           std::mt19937_64& rng) {
    std::uniform_real_distribution<double> ux(0.0, screen.width_mm);
    std::uniform_real_distribution<double> uy(0.0, screen.height_mm);
    std::uniform_real_distribution<double> ualt(kAltitudeMinDeg, kAltitudeMaxDeg);
    std::uniform_real_distribution<double> uaz(kAzimuthMinDeg, kAzimuthMaxDeg);
    std::uniform_real_distribution<double> uroll(0.0, 360.0);

    struct Cand {
        double res2;
        double x, y;
        Quaternion q;
    };
    std::vector<Cand> cands;
    cands.reserve(cfg.n_init / 4);
    for (std::size_t i = 0; i < cfg.n_init; ++i) {
        Cand c;
        c.x = ux(rng);
        c.y = uy(rng);
        c.q = angles_to_quat({ualt(rng), uaz(rng), uroll(rng)});
        RotationAxes axes = quat_to_axes(c.q);
        auto b = query_pencil_map(map, to_pencil_frame(screen.mag_location,
                                                       {c.x, c.y, 0.0}, axes));
        if (!b) continue;
        Vec3 r = field_to_pencil_frame(m_meas, axes) - *b;
        c.res2 = dot(r, r);
        cands.push_back(c);
    }
    if (cands.empty())
        throw DegenerateWeights("init_particles: no draw hits the map");

    // Rank by residual rather than by weight: far residuals all round to
    // weight 0 and would tie.
    std::size_t keep = std::min(cfg.n_max, cands.size());
    std::partial_sort(cands.begin(), cands.begin() + keep, cands.end(),
                      [](const Cand& a, const Cand& b) { return a.res2 < b.res2; });
    cands.resize(keep);

    ParticleSet ps;
    ps.x.resize(keep);
    ps.y.resize(keep);
    ps.qw.resize(keep);
    ps.qx.resize(keep);
    ps.qy.resize(keep);
    ps.qz.resize(keep);
    ps.weight.assign(keep, 1.0 / static_cast<double>(keep));
    ps.history.resize(keep);
    for (std::size_t i = 0; i < keep; ++i) {
        ps.x[i] = cands[i].x;
        ps.y[i] = cands[i].y;
        ps.qw[i] = cands[i].q.w;
        ps.qx[i] = cands[i].q.x;
        ps.qy[i] = cands[i].q.y;
        ps.qz[i] = cands[i].q.z;
        ps.history[i] = {ps.state(i)};
    }
    return ps;
}

void transition(ParticleSet& ps, const ScreenConfig& screen,
                const std::optional<BehaviorModel>& behavior,
                const TrackerConfig& cfg, std::mt19937_64& rng) {
    std::normal_distribution<double> gp(0.0, cfg.pos_noise_mm);
    std::normal_distribution<double> gq(0.0, cfg.quat_noise);
    for (std::size_t i = 0; i < ps.size(); ++i) {
        std::vector<StateVec>& hist = ps.history[i];
        StateVec deltas[3];
        std::size_t nd = std::min<std::size_t>(3, hist.size() - 1);
        for (std::size_t j = 0; j < nd; ++j) {
            const StateVec& a = hist[hist.size() - 1 - nd + j];
            const StateVec& b = hist[hist.size() - nd + j];
            for (int c = 0; c < 6; ++c) deltas[j][c] = b[c] - a[c];
        }
        StateVec v{};
        if (behavior)
            v = behavior->predict(deltas, nd);
        else if (nd > 0)
            v = deltas[nd - 1]; // constant-velocity prior

        const StateVec cur = ps.state(i);
        double nx = 0.0, ny = 0.0;
        Quaternion nq;
        bool ok = false;
        for (int attempt = 0; attempt < cfg.max_redraws && !ok; ++attempt) {
            nx = cur[0] + v[0] + gp(rng);
            ny = cur[1] + v[1] + gp(rng);
            Quaternion q{cur[2] + v[2] + gq(rng), cur[3] + v[3] + gq(rng),
                         cur[4] + v[4] + gq(rng), cur[5] + v[5] + gq(rng)};
            double n = q.norm();
            if (n < 1e-6) continue;
            nq = {q.w / n, q.x / n, q.y / n, q.z / n};
            ok = screen.contains(nx, ny) && pose_in_range(nq);
        }
        if (!ok) {
            // Deterministic fallback: clamp the noise-free proposal.
            nx = std::clamp(cur[0] + v[0], 0.0, screen.width_mm);
            ny = std::clamp(cur[1] + v[1], 0.0, screen.height_mm);
            Quaternion q{cur[2] + v[2], cur[3] + v[3], cur[4] + v[4], cur[5] + v[5]};
            double n = q.norm();
            if (n < 1e-6) q = {cur[2], cur[3], cur[4], cur[5]};
            AttitudeAngles ang = quat_to_angles(q.normalized());
            ang.altitude_deg = std::clamp(ang.altitude_deg, kAltitudeMinDeg, kAltitudeMaxDeg);
            ang.azimuth_deg = std::clamp(ang.azimuth_deg, kAzimuthMinDeg, kAzimuthMaxDeg);
            nq = angles_to_quat(ang);
        }
        // Keep the component track on one hemisphere so deltas stay small.
        if (nq.w * cur[2] + nq.x * cur[3] + nq.y * cur[4] + nq.z * cur[5] < 0.0)
            nq = {-nq.w, -nq.x, -nq.y, -nq.z};
        ps.x[i] = nx;
        ps.y[i] = ny;
        ps.qw[i] = nq.w;
        ps.qx[i] = nq.x;
        ps.qy[i] = nq.y;
        ps.qz[i] = nq.z;
        hist.push_back(ps.state(i));
    }
}

void compute_weights(ParticleSet& ps, const VoxelField& map,
                     const ScreenConfig& screen, Vec3 m_meas, double sigma) {
    ps.weight.resize(ps.size());
    simd::weights_6d(ps.x.data(), ps.y.data(), ps.qw.data(), ps.qx.data(),
                     ps.qy.data(), ps.qz.data(), ps.size(), map,
                     screen.mag_location, m_meas, sigma, ps.weight.data());
    double sum = 0.0;
    for (double w : ps.weight) sum += w;
    if (!(sum > 0.0))
        throw DegenerateWeights("compute_weights: every particle weight is zero");
}

void resample(ParticleSet& ps, const TrackerConfig& cfg, std::mt19937_64& rng) {
    const std::size_t n = ps.size();
    if (n == 0) throw std::invalid_argument("resample: empty particle set");
    std::vector<double> cdf(n);
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sum += ps.weight[i];
        cdf[i] = sum;
    }
    if (!(sum > 0.0)) throw DegenerateWeights("resample: zero total weight");

    // Draw in batches, growing the target as new bins fill, then cut back
    // to the final target. A single occupied bin ends at exactly n_min.
    std::uniform_real_distribution<double> u(0.0, sum);
    std::unordered_set<std::uint64_t> bins;
    std::vector<std::size_t> picks;
    std::size_t target = std::min(cfg.kld.n_min, cfg.n_max);
    while (picks.size() < target && picks.size() < cfg.n_max) {
        std::size_t batch = std::min(cfg.resample_batch, cfg.n_max - picks.size());
        for (std::size_t b = 0; b < batch; ++b) {
            double r = u(rng);
            std::size_t j = static_cast<std::size_t>(
                std::lower_bound(cdf.begin(), cdf.end(), r) - cdf.begin());
            if (j >= n) j = n - 1;
            picks.push_back(j);
            bins.insert(bin_key(ps.state(j), cfg.kld));
        }
        target = kld_sample_size(bins.size(), cfg.kld, cfg.n_max);
    }
    if (picks.size() > target) picks.resize(target);

    const std::size_t m = picks.size();
    ParticleSet out;
    out.x.resize(m);
    out.y.resize(m);
    out.qw.resize(m);
    out.qx.resize(m);
    out.qy.resize(m);
    out.qz.resize(m);
    out.weight.assign(m, 1.0 / static_cast<double>(m));
    out.history.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        std::size_t j = picks[i];
        out.x[i] = ps.x[j];
        out.y[i] = ps.y[j];
        out.qw[i] = ps.qw[j];
        out.qx[i] = ps.qx[j];
        out.qy[i] = ps.qy[j];
        out.qz[i] = ps.qz[j];
        out.history[i] = ps.history[j];
    }
    ps = std::move(out);
}

TrackResult track_stroke(const VoxelField& map, const ScreenConfig& screen,
                         const MagLog& mag, const StrokeInterval& stroke,
                         Vec3 ambient, const std::optional<BehaviorModel>& behavior,
                         const TrackerConfig& cfg, std::uint64_t seed) {
    std::vector<Sample3> rows;
    for (const Sample3& s : mag)
        if (s.t >= stroke.begin_s && s.t <= stroke.end_s) rows.push_back(s);
    if (rows.size() < 2)
        throw std::invalid_argument("track_stroke: stroke carries fewer than 2 samples");

    std::mt19937_64 rng(seed);
    TrackResult res;
    std::vector<StateVec> committed;
    std::vector<double> committed_t;
    std::size_t seg_begin = 0;

    ParticleSet ps = init_particles(map, screen, rows[0].v - ambient, cfg, rng);
    std::vector<StateVec> best_hist = ps.history[0]; // best-ranked draw

    auto commit = [&](std::size_t upto) {
        // best_hist covers rows[seg_begin .. upto].
        for (std::size_t i = 0; i < best_hist.size(); ++i) {
            committed.push_back(best_hist[i]);
            committed_t.push_back(rows[seg_begin + i].t);
        }
        (void)upto;
    };

    for (std::size_t t = 1; t < rows.size(); ++t) {
        transition(ps, screen, behavior, cfg, rng);
        bool collapsed = false;
        try {
            compute_weights(ps, map, screen, rows[t].v - ambient, cfg.sigma_uT);
        } catch (const DegenerateWeights&) {
            collapsed = true;
        }
        if (collapsed) {
            // Keep what the filter agreed on so far and re-seed from the
            // current reading; a failed re-seed propagates.
            commit(t - 1);
            ps = init_particles(map, screen, rows[t].v - ambient, cfg, rng);
            best_hist = ps.history[0];
            seg_begin = t;
            ++res.restarts;
            continue;
        }
        best_hist = ps.history[argmax_weight(ps)];
        if (t + 1 < rows.size()) resample(ps, cfg, rng);
    }
    commit(rows.size() - 1);

    res.states = std::move(committed);
    res.trace.reserve(res.states.size());
    for (std::size_t i = 0; i < res.states.size(); ++i)
        res.trace.push_back({committed_t[i], res.states[i][0], res.states[i][1]});
    res.n_final = ps.size();
    return res;
}

TrackResult track_stroke_2d(const ScreenMap2D& map, const ScreenConfig& screen,
                            const MagLog& mag, const StrokeInterval& stroke,
                            Vec3 ambient, const TrackerConfig& cfg,
                            std::uint64_t seed) {
    std::vector<Sample3> rows;
    for (const Sample3& s : mag)
        if (s.t >= stroke.begin_s && s.t <= stroke.end_s) rows.push_back(s);
    if (rows.size() < 2)
        throw std::invalid_argument("track_stroke_2d: stroke carries fewer than 2 samples");

    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ux(0.0, screen.width_mm);
    std::uniform_real_distribution<double> uy(0.0, screen.height_mm);
    std::normal_distribution<double> gp(0.0, cfg.pos_noise_mm);

    // Residual-ranked uniform seeding, as in the 6-dof filter.
    auto seed_cloud = [&](Vec3 m, std::vector<double>& x, std::vector<double>& y) {
        struct Cand {
            double res2, x, y;
        };
        std::vector<Cand> cands;
        for (std::size_t i = 0; i < cfg.n_init; ++i) {
            double cx = ux(rng), cy = uy(rng);
            auto b = query_2d(map, cx, cy);
            if (!b) continue;
            Vec3 r = m - *b;
            cands.push_back({dot(r, r), cx, cy});
        }
        if (cands.empty())
            throw DegenerateWeights("track_stroke_2d: no draw hits the map");
        std::size_t keep = std::min(cfg.n_max, cands.size());
        std::partial_sort(cands.begin(), cands.begin() + keep, cands.end(),
                          [](const Cand& a, const Cand& b) { return a.res2 < b.res2; });
        x.resize(keep);
        y.resize(keep);
        for (std::size_t i = 0; i < keep; ++i) {
            x[i] = cands[i].x;
            y[i] = cands[i].y;
        }
    };

    std::vector<double> x, y;
    seed_cloud(rows[0].v - ambient, x, y);
    std::vector<double> px = x, py = y; // previous positions for the velocity prior
    std::vector<double> w(x.size());

    TrackResult res;
    for (std::size_t t = 0; t < rows.size(); ++t) {
        Vec3 m = rows[t].v - ambient;
        if (t > 0) {
            // Constant-velocity proposal with redraw-then-clamp bounds.
            for (std::size_t i = 0; i < x.size(); ++i) {
                double vx = x[i] - px[i], vy = y[i] - py[i];
                px[i] = x[i];
                py[i] = y[i];
                double nx = 0.0, ny = 0.0;
                bool ok = false;
                for (int a = 0; a < cfg.max_redraws && !ok; ++a) {
                    nx = x[i] + vx + gp(rng);
                    ny = y[i] + vy + gp(rng);
                    ok = screen.contains(nx, ny);
                }
                if (!ok) {
                    nx = std::clamp(x[i] + vx, 0.0, screen.width_mm);
                    ny = std::clamp(y[i] + vy, 0.0, screen.height_mm);
                }
                x[i] = nx;
                y[i] = ny;
            }
        }
        w.resize(x.size());
        simd::weights_2d(x.data(), y.data(), x.size(), map, m, cfg.sigma_uT, w.data());
        double sum = 0.0;
        for (double wi : w) sum += wi;
        if (!(sum > 0.0)) {
            seed_cloud(m, x, y);
            px = x;
            py = y;
            w.assign(x.size(), 1.0);
            sum = static_cast<double>(x.size());
            ++res.restarts;
        }
        double ex = 0.0, ey = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            ex += w[i] * x[i];
            ey += w[i] * y[i];
        }
        ex /= sum;
        ey /= sum;
        res.trace.push_back({rows[t].t, ex, ey});
        res.states.push_back({ex, ey, 1.0, 0.0, 0.0, 0.0});

        if (t + 1 == rows.size()) break;
        // Systematic resampling keeps the cloud size fixed.
        std::size_t n = x.size();
        std::vector<double> cdf(n);
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            acc += w[i];
            cdf[i] = acc;
        }
        std::uniform_real_distribution<double> u0(0.0, sum / static_cast<double>(n));
        double step = sum / static_cast<double>(n);
        double pos = u0(rng);
        std::vector<double> nx(n), ny(n), npx(n), npy(n);
        std::size_t j = 0;
        for (std::size_t i = 0; i < n; ++i) {
            while (j + 1 < n && cdf[j] < pos) ++j;
            nx[i] = x[j];
            ny[i] = y[j];
            npx[i] = px[j];
            npy[i] = py[j];
            pos += step;
        }
        x = std::move(nx);
        y = std::move(ny);
        px = std::move(npx);
        py = std::move(npy);
    }
    res.n_final = x.size();
    return res;
}

} // namespace pentrack
