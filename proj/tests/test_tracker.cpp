// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pentrack/fieldmodel.hpp"
#include "pentrack/knn.hpp"
#include "pentrack/tracker.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace pentrack;

namespace {

// Noise-free war-drive rows on the magnetometer timeline.
WarDriveLog clean_wardrive(double duration_s, std::uint64_t seed,
                           const ScreenConfig& screen, const DipoleSet& pencil) {
    TrajectoryScript script = script_wardrive(duration_s, seed, screen);
    WarDriveLog log;
    for (double t = 0.0; t <= duration_s; t += 1.0 / kMagRateHz) {
        auto pose = script_pose_at(script, t);
        if (!pose) continue;
        WarDriveRow row;
        row.t = t;
        row.tip = {pose->tip.x, pose->tip.y, 0.0};
        row.axes = quat_to_axes(pose->orientation);
        row.m = pencil_field_at_mag(pencil, screen, pose->tip, row.axes);
        log.push_back(row);
    }
    return log;
}

PoseLog wardrive_poses(double duration_s, std::uint64_t seed,
                       const ScreenConfig& screen) {
    TrajectoryScript script = script_wardrive(duration_s, seed, screen);
    PoseLog poses;
    for (double t = 0.0; t <= duration_s; t += 1.0 / kMagRateHz) {
        auto pose = script_pose_at(script, t);
        if (pose) poses.push_back({t, *pose});
    }
    return poses;
}

TrackerConfig smoke_config() {
    TrackerConfig cfg;
    cfg.n_init = 40000;
    cfg.n_max = 4000;
    cfg.kld.n_min = 400;
    cfg.sigma_uT = 1.0;
    return cfg;
}

double raw_rmse_vs_script(const Trace& trace, const TrajectoryScript& script,
                          double lead_s) {
    double acc = 0.0;
    int n = 0;
    for (const TracePoint& p : trace) {
        auto pose = script_pose_at(script, p.t - lead_s);
        if (!pose) continue;
        double dx = p.x - pose->tip.x, dy = p.y - pose->tip.y;
        acc += dx * dx + dy * dy;
        ++n;
    }
    REQUIRE(n > 0);
    return std::sqrt(acc / n);
}

} // namespace

TEST_CASE("normal quantile matches reference values") {
    CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(normal_quantile(0.99) == doctest::Approx(2.3263478740408408).epsilon(1e-9));
    CHECK(normal_quantile(0.975) == doctest::Approx(1.9599639845400545).epsilon(1e-9));
    CHECK(normal_quantile(0.001) == doctest::Approx(-3.0902323061678132).epsilon(1e-9));
    for (double p : {0.01, 0.2, 0.77, 0.999})
        CHECK(normal_quantile(p) == doctest::Approx(-normal_quantile(1.0 - p)).epsilon(1e-9));
    CHECK_THROWS_AS((void)normal_quantile(0.0), std::invalid_argument);
    CHECK_THROWS_AS((void)normal_quantile(1.0), std::invalid_argument);
}

TEST_CASE("kld sample size: reference point, monotonicity and clamps") {
    KldParams p; // epsilon 0.05, delta 0.01, n_min 500
    p.n_min = 1;
    CHECK(kld_sample_size(10, p, 1000000) == 217);

    std::size_t prev = 0;
    for (std::size_t k = 2; k < 400; ++k) {
        std::size_t n = kld_sample_size(k, p, 1000000);
        CHECK(n >= prev);
        prev = n;
    }

    p.n_min = 500;
    CHECK(kld_sample_size(0, p, 20000) == 500);
    CHECK(kld_sample_size(1, p, 20000) == 500);
    CHECK(kld_sample_size(10, p, 20000) == 500);  // formula under n_min
    CHECK(kld_sample_size(5000, p, 20000) == 20000); // clamped to n_max
}

TEST_CASE("behavior model: noiseless dynamics are reproduced") {
    // One long track generated by a fixed affine delta map, zero padding
    // included, so every least-squares row is consistent with the model.
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> uw(-0.12, 0.12);
    std::array<std::array<double, 19>, 6> gen{};
    for (int o = 0; o < 6; ++o) {
        gen[o][0] = 0.02 * uw(rng);
        for (int i = 1; i < 19; ++i) gen[o][i] = uw(rng);
    }
    BehaviorModel truth;
    truth.coef = gen;

    std::vector<StateVec> track;
    track.push_back({50.0, 80.0, 1.0, 0.0, 0.0, 0.0});
    std::vector<StateVec> deltas;
    for (int t = 0; t < 130; ++t) {
        StateVec d = truth.predict(deltas.empty() ? nullptr : deltas.data(),
                                   deltas.size());
        StateVec next;
        for (int c = 0; c < 6; ++c) next[c] = track.back()[c] + d[c];
        track.push_back(next);
        deltas.push_back(d);
    }

    BehaviorModel fit = fit_behavior_model({track});
    // The fit must reproduce the generator on the trajectory's own future.
    std::vector<StateVec> d2 = deltas;
    for (int t = 0; t < 20; ++t) {
        StateVec want = truth.predict(d2.data(), d2.size());
        StateVec got = fit.predict(d2.data(), d2.size());
        for (int c = 0; c < 6; ++c) CHECK(std::abs(got[c] - want[c]) < 1e-4);
        d2.push_back(want);
    }

    // Zero-history prediction equals the learned intercept behaviour.
    StateVec cold_truth = truth.predict(nullptr, 0);
    StateVec cold_fit = fit.predict(nullptr, 0);
    for (int c = 0; c < 6; ++c) CHECK(std::abs(cold_fit[c] - cold_truth[c]) < 1e-4);
}

TEST_CASE("behavior model: degenerate data trips the ridge fallback") {
    // All deltas identical: features are collinear.
    std::vector<StateVec> track;
    for (int t = 0; t < 300; ++t)
        track.push_back({10.0 + 0.5 * t, 20.0 + 0.25 * t, 1.0, 0.0, 0.0, 0.0});
    BehaviorModel m = fit_behavior_model({track});
    CHECK(m.ridge_fallback);
    // It still predicts the constant step.
    StateVec d{0.5, 0.25, 0.0, 0.0, 0.0, 0.0};
    StateVec ds[3] = {d, d, d};
    StateVec p = m.predict(ds, 3);
    CHECK(p[0] == doctest::Approx(0.5).epsilon(1e-3));
    CHECK(p[1] == doctest::Approx(0.25).epsilon(1e-3));

    CHECK_THROWS_AS((void)fit_behavior_model({std::vector<StateVec>(track.begin(),
                                                                    track.begin() + 50)}),
                    std::invalid_argument);
}

TEST_CASE("pose logs split into gap-free hemisphere-aligned tracks") {
    PoseLog poses;
    Quaternion q = angles_to_quat({60, 110, 20});
    for (int k = 0; k < 50; ++k) {
        Quaternion qq = (k % 3 == 1) ? Quaternion{-q.w, -q.x, -q.y, -q.z} : q;
        double t = k < 30 ? k / 50.0 : 1.0 + k / 50.0; // gap after row 29
        poses.push_back({t, PencilPose{{double(k), 5.0}, qq}});
    }
    auto tracks = tracks_from_poses(poses);
    REQUIRE(tracks.size() == 2);
    CHECK(tracks[0].size() == 30);
    CHECK(tracks[1].size() == 20);
    for (const auto& tr : tracks)
        for (std::size_t i = 1; i < tr.size(); ++i) {
            double dot_q = tr[i][2] * tr[i - 1][2] + tr[i][3] * tr[i - 1][3] +
                           tr[i][4] * tr[i - 1][4] + tr[i][5] * tr[i - 1][5];
            CHECK(dot_q > 0.9);
        }
}

TEST_CASE("init particles: deterministic, in range, residual-ranked") {
    ScreenConfig screen;
    DipoleSet pencil = DipoleSet::default_pencil();
    VoxelField map = nn_fill(build_pencil_map(clean_wardrive(90.0, 11, screen, pencil),
                                              screen, 5.0));
    // Field for a known in-range pose.
    PencilPose pose{{150.0, 120.0}, angles_to_quat({55, 115, 40})};
    Vec3 m = pencil_field_at_mag(pencil, screen, pose.tip, quat_to_axes(pose.orientation));

    TrackerConfig cfg = smoke_config();
    std::mt19937_64 rng1(77), rng2(77);
    ParticleSet a = init_particles(map, screen, m, cfg, rng1);
    ParticleSet b = init_particles(map, screen, m, cfg, rng2);
    REQUIRE(a.size() == cfg.n_max);
    REQUIRE(b.size() == a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.x[i] == b.x[i]);
        CHECK(a.qw[i] == b.qw[i]);
        CHECK(screen.contains(a.x[i], a.y[i]));
        CHECK(pose_in_range(Quaternion{a.qw[i], a.qx[i], a.qy[i], a.qz[i]}));
        CHECK(a.weight[i] == doctest::Approx(1.0 / a.size()));
        CHECK(a.history[i].size() == 1);
    }

    // Index 0 carries the smallest residual.
    auto res2 = [&](std::size_t i) {
        RotationAxes axes = quat_to_axes({a.qw[i], a.qx[i], a.qy[i], a.qz[i]});
        auto v = query_pencil_map(map, to_pencil_frame(screen.mag_location,
                                                       {a.x[i], a.y[i], 0.0}, axes));
        REQUIRE(v.has_value());
        Vec3 r = field_to_pencil_frame(m, axes) - *v;
        return dot(r, r);
    };
    double best = res2(0);
    for (std::size_t i = 1; i < a.size(); i += 97) CHECK(best <= res2(i) + 1e-12);
}

TEST_CASE("transition: history grows, bounds hold, same seed same result") {
    ScreenConfig screen;
    TrackerConfig cfg;
    cfg.pos_noise_mm = 2.0;
    ParticleSet ps;
    // Two particles: one mid-screen, one pushed against the corner with a
    // large outward velocity so the clamp path triggers.
    auto add = [&ps](double x, double y, const Quaternion& q) {
        ps.x.push_back(x);
        ps.y.push_back(y);
        ps.qw.push_back(q.w);
        ps.qx.push_back(q.x);
        ps.qy.push_back(q.y);
        ps.qz.push_back(q.z);
        ps.weight.push_back(0.5);
        ps.history.push_back({});
    };
    Quaternion q = angles_to_quat({55, 115, 10});
    add(100.0, 80.0, q);
    add(229.5, 159.5, q);
    ps.history[0] = {{90.0, 80.0, q.w, q.x, q.y, q.z}, ps.state(0)}; // vx = 10
    ps.history[1] = {{219.5, 149.5, q.w, q.x, q.y, q.z}, ps.state(1)};

    ParticleSet snap = ps;
    std::mt19937_64 r1(5), r2(5);
    transition(ps, screen, std::nullopt, cfg, r1);
    transition(snap, screen, std::nullopt, cfg, r2);
    for (std::size_t i = 0; i < ps.size(); ++i) {
        CHECK(ps.x[i] == snap.x[i]);
        CHECK(ps.qz[i] == snap.qz[i]);
        CHECK(ps.history[i].size() == 3);
        CHECK(screen.contains(ps.x[i], ps.y[i]));
        CHECK(pose_in_range(Quaternion{ps.qw[i], ps.qx[i], ps.qy[i], ps.qz[i]}));
    }
    // The mid-screen particle drifted roughly one velocity step.
    CHECK(ps.x[0] == doctest::Approx(110.0).epsilon(0.2));
}

TEST_CASE("resample: scaling invariance, concentration, deep histories") {
    TrackerConfig cfg;
    cfg.n_max = 3000;
    cfg.kld.n_min = 200;
    std::mt19937_64 seed_rng(13);
    std::uniform_real_distribution<double> ux(0.0, 230.0), uy(0.0, 160.0);
    std::uniform_real_distribution<double> uw(0.1, 1.0);

    ParticleSet ps;
    const std::size_t n = 5000;
    Quaternion q = angles_to_quat({60, 100, 0});
    for (std::size_t i = 0; i < n; ++i) {
        ps.x.push_back(ux(seed_rng));
        ps.y.push_back(uy(seed_rng));
        ps.qw.push_back(q.w);
        ps.qx.push_back(q.x);
        ps.qy.push_back(q.y);
        ps.qz.push_back(q.z);
        ps.weight.push_back(uw(seed_rng));
        ps.history.push_back({ps.state(i)});
    }

    // Scaling every weight by a constant changes nothing.
    ParticleSet a = ps, b = ps;
    for (double& w : b.weight) w *= 7.25;
    std::mt19937_64 ra(21), rb(21);
    resample(a, cfg, ra);
    resample(b, cfg, rb);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.x[i] == b.x[i]);
        CHECK(a.y[i] == b.y[i]);
    }
    // Spread cloud occupies many bins, so the adaptive size exceeds n_min.
    CHECK(a.size() > cfg.kld.n_min);
    for (double w : a.weight) CHECK(w == doctest::Approx(1.0 / a.size()));

    // All mass on one particle: exactly n_min copies of it survive.
    ParticleSet c = ps;
    for (double& w : c.weight) w = 0.0;
    c.weight[123] = 4.0;
    std::mt19937_64 rc(9);
    resample(c, cfg, rc);
    REQUIRE(c.size() == cfg.kld.n_min);
    for (std::size_t i = 0; i < c.size(); ++i) {
        CHECK(c.x[i] == ps.x[123]);
        CHECK(c.history[i].size() == 1);
    }
    // Histories are independent copies.
    c.history[0].push_back(c.state(0));
    CHECK(c.history[1].size() == 1);

    ParticleSet d = ps;
    for (double& w : d.weight) w = 0.0;
    std::mt19937_64 rd(2);
    CHECK_THROWS_AS(resample(d, cfg, rd), DegenerateWeights);
}

TEST_CASE("closed loop: straight stroke is recovered on a filled map") {
    ScreenConfig screen;
    DipoleSet pencil = DipoleSet::default_pencil();
    AmbientField ambient;
    SensorNoise noise; // sigma_mag 0.1

    VoxelField map = nn_fill(build_pencil_map(clean_wardrive(300.0, 19, screen, pencil),
                                              screen, 5.0));
    BehaviorModel behavior = fit_behavior_model(
        tracks_from_poses(wardrive_poses(120.0, 23, screen)));

    // Glyph "l": one vertical stroke, grid 3 (nearest the magnetometer).
    TrajectoryScript script = script_glyph("l", 3, 36.0, 60.0, screen);
    SessionLogs logs = simulate_session(script, pencil, ambient, screen, noise, 404);

    const double lead = 2.0;
    StrokeInterval stroke{script.strokes[0].points.front().t_s + lead,
                          script.strokes[0].points.back().t_s + lead};
    TrackerConfig cfg = smoke_config();
    TrackResult res = track_stroke(map, screen, logs.mag, stroke, ambient.constant,
                                   behavior, cfg, 31);

    // One trace point per mag sample inside the stroke.
    std::size_t expect = 0;
    for (const Sample3& s : logs.mag)
        if (s.t >= stroke.begin_s && s.t <= stroke.end_s) ++expect;
    REQUIRE(res.trace.size() == expect);
    CHECK(res.n_final >= cfg.kld.n_min);

    double rmse = raw_rmse_vs_script(res.trace, script, lead);
    MESSAGE("closed-loop raw rmse (mm): ", rmse, " restarts: ", res.restarts);
    CHECK(rmse < 30.0);

    // Determinism: identical invocation, identical trace.
    TrackResult res2 = track_stroke(map, screen, logs.mag, stroke, ambient.constant,
                                    behavior, cfg, 31);
    REQUIRE(res2.trace.size() == res.trace.size());
    for (std::size_t i = 0; i < res.trace.size(); ++i) {
        CHECK(res2.trace[i].x == res.trace[i].x);
        CHECK(res2.trace[i].y == res.trace[i].y);
    }
}

TEST_CASE("closed loop 2d: position-only tracking on a screen map") {
    ScreenConfig screen;
    DipoleSet pencil = DipoleSet::default_pencil();
    AmbientField ambient;
    SensorNoise noise;

    // The 2-D variant assumes a repeatable grip: map built at the same fixed
    // attitude the session uses.
    AttitudeAngles grip{65.0, 115.0, 30.0};
    RotationAxes grip_axes = angles_to_axes(grip);
    WarDriveLog log;
    for (double x = 2.0; x <= 228.0; x += 2.0)
        for (double y = 2.0; y <= 158.0; y += 2.0) {
            WarDriveRow r;
            r.tip = {x, y, 0.0};
            r.axes = grip_axes;
            r.m = pencil_field_at_mag(pencil, screen, {x, y}, grip_axes);
            log.push_back(r);
        }
    ScreenMap2D map = build_2d_map(log, 5.0);

    AttitudeProfile profile;
    profile.altitude_base = grip.altitude_deg;
    profile.altitude_amp = 0.0;
    profile.azimuth_base = grip.azimuth_deg;
    profile.azimuth_amp = 0.0;
    profile.roll_base = grip.roll_deg;
    profile.roll_amp = 0.0;
    TrajectoryScript script = script_glyph("l", 3, 36.0, 60.0, screen, profile);
    SessionLogs logs = simulate_session(script, pencil, ambient, screen, noise, 505);

    const double lead = 2.0;
    StrokeInterval stroke{script.strokes[0].points.front().t_s + lead,
                          script.strokes[0].points.back().t_s + lead};
    TrackerConfig cfg = smoke_config();
    cfg.sigma_uT = 0.5;
    TrackResult res = track_stroke_2d(map, screen, logs.mag, stroke, ambient.constant,
                                      cfg, 99);
    REQUIRE(res.trace.size() >= 2);
    double rmse = raw_rmse_vs_script(res.trace, script, lead);
    MESSAGE("closed-loop 2d raw rmse (mm): ", rmse, " restarts: ", res.restarts);
    CHECK(rmse < 20.0);
}

TEST_CASE("knn: exact match at k=1 and sane grid search") {
    ScreenConfig screen;
    DipoleSet pencil = DipoleSet::default_pencil();
    // Training session: mag readings at pose timestamps with matching poses.
    PoseLog poses = wardrive_poses(120.0, 41, screen);
    MagLog mag;
    for (const PoseSample& p : poses) {
        Vec3 m = pencil_field_at_mag(pencil, screen, p.pose.tip,
                                     quat_to_axes(p.pose.orientation));
        mag.push_back({p.t, m});
    }

    KnnModel m1 = knn_fit(mag, poses, 1);
    CHECK(m1.k == 1);
    Trace t1 = knn_track(m1, mag);
    REQUIRE(t1.size() == mag.size() - 2);
    // Every query is a training feature: the k=1 prediction returns its own
    // training target exactly.
    for (std::size_t i = 0; i < t1.size(); ++i) {
        CHECK(t1[i].x == doctest::Approx(m1.targets[i].x).epsilon(1e-12));
        CHECK(t1[i].y == doctest::Approx(m1.targets[i].y).epsilon(1e-12));
    }

    KnnModel m2 = knn_fit(mag, poses);
    CHECK(m2.k >= 1);
    CHECK(m2.k <= 5);

    MagLog tiny(mag.begin(), mag.begin() + 20);
    PoseLog tinyp(poses.begin(), poses.begin() + 20);
    CHECK_THROWS_AS((void)knn_fit(tiny, tinyp), std::invalid_argument);
}
