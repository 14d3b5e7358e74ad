// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pentrack/fieldmodel.hpp"
#include "pentrack/glyphs.hpp"

#include <cmath>

using namespace pentrack;

namespace {

DipoleSet single(Vec3 moment, double offset = 0.0) {
    DipoleSet s;
    s.dipoles.push_back({offset, moment});
    return s;
}

} // namespace

TEST_CASE("dipole field matches the on-axis and equatorial closed forms") {
    // Unit moment along z. On the axis at 50 mm: B = 2e-7 * m / d^3
    // = 2e-7 / 1.25e-4 T = 1600 uT along +z. On the equator at the same
    // distance the field is half that and antiparallel: -800 uT.
    DipoleSet s = single({0, 0, 1});
    Vec3 axial = dipole_field_at(s, {0, 0, 50});
    CHECK(axial.x == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(axial.y == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(axial.z == doctest::Approx(1600.0).epsilon(1e-9));

    Vec3 equatorial = dipole_field_at(s, {50, 0, 0});
    CHECK(equatorial.x == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(equatorial.z == doctest::Approx(-800.0).epsilon(1e-9));
}

TEST_CASE("dipole field decays as the inverse cube") {
    DipoleSet s = single({0.01, -0.02, 0.11});
    Vec3 near = dipole_field_at(s, {30, 40, 50});
    Vec3 far = dipole_field_at(s, {60, 80, 100});
    CHECK(norm(far) == doctest::Approx(norm(near) / 8.0).epsilon(1e-9));
}

TEST_CASE("fields of multiple dipoles superpose") {
    DipoleSet a = single({0, 0, 0.1}, 40.0);
    DipoleSet b = single({0.02, 0, -0.09}, 80.0);
    DipoleSet both;
    both.dipoles = {a.dipoles[0], b.dipoles[0]};
    Vec3 p{25, -60, 10};
    Vec3 sum = dipole_field_at(a, p) + dipole_field_at(b, p);
    CHECK(norm(dipole_field_at(both, p) - sum) < 1e-12);
}

TEST_CASE("evaluation within 1 mm of a source is rejected") {
    DipoleSet s = single({0, 0, 0.1}, 40.0);
    CHECK_THROWS_AS((void)dipole_field_at(s, {0.5, 0, 40.2}), std::domain_error);
}

TEST_CASE("glyph font shapes") {
    const GlyphStrokes& l = glyph_polylines("l");
    REQUIRE(l.size() == 1);
    CHECK(l[0].size() == 2);

    const GlyphStrokes& sq = glyph_polylines("square");
    REQUIRE(sq.size() == 1);
    REQUIRE(sq[0].size() == 5);
    CHECK(sq[0].front().x == doctest::Approx(sq[0].back().x));
    CHECK(sq[0].front().y == doctest::Approx(sq[0].back().y));

    CHECK_THROWS_AS((void)glyph_polylines("no-such-glyph"), std::invalid_argument);
    CHECK(glyph_names().size() == 26 + 10 + 5);
}

TEST_CASE("scripted glyphs stay inside the placement cell") {
    ScreenConfig screen;
    for (const char* name : {"square", "a", "w", "heart", "star", "8"}) {
        for (int grid = 1; grid <= 3; ++grid) {
            TrajectoryScript s = script_glyph(name, grid, 40.0, 80.0, screen);
            double cell_w = screen.width_mm / 3.0;
            for (const auto& stroke : s.strokes)
                for (const auto& wp : stroke.points) {
                    CHECK(wp.tip_mm.x >= (grid - 1) * cell_w - 1e-9);
                    CHECK(wp.tip_mm.x <= grid * cell_w + 1e-9);
                    CHECK(wp.tip_mm.y >= screen.height_mm / 2.0 - 1e-9);
                    CHECK(wp.tip_mm.y <= screen.height_mm + 1e-9);
                    CHECK(pose_in_range(wp.attitude));
                }
        }
    }
    CHECK_THROWS_AS((void)script_glyph("square", 4, 40, 80, screen), std::invalid_argument);
    CHECK_THROWS_AS((void)script_glyph("square", 1, 1000, 80, screen), std::invalid_argument);
}

TEST_CASE("waypoint timing follows constant drawing speed") {
    ScreenConfig screen;
    TrajectoryScript s = script_glyph("square", 2, 40.0, 80.0, screen);
    REQUIRE(s.strokes.size() == 1);
    const auto& pts = s.strokes[0].points;
    // The square side is 0.8 * 40 = 32 mm, so each edge takes 0.4 s.
    for (size_t i = 1; i < pts.size(); ++i)
        CHECK(pts[i].t_s - pts[i - 1].t_s == doctest::Approx(32.0 / 80.0).epsilon(1e-9));
}

TEST_CASE("session sample counts match the platform rates") {
    ScreenConfig screen;
    TrajectoryScript s = script_glyph("square", 2, 40.0, 16.0, screen); // 8 s of drawing
    SimOptions opts;
    opts.quiet_lead_s = 1.0;
    opts.quiet_tail_s = 1.0;
    double total = opts.quiet_lead_s + (s.end_s() - s.begin_s()) + opts.quiet_tail_s; // 10 s
    SessionLogs logs = simulate_session(s, DipoleSet::default_pencil(), {}, screen, {}, 1, opts);
    CHECK(std::abs(static_cast<double>(logs.mag.size()) - total * 50.0) <= 1.0);
    CHECK(std::abs(static_cast<double>(logs.imu.accel.size()) - total * 100.0) <= 1.0);
    CHECK(logs.imu.gyro.size() == logs.imu.accel.size());
    // Touch exists only during the stroke: 8 s of contact out of 10.
    CHECK(logs.touch.size() < total * 120.0 * 0.9);
    CHECK(logs.touch.size() > total * 120.0 * 0.6);
}

TEST_CASE("magnetometer rows follow the forward model") {
    ScreenConfig screen;
    AmbientField ambient;
    DipoleSet pencil = DipoleSet::default_pencil();
    SensorNoise quiet_noise;
    quiet_noise.sigma_mag_uT = 1e-6; // make the check tight
    TrajectoryScript s = script_glyph("square", 2, 40.0, 80.0, screen);
    SessionLogs logs = simulate_session(s, pencil, ambient, screen, quiet_noise, 7);

    int checked_down = 0, checked_up = 0;
    for (const Sample3& row : logs.mag) {
        auto pose = script_pose_at(s, row.t - 2.0); // default lead is 2 s
        Vec3 want = ambient.at(row.t);
        if (pose) {
            want += pencil_field_at_mag(pencil, screen, pose->tip,
                                        quat_to_axes(pose->orientation));
            ++checked_down;
        } else {
            ++checked_up;
        }
        CHECK(norm(row.v - want) < 1e-4);
    }
    CHECK(checked_down > 0);
    CHECK(checked_up > 0);
}

TEST_CASE("IMU bump lands within one sample of the contact moments") {
    ScreenConfig screen;
    SensorNoise noise;
    noise.sigma_accel = 1e-5;
    noise.sigma_gyro = 1e-6;
    TrajectoryScript s = script_glyph("l", 2, 40.0, 80.0, screen);
    SessionLogs logs = simulate_session(s, DipoleSet::default_pencil(), {}, screen, noise, 3);

    double down_t = 2.0; // quiet lead
    double up_t = 2.0 + (s.end_s() - s.begin_s());
    for (double te : {down_t, up_t}) {
        double best_t = -1e9, best_mag = 0.0;
        for (const Sample3& a : logs.imu.accel)
            if (std::abs(a.t - te) < 0.2 && norm(a.v) > best_mag) {
                best_mag = norm(a.v);
                best_t = a.t;
            }
        CHECK(best_mag > 0.4);
        CHECK(std::abs(best_t - te) <= 1.0 / 100.0 + 1e-9);
    }
}

TEST_CASE("same seed reproduces the session exactly") {
    ScreenConfig screen;
    TrajectoryScript s = script_glyph("a", 1, 35.0, 70.0, screen);
    SessionLogs a = simulate_session(s, DipoleSet::default_pencil(), {}, screen, {}, 99);
    SessionLogs b = simulate_session(s, DipoleSet::default_pencil(), {}, screen, {}, 99);
    REQUIRE(a.mag.size() == b.mag.size());
    for (size_t i = 0; i < a.mag.size(); ++i) {
        CHECK(a.mag[i].t == b.mag[i].t);
        CHECK(a.mag[i].v.x == b.mag[i].v.x);
        CHECK(a.mag[i].v.y == b.mag[i].v.y);
        CHECK(a.mag[i].v.z == b.mag[i].v.z);
    }
    REQUIRE(a.pose.size() == b.pose.size());
    REQUIRE(a.imu.accel.size() == b.imu.accel.size());
}

TEST_CASE("wardrive script covers the screen and honours attitude bounds") {
    ScreenConfig screen;
    TrajectoryScript s = script_wardrive(120.0, 5, screen);
    REQUIRE(s.strokes.size() == 1);
    double min_x = 1e9, max_x = -1e9, min_y = 1e9, max_y = -1e9;
    for (const auto& wp : s.strokes[0].points) {
        CHECK(screen.contains(wp.tip_mm.x, wp.tip_mm.y));
        CHECK(wp.attitude.altitude_deg >= 35.0);
        CHECK(wp.attitude.altitude_deg <= 85.0);
        CHECK(wp.attitude.azimuth_deg >= 65.0);
        CHECK(wp.attitude.azimuth_deg <= 165.0);
        min_x = std::min(min_x, wp.tip_mm.x);
        max_x = std::max(max_x, wp.tip_mm.x);
        min_y = std::min(min_y, wp.tip_mm.y);
        max_y = std::max(max_y, wp.tip_mm.y);
    }
    CHECK(max_x - min_x > screen.width_mm * 0.7);
    CHECK(max_y - min_y > screen.height_mm * 0.7);
}

TEST_CASE("2d scan is vertical and spans the screen") {
    ScreenConfig screen;
    TrajectoryScript s = script_scan_2d(screen, 8.0, 150.0);
    for (const auto& wp : s.strokes[0].points)
        CHECK(wp.attitude.altitude_deg == doctest::Approx(90.0));
    CHECK(s.strokes[0].points.size() > 20);
}
