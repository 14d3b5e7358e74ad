// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pentrack/eval.hpp"

#include <cmath>
#include <random>

using namespace pentrack;

namespace {

constexpr double kPi = 3.14159265358979323846;

// A wavy test curve at 50 Hz.
Trace curve(int n, double t0 = 0.0) {
    Trace tr;
    for (int i = 0; i < n; ++i) {
        double t = t0 + i / 50.0;
        tr.push_back({t, 80.0 + 40.0 * std::sin(2.0 * kPi * i / 97.0),
                      70.0 + 30.0 * std::cos(2.0 * kPi * i / 61.0)});
    }
    return tr;
}

} // namespace

TEST_CASE("identical traces score zero everywhere") {
    Trace a = curve(200);
    EvalMetrics m = run_eval(a, a);
    CHECK(m.raw_rmse_mm == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(m.aligned_rmse_mm == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(m.scale == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(m.rotation_deg == doctest::Approx(0.0).epsilon(1e-9));
    CHECK(m.samples >= 199);
}

TEST_CASE("translation shows up raw and vanishes aligned") {
    Trace truth = curve(300);
    Trace moved = truth;
    for (TracePoint& p : moved) {
        p.x += 5.0;
        p.y -= 3.0;
    }
    EvalMetrics m = run_eval(moved, truth);
    CHECK(m.raw_rmse_mm == doctest::Approx(std::sqrt(34.0)).epsilon(1e-9));
    CHECK(m.aligned_rmse_mm < 1e-9);
    CHECK(m.tx_mm == doctest::Approx(-5.0).epsilon(1e-6));
    CHECK(m.ty_mm == doctest::Approx(3.0).epsilon(1e-6));
}

TEST_CASE("similarity transform is recovered exactly") {
    Trace truth = curve(250);
    // trace = 1.3 * R(30 deg) * truth + (12, -7); alignment must invert it.
    const double th = 30.0 * kPi / 180.0, s = 1.3;
    Trace warped = truth;
    for (TracePoint& p : warped) {
        double x = p.x, y = p.y;
        p.x = s * (std::cos(th) * x - std::sin(th) * y) + 12.0;
        p.y = s * (std::sin(th) * x + std::cos(th) * y) - 7.0;
    }
    EvalMetrics m = run_eval(warped, truth);
    CHECK(m.aligned_rmse_mm < 1e-9);
    CHECK(m.scale == doctest::Approx(1.0 / s).epsilon(1e-9));
    CHECK(m.rotation_deg == doctest::Approx(-30.0).epsilon(1e-9));
    CHECK(m.raw_rmse_mm > 10.0);
}

TEST_CASE("gaussian jitter scores near its rms norm over 100 trials") {
    Trace truth = curve(400);
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g(0.0, 1.0);
    double sum = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        Trace noisy = truth;
        for (TracePoint& p : noisy) {
            p.x += g(rng);
            p.y += g(rng);
        }
        sum += run_eval(noisy, truth).aligned_rmse_mm;
    }
    double mean = sum / 100.0;
    // E|n|^2 = 2 sigma^2 for 2-d isotropic jitter; alignment eats only 4 dof.
    CHECK(mean == doctest::Approx(std::sqrt(2.0)).epsilon(0.05));
}

TEST_CASE("different sampling grids agree on a straight line") {
    Trace a, b; // same segment sampled at 50 and 120 Hz
    for (int i = 0; i <= 100; ++i) {
        double t = i / 50.0;
        a.push_back({t, 10.0 + 25.0 * t, 140.0 - 12.0 * t});
    }
    for (int i = 0; i <= 240; ++i) {
        double t = i / 120.0;
        b.push_back({t, 10.0 + 25.0 * t, 140.0 - 12.0 * t});
    }
    EvalMetrics m = run_eval(b, a);
    CHECK(m.raw_rmse_mm < 1e-9);
}

TEST_CASE("short or non-overlapping inputs throw") {
    Trace one{{0.0, 1.0, 2.0}};
    Trace ok = curve(100);
    CHECK_THROWS_AS((void)run_eval(one, ok), std::invalid_argument);
    CHECK_THROWS_AS((void)run_eval(ok, one), std::invalid_argument);
    Trace late = curve(100, 1000.0);
    CHECK_THROWS_AS((void)run_eval(late, ok), std::invalid_argument);
}
