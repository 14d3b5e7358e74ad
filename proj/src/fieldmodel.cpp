// SPDX-License-Identifier: Apache-2.0

#include "pentrack/fieldmodel.hpp"

#include "pentrack/glyphs.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace pentrack {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kMu0Over4Pi = 1e-7; // T*m/A

double clampd(double v, double lo, double hi) { return std::clamp(v, lo, hi); }

// Linear interpolation of the scripted pose inside one stroke.
PencilPose pose_between(const Waypoint& a, const Waypoint& b, double t) {
    double u = (b.t_s > a.t_s) ? (t - a.t_s) / (b.t_s - a.t_s) : 0.0;
    u = clampd(u, 0.0, 1.0);
    AttitudeAngles ang{
        a.attitude.altitude_deg + u * (b.attitude.altitude_deg - a.attitude.altitude_deg),
        a.attitude.azimuth_deg + u * (b.attitude.azimuth_deg - a.attitude.azimuth_deg),
        a.attitude.roll_deg + u * (b.attitude.roll_deg - a.attitude.roll_deg)};
    PencilPose p;
    p.tip = {a.tip_mm.x + u * (b.tip_mm.x - a.tip_mm.x),
             a.tip_mm.y + u * (b.tip_mm.y - a.tip_mm.y)};
    p.orientation = angles_to_quat(ang);
    return p;
}

} // namespace

DipoleSet DipoleSet::default_pencil() {
    DipoleSet s;
    s.dipoles.push_back({40.0, {0.40, 0.20, 2.40}});
    s.dipoles.push_back({80.0, {-0.30, 0.16, -2.30}});
    return s;
}

Vec3 dipole_field_at(const DipoleSet& set, Vec3 p_pencil_mm) {
    Vec3 total;
    for (const Dipole& d : set.dipoles) {
        Vec3 r_mm = p_pencil_mm - Vec3{0.0, 0.0, d.offset_mm};
        double dist_mm = norm(r_mm);
        if (dist_mm < 1.0)
            throw std::domain_error("dipole field evaluated within 1 mm of a source");
        Vec3 r = r_mm * 1e-3; // metres
        double rn = dist_mm * 1e-3;
        Vec3 rhat = r / rn;
        Vec3 b_T = kMu0Over4Pi *
                   (3.0 * dot(d.moment_Am2, rhat) * rhat - d.moment_Am2) / (rn * rn * rn);
        total += b_T * 1e6; // uT
    }
    return total;
}

Vec3 pencil_field_at_mag(const DipoleSet& set, const ScreenConfig& screen, Vec2 tip,
                         const RotationAxes& axes) {
    Vec3 mp = to_pencil_frame(screen.mag_location, {tip.x, tip.y, 0.0}, axes);
    return field_to_screen_frame(dipole_field_at(set, mp), axes);
}

double TrajectoryScript::begin_s() const {
    if (strokes.empty() || strokes.front().points.empty())
        throw std::invalid_argument("empty trajectory script");
    return strokes.front().points.front().t_s;
}

double TrajectoryScript::end_s() const {
    if (strokes.empty() || strokes.back().points.empty())
        throw std::invalid_argument("empty trajectory script");
    return strokes.back().points.back().t_s;
}

AttitudeAngles AttitudeProfile::at(double progress) const {
    double s = clampd(progress, 0.0, 1.0);
    double alt = altitude_base + altitude_amp * std::sin(2.0 * kPi * (1.1 * s + phase));
    double az = azimuth_base + azimuth_amp * std::sin(2.0 * kPi * (0.9 * s + phase + 0.25));
    double roll = roll_base + roll_amp * s;
    return {clampd(alt, kAltitudeMinDeg + 1.0, kAltitudeMaxDeg - 1.0),
            clampd(az, kAzimuthMinDeg + 1.0, kAzimuthMaxDeg - 1.0), roll};
}

TrajectoryScript script_glyph(const std::string& glyph, int grid, double size_mm,
                              double speed_mm_s, const ScreenConfig& screen,
                              const AttitudeProfile& profile) {
    if (grid < 1 || grid > 3) throw std::invalid_argument("grid cell must be 1..3");
    if (speed_mm_s <= 0.0) throw std::invalid_argument("speed must be positive");
    const GlyphStrokes& strokes = glyph_polylines(glyph);

    // Input region: lower half of the screen split into three cells.
    double cell_w = screen.width_mm / 3.0;
    double cell_h = screen.height_mm / 2.0;
    if (size_mm <= 0.0 || size_mm > cell_w || size_mm > cell_h)
        throw std::invalid_argument("glyph size does not fit the grid cell");
    double ox = (grid - 1) * cell_w + (cell_w - size_mm) / 2.0;
    double oy = screen.height_mm / 2.0 + (cell_h - size_mm) / 2.0;

    // First pass: place the points and accumulate path length so progress
    // (for the attitude profile) runs over drawn distance.
    double total_len = 0.0;
    for (const auto& stroke : strokes)
        for (size_t i = 1; i < stroke.size(); ++i) {
            Vec2 a{ox + stroke[i - 1].x * size_mm, oy + stroke[i - 1].y * size_mm};
            Vec2 b{ox + stroke[i].x * size_mm, oy + stroke[i].y * size_mm};
            total_len += std::hypot(b.x - a.x, b.y - a.y);
        }
    if (total_len <= 0.0) throw std::invalid_argument("glyph has no drawn length");

    const double gap_s = 0.3; // pen lifted between strokes
    TrajectoryScript script;
    double t = 0.0;
    double walked = 0.0;
    for (const auto& stroke : strokes) {
        StrokeScript ss;
        for (size_t i = 0; i < stroke.size(); ++i) {
            Vec2 p{ox + stroke[i].x * size_mm, oy + stroke[i].y * size_mm};
            if (!screen.contains(p.x, p.y))
                throw std::invalid_argument("glyph waypoint falls outside the screen");
            if (i > 0) {
                const Waypoint& prev = ss.points.back();
                double seg = std::hypot(p.x - prev.tip_mm.x, p.y - prev.tip_mm.y);
                t += seg / speed_mm_s;
                walked += seg;
            }
            ss.points.push_back({t, p, profile.at(walked / total_len)});
        }
        if (ss.points.size() >= 2) script.strokes.push_back(std::move(ss));
        t += gap_s;
    }
    if (script.strokes.empty()) throw std::invalid_argument("glyph produced no strokes");
    return script;
}

TrajectoryScript script_wardrive(double duration_s, std::uint64_t seed,
                                 const ScreenConfig& screen) {
    if (duration_s <= 0.0) throw std::invalid_argument("duration must be positive");
    std::mt19937_64 rng(seed);
    const double margin = 6.0;
    std::uniform_real_distribution<double> ux(margin, screen.width_mm - margin);
    std::uniform_real_distribution<double> uy(margin, screen.height_mm - margin);
    std::uniform_real_distribution<double> uspeed(60.0, 120.0);
    std::normal_distribution<double> step_alt(0.0, 2.0);
    std::normal_distribution<double> step_az(0.0, 3.0);
    std::normal_distribution<double> step_roll(0.0, 6.0);

    auto reflect = [](double v, double lo, double hi) {
        while (v < lo || v > hi) {
            if (v < lo) v = 2.0 * lo - v;
            if (v > hi) v = 2.0 * hi - v;
        }
        return v;
    };

    StrokeScript ss;
    const double dt = 0.05;
    Vec2 pos{ux(rng), uy(rng)};
    Vec2 target{ux(rng), uy(rng)};
    double speed = uspeed(rng);
    AttitudeAngles ang{60.0, 115.0, 0.0};
    for (double t = 0.0; t <= duration_s + 1e-9; t += dt) {
        ss.points.push_back({t, pos, ang});
        double dx = target.x - pos.x, dy = target.y - pos.y;
        double dist = std::hypot(dx, dy);
        if (dist < 5.0) {
            target = {ux(rng), uy(rng)};
            speed = uspeed(rng);
            dx = target.x - pos.x;
            dy = target.y - pos.y;
            dist = std::hypot(dx, dy);
        }
        double step = std::min(speed * dt, dist);
        if (dist > 0.0) pos = {pos.x + dx / dist * step, pos.y + dy / dist * step};
        ang.altitude_deg = reflect(ang.altitude_deg + step_alt(rng), 35.0, 85.0);
        ang.azimuth_deg = reflect(ang.azimuth_deg + step_az(rng), 65.0, 165.0);
        ang.roll_deg += step_roll(rng);
    }
    TrajectoryScript script;
    script.strokes.push_back(std::move(ss));
    return script;
}

TrajectoryScript script_scan_2d(const ScreenConfig& screen, double pitch_mm,
                                double speed_mm_s) {
    if (pitch_mm <= 0.0 || speed_mm_s <= 0.0)
        throw std::invalid_argument("pitch and speed must be positive");
    const double margin = 4.0;
    AttitudeAngles vertical{90.0, 0.0, 0.0};
    StrokeScript ss;
    double t = 0.0;
    bool left_to_right = true;
    double prev_x = margin, prev_y = margin;
    for (double y = margin; y <= screen.height_mm - margin + 1e-9; y += pitch_mm) {
        double x0 = left_to_right ? margin : screen.width_mm - margin;
        double x1 = left_to_right ? screen.width_mm - margin : margin;
        if (!ss.points.empty()) t += std::hypot(x0 - prev_x, y - prev_y) / speed_mm_s;
        ss.points.push_back({t, {x0, y}, vertical});
        t += std::abs(x1 - x0) / speed_mm_s;
        ss.points.push_back({t, {x1, y}, vertical});
        prev_x = x1;
        prev_y = y;
        left_to_right = !left_to_right;
    }
    TrajectoryScript script;
    script.strokes.push_back(std::move(ss));
    return script;
}

std::optional<PencilPose> script_pose_at(const TrajectoryScript& script, double t) {
    for (const StrokeScript& ss : script.strokes) {
        if (ss.points.size() < 2) continue;
        if (t < ss.points.front().t_s || t > ss.points.back().t_s) continue;
        auto it = std::upper_bound(ss.points.begin(), ss.points.end(), t,
                                   [](double v, const Waypoint& w) { return v < w.t_s; });
        size_t hi = std::min<size_t>(it - ss.points.begin(), ss.points.size() - 1);
        size_t lo = hi == 0 ? 0 : hi - 1;
        return pose_between(ss.points[lo], ss.points[hi], t);
    }
    return std::nullopt;
}

SessionLogs simulate_session(const TrajectoryScript& script, const DipoleSet& set,
                             const AmbientField& ambient, const ScreenConfig& screen,
                             const SensorNoise& noise, std::uint64_t seed,
                             const SimOptions& opts) {
    double t0 = script.begin_s();
    double span = script.end_s() - t0;
    if (span < 0.0) throw std::invalid_argument("script ends before it begins");
    double total = opts.quiet_lead_s + span + opts.quiet_tail_s;

    // Session time runs from 0; the script is shifted by the quiet lead.
    auto pose_at = [&](double t) { return script_pose_at(script, t - opts.quiet_lead_s + t0); };

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gmag(0.0, noise.sigma_mag_uT);
    std::normal_distribution<double> gacc(0.0, noise.sigma_accel);
    std::normal_distribution<double> ggyr(0.0, noise.sigma_gyro);

    SessionLogs logs;

    int n_mag = static_cast<int>(std::llround(total * kMagRateHz));
    for (int k = 0; k < n_mag; ++k) {
        double t = k / kMagRateHz;
        Vec3 m = ambient.at(t);
        if (auto pose = pose_at(t)) {
            RotationAxes axes = quat_to_axes(pose->orientation);
            m += pencil_field_at_mag(set, screen, pose->tip, axes);
        }
        m += Vec3{gmag(rng), gmag(rng), gmag(rng)};
        logs.mag.push_back({t, m});
    }

    int n_touch = static_cast<int>(std::llround(total * kTouchRateHz));
    for (int k = 0; k < n_touch; ++k) {
        double t = k / kTouchRateHz;
        if (auto pose = pose_at(t)) logs.touch.push_back({t, pose->tip.x, pose->tip.y});
    }

    int n_pose = static_cast<int>(std::llround(total * kMagRateHz));
    for (int k = 0; k < n_pose; ++k) {
        double t = k / kMagRateHz;
        if (auto pose = pose_at(t)) logs.pose.push_back({t, *pose});
    }

    int n_imu = static_cast<int>(std::llround(total * kImuRateHz));
    logs.imu.accel.resize(n_imu);
    logs.imu.gyro.resize(n_imu);
    for (int k = 0; k < n_imu; ++k) {
        double t = k / kImuRateHz;
        logs.imu.accel[k] = {t, {gacc(rng), gacc(rng), gacc(rng)}};
        logs.imu.gyro[k] = {t, {ggyr(rng), ggyr(rng), ggyr(rng)}};
    }

    // Contact bumps: three-sample half-sine on both IMU streams around every
    // pen-down and pen-up moment.
    const double lobe[3] = {std::sqrt(0.5), 1.0, std::sqrt(0.5)};
    for (const StrokeScript& ss : script.strokes) {
        if (ss.points.size() < 2) continue;
        for (double te : {ss.points.front().t_s, ss.points.back().t_s}) {
            double t_session = te - t0 + opts.quiet_lead_s;
            int centre = static_cast<int>(std::llround(t_session * kImuRateHz));
            for (int j = -1; j <= 1; ++j) {
                int idx = centre + j;
                if (idx < 0 || idx >= n_imu) continue;
                logs.imu.accel[idx].v.z += noise.touch_spike_accel * lobe[j + 1];
                logs.imu.gyro[idx].v.z += noise.touch_spike_gyro * lobe[j + 1];
            }
        }
    }

    return logs;
}

} // namespace pentrack
