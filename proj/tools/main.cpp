// SPDX-License-Identifier: Apache-2.0
//
// pentrack command line: synthesize sessions, build and fill magnetic maps,
// fit the movement model, detect strokes, run the trackers, and score the
// recovered traces. Every command prints a one-line JSON record to stdout;
// failures print {"error": ...} to stderr and exit nonzero.

#include <CLI11.hpp>
#include <json.hpp>

#include "pentrack/eval.hpp"
#include "pentrack/fieldmodel.hpp"
#include "pentrack/io.hpp"
#include "pentrack/knn.hpp"
#include "pentrack/magmap.hpp"
#include "pentrack/strokedetect.hpp"
#include "pentrack/svg.hpp"
#include "pentrack/tracker.hpp"

#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

using nlohmann::json;
using namespace pentrack;

namespace {

void emit(const json& record) { std::cout << record.dump() << "\n"; }

std::size_t observed_cells(const std::vector<int>& count) {
    std::size_t n = 0;
    for (int c : count)
        if (c > 0) ++n;
    return n;
}

struct SynthOpts {
    std::string script = "glyph";
    std::string glyph = "l";
    int grid = 2;
    double size_mm = 36.0;
    double speed = 60.0;
    double duration = 240.0;
    double pitch = 4.0;
    double scan_speed = 100.0;
    AttitudeProfile profile;
    double noise_mag = 0.1;
    double noise_accel = 0.02;
    double noise_gyro = 0.002;
    std::uint64_t seed = 0;
    std::string out_dir = ".";
};

void run_synth(const SynthOpts& o) {
    ScreenConfig screen;
    DipoleSet pencil = DipoleSet::default_pencil();
    AmbientField ambient;
    SensorNoise noise;
    noise.sigma_mag_uT = o.noise_mag;
    noise.sigma_accel = o.noise_accel;
    noise.sigma_gyro = o.noise_gyro;

    TrajectoryScript script;
    if (o.script == "glyph")
        script = script_glyph(o.glyph, o.grid, o.size_mm, o.speed, screen, o.profile);
    else if (o.script == "wardrive")
        script = script_wardrive(o.duration, o.seed, screen);
    else
        script = script_scan_2d(screen, o.pitch, o.scan_speed);

    SessionLogs logs = simulate_session(script, pencil, ambient, screen, noise, o.seed);

    std::filesystem::create_directories(o.out_dir);
    const std::string d = o.out_dir + "/";
    write_mag_csv(d + "mag.csv", logs.mag);
    write_touch_csv(d + "touch.csv", logs.touch);
    write_accel_csv(d + "accel.csv", logs.imu.accel);
    write_gyro_csv(d + "gyro.csv", logs.imu.gyro);
    write_pose_csv(d + "pose.csv", logs.pose);

    const double lead = SimOptions{}.quiet_lead_s;
    Trace truth;
    for (const Sample3& s : logs.mag) {
        auto pose = script_pose_at(script, s.t - lead);
        if (pose) truth.push_back({s.t, pose->tip.x, pose->tip.y});
    }
    write_trace_csv(d + "truth.csv", truth);

    std::vector<StrokeInterval> strokes;
    for (const StrokeScript& s : script.strokes)
        strokes.push_back({s.points.front().t_s + lead, s.points.back().t_s + lead});
    write_intervals_csv(d + "strokes.csv", strokes);

    emit({{"command", "synth"},
          {"script", o.script},
          {"out_dir", o.out_dir},
          {"mag_samples", logs.mag.size()},
          {"imu_samples", logs.imu.accel.size()},
          {"touch_samples", logs.touch.size()},
          {"strokes", strokes.size()}});
}

struct BuildMapOpts {
    std::string mag, touch, pose, out;
    std::string mode = "3d";
    double cell = 5.0;
    double quiet_begin = 0.0;
    double quiet_end = 1.5;
};

void run_build_map(const BuildMapOpts& o) {
    ScreenConfig screen;
    MagLog mag = read_mag_csv(o.mag);
    WarDriveLog rows = align_streams(read_touch_csv(o.touch), read_pose_csv(o.pose), mag);
    Vec3 amb = estimate_ambient(mag, o.quiet_begin, o.quiet_end);
    for (WarDriveRow& r : rows) r.m = r.m - amb;

    json record{{"command", "build-map"}, {"mode", o.mode}, {"rows", rows.size()}, {"out", o.out}};
    if (o.mode == "3d") {
        VoxelField map = build_pencil_map(rows, screen, o.cell);
        write_voxel_map(o.out, map);
        record["cells"] = map.cells();
        record["observed_cells"] = observed_cells(map.count);
    } else {
        ScreenMap2D map = build_2d_map(rows, o.cell);
        write_screen_map(o.out, map);
        record["cells"] = map.mean.size();
        record["observed_cells"] = observed_cells(map.count);
    }
    emit(record);
}

struct ReconstructOpts {
    std::string in, out;
    ReconstructionConfig cfg;
    bool grid_search = false;
};

void run_reconstruct(const ReconstructOpts& o) {
    VoxelField map = read_voxel_map(o.in);
    ReconstructionConfig cfg = o.cfg;
    if (o.grid_search) {
        std::vector<std::size_t> validation;
        std::size_t seen = 0;
        for (std::size_t i = 0; i < map.count.size(); ++i)
            if (map.count[i] > 0 && seen++ % 7 == 3) validation.push_back(i);
        auto [lc, ld] =
            grid_search_lambda(map, default_lambda_candidates(), validation, cfg);
        cfg.lambda_curl = lc;
        cfg.lambda_div = ld;
    }
    ReconstructionResult res = reconstruct(map, cfg);
    write_voxel_map(o.out, res.field);
    emit({{"command", "reconstruct"},
          {"iterations", res.iterations},
          {"converged", res.converged},
          {"energy", res.energy.empty() ? 0.0 : res.energy.back()},
          {"lambda_curl", cfg.lambda_curl},
          {"lambda_div", cfg.lambda_div},
          {"out", o.out}});
}

struct FitBehaviorOpts {
    std::string pose, out;
    double gap_s = 0.1;
};

void run_fit_behavior(const FitBehaviorOpts& o) {
    PoseLog poses = read_pose_csv(o.pose);
    auto tracks = tracks_from_poses(poses, o.gap_s);
    BehaviorModel model = fit_behavior_model(tracks);
    write_behavior_model(o.out, model);
    std::size_t windows = 0;
    for (const auto& t : tracks) windows += t.size() - 1;
    emit({{"command", "fit-behavior"},
          {"tracks", tracks.size()},
          {"windows", windows},
          {"ridge_fallback", model.ridge_fallback},
          {"out", o.out}});
}

struct DetectOpts {
    std::string mag, accel, gyro, out;
    StrokeWindowConfig window_cfg;
    ImuPeakConfig peak_cfg;
    double auto_quiet_begin = -1.0;
    double auto_quiet_end = -1.0;
};

void run_detect(const DetectOpts& o) {
    MagLog mag = read_mag_csv(o.mag);
    ImuStream accel = read_accel_csv(o.accel);
    ImuStream gyro = read_gyro_csv(o.gyro);
    ImuPeakConfig peaks = o.peak_cfg;
    if (o.auto_quiet_end > o.auto_quiet_begin && o.auto_quiet_begin >= 0.0) {
        peaks = robust_peak_config(accel, gyro, o.auto_quiet_begin, o.auto_quiet_end);
        peaks.search_margin = o.peak_cfg.search_margin;
    }
    auto rough = rough_strokes(mag, o.window_cfg);
    auto refined = refine_strokes(rough, accel, gyro, peaks);
    write_intervals_csv(o.out, refined);
    emit({{"command", "detect"},
          {"rough", rough.size()},
          {"strokes", refined.size()},
          {"accel_threshold", peaks.accel_threshold},
          {"gyro_threshold", peaks.gyro_threshold},
          {"out", o.out}});
}

struct TrackOpts {
    std::string map, mag, strokes, behavior, out;
    TrackerConfig cfg;
    std::uint64_t seed = 0;
    double quiet_begin = 0.0;
    double quiet_end = 1.5;
};

void run_track(const TrackOpts& o) {
    ScreenConfig screen;
    VoxelField map = read_voxel_map(o.map);
    MagLog mag = read_mag_csv(o.mag);
    auto strokes = read_intervals_csv(o.strokes);
    std::optional<BehaviorModel> behavior;
    if (!o.behavior.empty()) behavior = read_behavior_model(o.behavior);
    Vec3 amb = estimate_ambient(mag, o.quiet_begin, o.quiet_end);

    Trace all;
    int restarts = 0;
    std::size_t n_final = 0;
    for (std::size_t i = 0; i < strokes.size(); ++i) {
        TrackResult r =
            track_stroke(map, screen, mag, strokes[i], amb, behavior, o.cfg, o.seed + i);
        all.insert(all.end(), r.trace.begin(), r.trace.end());
        restarts += r.restarts;
        n_final = r.n_final;
    }
    write_trace_csv(o.out, all);
    emit({{"command", "track"},
          {"strokes", strokes.size()},
          {"points", all.size()},
          {"restarts", restarts},
          {"n_final", n_final},
          {"out", o.out}});
}

void run_track_2d(const TrackOpts& o) {
    ScreenConfig screen;
    ScreenMap2D map = read_screen_map(o.map);
    MagLog mag = read_mag_csv(o.mag);
    auto strokes = read_intervals_csv(o.strokes);
    Vec3 amb = estimate_ambient(mag, o.quiet_begin, o.quiet_end);

    Trace all;
    int restarts = 0;
    for (std::size_t i = 0; i < strokes.size(); ++i) {
        TrackResult r = track_stroke_2d(map, screen, mag, strokes[i], amb, o.cfg, o.seed + i);
        all.insert(all.end(), r.trace.begin(), r.trace.end());
        restarts += r.restarts;
    }
    write_trace_csv(o.out, all);
    emit({{"command", "track2d"},
          {"strokes", strokes.size()},
          {"points", all.size()},
          {"restarts", restarts},
          {"out", o.out}});
}

struct KnnOpts {
    std::string train_mag, train_pose, mag, strokes, out;
    int k = 0; // 0 selects k by grid search
};

void run_knn(const KnnOpts& o) {
    MagLog train_mag = read_mag_csv(o.train_mag);
    PoseLog train_pose = read_pose_csv(o.train_pose);
    std::optional<int> fixed_k;
    if (o.k > 0) fixed_k = o.k;
    KnnModel model = knn_fit(train_mag, train_pose, fixed_k);

    MagLog mag = read_mag_csv(o.mag);
    Trace trace = knn_track(model, mag);
    if (!o.strokes.empty()) {
        auto iv = read_intervals_csv(o.strokes);
        Trace kept;
        for (const TracePoint& p : trace)
            for (const StrokeInterval& s : iv)
                if (p.t >= s.begin_s && p.t <= s.end_s) {
                    kept.push_back(p);
                    break;
                }
        trace = std::move(kept);
    }
    write_trace_csv(o.out, trace);
    emit({{"command", "knn"},
          {"k", model.k},
          {"windows", model.features.size()},
          {"points", trace.size()},
          {"out", o.out}});
}

struct EvalOpts {
    std::string trace, truth, out;
};

void run_eval_cmd(const EvalOpts& o) {
    EvalMetrics m = run_eval(read_trace_csv(o.trace), read_trace_csv(o.truth));
    json record{{"command", "eval"},
                {"raw_rmse_mm", m.raw_rmse_mm},
                {"aligned_rmse_mm", m.aligned_rmse_mm},
                {"scale", m.scale},
                {"rotation_deg", m.rotation_deg},
                {"tx_mm", m.tx_mm},
                {"ty_mm", m.ty_mm},
                {"samples", m.samples}};
    if (!o.out.empty()) {
        std::ofstream f(o.out);
        if (!f) throw std::runtime_error("cannot open for writing: " + o.out);
        f << record.dump() << "\n";
    }
    emit(record);
}

struct RenderOpts {
    std::vector<std::string> traces;
    std::string out;
    double scale = 4.0;
};

void run_render(const RenderOpts& o) {
    ScreenConfig screen;
    std::vector<Trace> traces;
    for (const std::string& p : o.traces) traces.push_back(read_trace_csv(p));
    render_trace(traces, screen, o.out, o.scale);
    emit({{"command", "render"}, {"traces", traces.size()}, {"out", o.out}});
}

void add_tracker_flags(CLI::App* cmd, TrackerConfig& cfg) {
    cmd->add_option("--n-init", cfg.n_init, "Initialization draws");
    cmd->add_option("--n-max", cfg.n_max, "Particle cap after init and resampling");
    cmd->add_option("--sigma", cfg.sigma_uT, "Measurement noise scale, uT");
    cmd->add_option("--pos-noise", cfg.pos_noise_mm, "Per-step position noise, mm");
    cmd->add_option("--quat-noise", cfg.quat_noise, "Per-step quaternion noise");
    cmd->add_option("--n-min", cfg.kld.n_min, "Minimum particles after resampling");
    cmd->add_option("--kld-epsilon", cfg.kld.epsilon, "KLD bound");
    cmd->add_option("--kld-delta", cfg.kld.delta, "KLD confidence complement");
    cmd->add_option("--pos-bin", cfg.kld.pos_bin_mm, "KLD position bin, mm");
    cmd->add_option("--quat-bin", cfg.kld.quat_bin, "KLD quaternion bin");
    cmd->add_option("--resample-batch", cfg.resample_batch, "Resampling batch size");
    cmd->add_option("--max-redraws", cfg.max_redraws, "Proposal redraw attempts");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"magnetometer side-channel stylus tracking toolkit"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Read option defaults from an INI file");

    SynthOpts sy;
    auto* synth = app.add_subcommand("synth", "Simulate a writing or mapping session");
    synth->add_option("--script", sy.script, "glyph | wardrive | scan2d")
        ->check(CLI::IsMember({"glyph", "wardrive", "scan2d"}));
    synth->add_option("--glyph", sy.glyph, "Glyph name for script=glyph");
    synth->add_option("--grid", sy.grid, "Input-region cell 1..3")->check(CLI::Range(1, 3));
    synth->add_option("--size", sy.size_mm, "Glyph size, mm");
    synth->add_option("--speed", sy.speed, "Writing speed, mm/s");
    synth->add_option("--duration", sy.duration, "Wardrive duration, s");
    synth->add_option("--pitch", sy.pitch, "Scan line pitch, mm");
    synth->add_option("--scan-speed", sy.scan_speed, "Scan speed, mm/s");
    synth->add_option("--alt-base", sy.profile.altitude_base, "Altitude base, deg");
    synth->add_option("--alt-amp", sy.profile.altitude_amp, "Altitude swing, deg");
    synth->add_option("--az-base", sy.profile.azimuth_base, "Azimuth base, deg");
    synth->add_option("--az-amp", sy.profile.azimuth_amp, "Azimuth swing, deg");
    synth->add_option("--roll-base", sy.profile.roll_base, "Roll base, deg");
    synth->add_option("--roll-amp", sy.profile.roll_amp, "Roll swing, deg");
    synth->add_option("--phase", sy.profile.phase, "Attitude profile phase");
    synth->add_option("--noise-mag", sy.noise_mag, "Magnetometer noise sigma, uT");
    synth->add_option("--noise-accel", sy.noise_accel, "Accelerometer noise sigma");
    synth->add_option("--noise-gyro", sy.noise_gyro, "Gyroscope noise sigma");
    synth->add_option("--seed", sy.seed, "RNG seed")->required();
    synth->add_option("--out-dir", sy.out_dir, "Output directory");
    synth->callback([&] { run_synth(sy); });

    BuildMapOpts bm;
    auto* build = app.add_subcommand("build-map", "Deposit war-driving rows into a map");
    build->add_option("--mag", bm.mag, "Magnetometer CSV")->required();
    build->add_option("--touch", bm.touch, "Touch CSV")->required();
    build->add_option("--pose", bm.pose, "Pose CSV")->required();
    build->add_option("--out", bm.out, "Output map JSON")->required();
    build->add_option("--mode", bm.mode, "3d | 2d")->check(CLI::IsMember({"3d", "2d"}));
    build->add_option("--cell", bm.cell, "Cell size, mm");
    build->add_option("--quiet-begin", bm.quiet_begin, "Ambient window start, s");
    build->add_option("--quiet-end", bm.quiet_end, "Ambient window end, s");
    build->callback([&] { run_build_map(bm); });

    ReconstructOpts rc;
    auto* recon = app.add_subcommand("reconstruct", "Fill and denoise a voxel map");
    recon->add_option("--in", rc.in, "Input voxel map JSON")->required();
    recon->add_option("--out", rc.out, "Output voxel map JSON")->required();
    recon->add_option("--lambda-curl", rc.cfg.lambda_curl, "Curl penalty weight");
    recon->add_option("--lambda-div", rc.cfg.lambda_div, "Divergence penalty weight");
    recon->add_option("--max-iters", rc.cfg.max_iters, "Iteration cap");
    recon->add_option("--tol", rc.cfg.tol, "Convergence tolerance");
    recon->add_flag("--grid-search", rc.grid_search, "Pick weights on held-out cells");
    recon->callback([&] { run_reconstruct(rc); });

    FitBehaviorOpts fb;
    auto* fit = app.add_subcommand("fit-behavior", "Fit the movement model from poses");
    fit->add_option("--pose", fb.pose, "Pose CSV")->required();
    fit->add_option("--out", fb.out, "Output model JSON")->required();
    fit->add_option("--gap", fb.gap_s, "Track split gap, s");
    fit->callback([&] { run_fit_behavior(fb); });

    DetectOpts dt;
    auto* detect = app.add_subcommand("detect", "Detect stroke intervals");
    detect->add_option("--mag", dt.mag, "Magnetometer CSV")->required();
    detect->add_option("--accel", dt.accel, "Accelerometer CSV")->required();
    detect->add_option("--gyro", dt.gyro, "Gyroscope CSV")->required();
    detect->add_option("--out", dt.out, "Output intervals CSV")->required();
    detect->add_option("--window", dt.window_cfg.window, "Variance window, samples");
    detect->add_option("--threshold", dt.window_cfg.variance_threshold,
                       "Variance threshold, uT^2");
    detect->add_option("--accel-threshold", dt.peak_cfg.accel_threshold, "Peak accel, m/s^2");
    detect->add_option("--gyro-threshold", dt.peak_cfg.gyro_threshold, "Peak gyro, rad/s");
    detect->add_option("--margin", dt.peak_cfg.search_margin, "Search margin, IMU samples");
    detect->add_option("--auto-quiet-begin", dt.auto_quiet_begin,
                       "Derive IMU thresholds: quiet start, s");
    detect->add_option("--auto-quiet-end", dt.auto_quiet_end,
                       "Derive IMU thresholds: quiet end, s");
    detect->callback([&] { run_detect(dt); });

    TrackOpts tk;
    auto* track = app.add_subcommand("track", "Run the 6-dof particle filter");
    track->add_option("--map", tk.map, "Voxel map JSON")->required();
    track->add_option("--mag", tk.mag, "Magnetometer CSV")->required();
    track->add_option("--strokes", tk.strokes, "Stroke intervals CSV")->required();
    track->add_option("--behavior", tk.behavior, "Movement model JSON (optional)");
    track->add_option("--out", tk.out, "Output trace CSV")->required();
    track->add_option("--seed", tk.seed, "RNG seed")->required();
    track->add_option("--quiet-begin", tk.quiet_begin, "Ambient window start, s");
    track->add_option("--quiet-end", tk.quiet_end, "Ambient window end, s");
    add_tracker_flags(track, tk.cfg);
    track->callback([&] { run_track(tk); });

    TrackOpts t2;
    auto* track2d = app.add_subcommand("track2d", "Run the screen-plane filter");
    track2d->add_option("--map", t2.map, "Screen map JSON")->required();
    track2d->add_option("--mag", t2.mag, "Magnetometer CSV")->required();
    track2d->add_option("--strokes", t2.strokes, "Stroke intervals CSV")->required();
    track2d->add_option("--out", t2.out, "Output trace CSV")->required();
    track2d->add_option("--seed", t2.seed, "RNG seed")->required();
    track2d->add_option("--quiet-begin", t2.quiet_begin, "Ambient window start, s");
    track2d->add_option("--quiet-end", t2.quiet_end, "Ambient window end, s");
    add_tracker_flags(track2d, t2.cfg);
    track2d->callback([&] { run_track_2d(t2); });

    KnnOpts kn;
    auto* knn = app.add_subcommand("knn", "Nearest-neighbor baseline tracker");
    knn->add_option("--train-mag", kn.train_mag, "Training magnetometer CSV")->required();
    knn->add_option("--train-pose", kn.train_pose, "Training pose CSV")->required();
    knn->add_option("--mag", kn.mag, "Query magnetometer CSV")->required();
    knn->add_option("--strokes", kn.strokes, "Restrict output to these intervals");
    knn->add_option("--out", kn.out, "Output trace CSV")->required();
    knn->add_option("--k", kn.k, "Neighbors; 0 grid-searches 1..5");
    knn->callback([&] { run_knn(kn); });

    EvalOpts ev;
    auto* eval = app.add_subcommand("eval", "Score a trace against the truth");
    eval->add_option("--trace", ev.trace, "Recovered trace CSV")->required();
    eval->add_option("--truth", ev.truth, "Ground-truth trace CSV")->required();
    eval->add_option("--out", ev.out, "Also write the metrics JSON here");
    eval->callback([&] { run_eval_cmd(ev); });

    RenderOpts rd;
    auto* render = app.add_subcommand("render", "Render traces to SVG");
    render->add_option("traces", rd.traces, "Trace CSV paths");
    render->add_option("--out", rd.out, "Output SVG path")->required();
    render->add_option("--scale", rd.scale, "Document units per mm");
    render->callback([&] { run_render(rd); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        std::cout << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        std::cerr << json{{"error", e.what()}}.dump() << "\n";
        int code = e.get_exit_code();
        return code == 0 ? 1 : code;
    } catch (const std::exception& e) {
        std::cerr << json{{"error", e.what()}}.dump() << "\n";
        return 1;
    }
    return 0;
}
