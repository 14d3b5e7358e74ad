// SPDX-License-Identifier: Apache-2.0

#include "pentrack/io.hpp"

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace pentrack {
namespace {

using nlohmann::json;

std::ofstream open_out(const std::string& path) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open for writing: " + path);
    return f;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open for reading: " + path);
    return f;
}

// %.17g round-trips every double exactly.
std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Splits one CSV line into exactly n numeric fields.
void parse_row(const std::string& line, const std::string& path, double* out, int n) {
    const char* p = line.c_str();
    for (int i = 0; i < n; ++i) {
        char* end = nullptr;
        out[i] = std::strtod(p, &end);
        if (end == p) throw std::runtime_error("bad numeric field in " + path + ": " + line);
        p = end;
        if (i + 1 < n) {
            while (*p == ' ') ++p;
            if (*p != ',') throw std::runtime_error("expected comma in " + path + ": " + line);
            ++p;
        }
    }
}

void expect_header(std::ifstream& f, const std::string& path, const std::string& want) {
    std::string line;
    if (!std::getline(f, line)) throw std::runtime_error("empty file: " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != want)
        throw std::runtime_error("unexpected header in " + path + ": got '" + line +
                                 "', want '" + want + "'");
}

void write_stream3(const std::string& path, const char* header,
                   const std::vector<Sample3>& log) {
    std::ofstream f = open_out(path);
    f << header << "\n";
    for (const Sample3& s : log)
        f << num(s.t) << ',' << num(s.v.x) << ',' << num(s.v.y) << ',' << num(s.v.z) << "\n";
    if (!f) throw std::runtime_error("write failed: " + path);
}

std::vector<Sample3> read_stream3(const std::string& path, const char* header) {
    std::ifstream f = open_in(path);
    expect_header(f, path, header);
    std::vector<Sample3> log;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        double v[4];
        parse_row(line, path, v, 4);
        log.push_back({v[0], {v[1], v[2], v[3]}});
    }
    return log;
}

json vec3_json(Vec3 v) { return json::array({v.x, v.y, v.z}); }

void check_format(const json& j, const std::string& path, const char* tag) {
    if (!j.contains("format") || j["format"] != tag || !j.contains("version") ||
        j["version"] != 1)
        throw std::runtime_error(path + ": not a " + std::string(tag) + " v1 document");
}

json load_json(const std::string& path) {
    std::ifstream f = open_in(path);
    json j;
    try {
        f >> j;
    } catch (const json::exception& e) {
        throw std::runtime_error(path + ": " + e.what());
    }
    return j;
}

} // namespace

void write_mag_csv(const std::string& path, const MagLog& log) {
    write_stream3(path, "t_s,mx_uT,my_uT,mz_uT", log);
}
MagLog read_mag_csv(const std::string& path) {
    return read_stream3(path, "t_s,mx_uT,my_uT,mz_uT");
}

void write_accel_csv(const std::string& path, const ImuStream& log) {
    write_stream3(path, "t_s,ax,ay,az", log);
}
ImuStream read_accel_csv(const std::string& path) {
    return read_stream3(path, "t_s,ax,ay,az");
}

void write_gyro_csv(const std::string& path, const ImuStream& log) {
    write_stream3(path, "t_s,gx,gy,gz", log);
}
ImuStream read_gyro_csv(const std::string& path) {
    return read_stream3(path, "t_s,gx,gy,gz");
}

void write_touch_csv(const std::string& path, const TouchLog& log) {
    std::ofstream f = open_out(path);
    f << "t_s,x_mm,y_mm\n";
    for (const TouchSample& s : log)
        f << num(s.t) << ',' << num(s.x) << ',' << num(s.y) << "\n";
    if (!f) throw std::runtime_error("write failed: " + path);
}

TouchLog read_touch_csv(const std::string& path) {
    std::ifstream f = open_in(path);
    expect_header(f, path, "t_s,x_mm,y_mm");
    TouchLog log;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        double v[3];
        parse_row(line, path, v, 3);
        log.push_back({v[0], v[1], v[2]});
    }
    return log;
}

void write_pose_csv(const std::string& path, const PoseLog& log) {
    std::ofstream f = open_out(path);
    f << "t_s,x_mm,y_mm,qw,qx,qy,qz\n";
    for (const PoseSample& s : log)
        f << num(s.t) << ',' << num(s.pose.tip.x) << ',' << num(s.pose.tip.y) << ','
          << num(s.pose.orientation.w) << ',' << num(s.pose.orientation.x) << ','
          << num(s.pose.orientation.y) << ',' << num(s.pose.orientation.z) << "\n";
    if (!f) throw std::runtime_error("write failed: " + path);
}

PoseLog read_pose_csv(const std::string& path) {
    std::ifstream f = open_in(path);
    expect_header(f, path, "t_s,x_mm,y_mm,qw,qx,qy,qz");
    PoseLog log;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        double v[7];
        parse_row(line, path, v, 7);
        log.push_back({v[0], {{v[1], v[2]}, {v[3], v[4], v[5], v[6]}}});
    }
    return log;
}

void write_trace_csv(const std::string& path, const Trace& trace) {
    std::ofstream f = open_out(path);
    f << "t_s,x_mm,y_mm\n";
    for (const TracePoint& p : trace)
        f << num(p.t) << ',' << num(p.x) << ',' << num(p.y) << "\n";
    if (!f) throw std::runtime_error("write failed: " + path);
}

Trace read_trace_csv(const std::string& path) {
    std::ifstream f = open_in(path);
    expect_header(f, path, "t_s,x_mm,y_mm");
    Trace trace;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        double v[3];
        parse_row(line, path, v, 3);
        trace.push_back({v[0], v[1], v[2]});
    }
    return trace;
}

void write_intervals_csv(const std::string& path, const std::vector<StrokeInterval>& iv) {
    std::ofstream f = open_out(path);
    f << "begin_s,end_s\n";
    for (const StrokeInterval& s : iv) f << num(s.begin_s) << ',' << num(s.end_s) << "\n";
    if (!f) throw std::runtime_error("write failed: " + path);
}

std::vector<StrokeInterval> read_intervals_csv(const std::string& path) {
    std::ifstream f = open_in(path);
    expect_header(f, path, "begin_s,end_s");
    std::vector<StrokeInterval> iv;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty()) continue;
        double v[2];
        parse_row(line, path, v, 2);
        iv.push_back({v[0], v[1]});
    }
    return iv;
}

void write_voxel_map(const std::string& path, const VoxelField& map) {
    json j;
    j["format"] = "pentrack-voxel-map";
    j["version"] = 1;
    j["origin"] = vec3_json(map.origin);
    j["cell_mm"] = map.cell_mm;
    j["nx"] = map.nx;
    j["ny"] = map.ny;
    j["nz"] = map.nz;
    json mean = json::array();
    for (const Vec3& v : map.mean) {
        mean.push_back(v.x);
        mean.push_back(v.y);
        mean.push_back(v.z);
    }
    j["mean"] = std::move(mean);
    j["count"] = map.count;
    std::ofstream f = open_out(path);
    f << j.dump() << "\n";
    if (!f) throw std::runtime_error("write failed: " + path);
}

VoxelField read_voxel_map(const std::string& path) {
    json j = load_json(path);
    check_format(j, path, "pentrack-voxel-map");
    VoxelField map;
    map.origin = {j["origin"][0], j["origin"][1], j["origin"][2]};
    map.cell_mm = j["cell_mm"];
    map.nx = j["nx"];
    map.ny = j["ny"];
    map.nz = j["nz"];
    const auto& mean = j["mean"];
    if (mean.size() != map.cells() * 3)
        throw std::runtime_error(path + ": mean array size mismatch");
    map.mean.resize(map.cells());
    for (std::size_t i = 0; i < map.mean.size(); ++i)
        map.mean[i] = {mean[3 * i], mean[3 * i + 1], mean[3 * i + 2]};
    map.count = j["count"].get<std::vector<int>>();
    if (map.count.size() != map.cells())
        throw std::runtime_error(path + ": count array size mismatch");
    return map;
}

void write_screen_map(const std::string& path, const ScreenMap2D& map) {
    json j;
    j["format"] = "pentrack-screen-map";
    j["version"] = 1;
    j["origin"] = json::array({map.origin.x, map.origin.y});
    j["cell_mm"] = map.cell_mm;
    j["nx"] = map.nx;
    j["ny"] = map.ny;
    json mean = json::array();
    for (const Vec3& v : map.mean) {
        mean.push_back(v.x);
        mean.push_back(v.y);
        mean.push_back(v.z);
    }
    j["mean"] = std::move(mean);
    j["count"] = map.count;
    std::ofstream f = open_out(path);
    f << j.dump() << "\n";
    if (!f) throw std::runtime_error("write failed: " + path);
}

ScreenMap2D read_screen_map(const std::string& path) {
    json j = load_json(path);
    check_format(j, path, "pentrack-screen-map");
    ScreenMap2D map;
    map.origin = {j["origin"][0], j["origin"][1]};
    map.cell_mm = j["cell_mm"];
    map.nx = j["nx"];
    map.ny = j["ny"];
    const std::size_t cells = static_cast<std::size_t>(map.nx) * map.ny;
    const auto& mean = j["mean"];
    if (mean.size() != cells * 3) throw std::runtime_error(path + ": mean array size mismatch");
    map.mean.resize(cells);
    for (std::size_t i = 0; i < cells; ++i)
        map.mean[i] = {mean[3 * i], mean[3 * i + 1], mean[3 * i + 2]};
    map.count = j["count"].get<std::vector<int>>();
    if (map.count.size() != cells) throw std::runtime_error(path + ": count array size mismatch");
    return map;
}

void write_behavior_model(const std::string& path, const BehaviorModel& model) {
    json j;
    j["format"] = "pentrack-behavior";
    j["version"] = 1;
    j["ridge_fallback"] = model.ridge_fallback;
    json coef = json::array();
    for (const auto& row : model.coef) coef.push_back(row);
    j["coef"] = std::move(coef);
    std::ofstream f = open_out(path);
    f << j.dump() << "\n";
    if (!f) throw std::runtime_error("write failed: " + path);
}

BehaviorModel read_behavior_model(const std::string& path) {
    json j = load_json(path);
    check_format(j, path, "pentrack-behavior");
    BehaviorModel model;
    model.ridge_fallback = j["ridge_fallback"];
    const auto& coef = j["coef"];
    if (coef.size() != 6) throw std::runtime_error(path + ": coef must have 6 rows");
    for (std::size_t o = 0; o < 6; ++o) {
        if (coef[o].size() != 19)
            throw std::runtime_error(path + ": coef rows must have 19 entries");
        for (std::size_t i = 0; i < 19; ++i) model.coef[o][i] = coef[o][i];
    }
    return model;
}

} // namespace pentrack
