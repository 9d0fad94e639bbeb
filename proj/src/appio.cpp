#include "shapetrack/appio.hpp"

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "shapetrack/config.hpp"

namespace fs = std::filesystem;

namespace shapetrack {

namespace {

bool is_raster_file(const fs::path& p) {
    std::string ext = p.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".bmp" || ext == ".pgm";
}

// Glob with '*' and '?' (filename part only).
bool glob_match(const std::string& pattern, const std::string& name) {
    size_t p = 0, n = 0, star = std::string::npos, star_n = 0;
    while (n < name.size()) {
        if (p < pattern.size() && (pattern[p] == '?' || pattern[p] == name[n])) {
            ++p;
            ++n;
        } else if (p < pattern.size() && pattern[p] == '*') {
            star = p++;
            star_n = n;
        } else if (star != std::string::npos) {
            p = star + 1;
            n = ++star_n;
        } else {
            return false;
        }
    }
    while (p < pattern.size() && pattern[p] == '*') ++p;
    return p == pattern.size();
}

}  // namespace

std::vector<std::string> resolve_sequence(const std::string& source) {
    std::vector<std::string> frames;

    if (source.find('*') != std::string::npos || source.find('?') != std::string::npos) {
        const fs::path pattern(source);
        const fs::path dir = pattern.parent_path().empty() ? "." : pattern.parent_path();
        const std::string name_pattern = pattern.filename().string();
        if (!fs::is_directory(dir)) {
            throw std::runtime_error("resolve_sequence: no such directory: " + dir.string());
        }
        for (const auto& entry : fs::directory_iterator(dir)) {
            if (entry.is_regular_file() && glob_match(name_pattern, entry.path().filename().string())) {
                frames.push_back(entry.path().string());
            }
        }
    } else if (fs::is_directory(source)) {
        for (const auto& entry : fs::directory_iterator(source)) {
            if (entry.is_regular_file() && is_raster_file(entry.path())) {
                frames.push_back(entry.path().string());
            }
        }
    } else if (fs::is_regular_file(source)) {
        std::ifstream in(source);
        std::string line;
        while (std::getline(in, line)) {
            while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
            if (!line.empty()) frames.push_back(line);
        }
    } else {
        throw std::runtime_error("resolve_sequence: no such file or directory: " + source);
    }

    std::sort(frames.begin(), frames.end());
    if (frames.empty()) {
        throw std::runtime_error("resolve_sequence: no frames found in " + source);
    }
    return frames;
}

void write_poses_csv(const std::vector<FrameResult>& results, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_poses_csv: cannot open " + path);
    out << frame_result_csv_header() << "\n";
    for (const auto& r : results) out << frame_result_csv_row(r) << "\n";
}

std::vector<FrameResult> read_poses_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_poses_csv: cannot open " + path);
    std::vector<FrameResult> results;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_no == 1 || line.empty()) continue;  // header
        std::istringstream ss(line);
        std::string field;
        FrameResult r;
        try {
            std::getline(ss, field, ',');
            r.frame_index = std::stoi(field);
            std::getline(ss, field, ',');
            if (field == "tracked") r.status = TrackStatus::Tracked;
            else if (field == "lost") r.status = TrackStatus::Lost;
            else throw std::runtime_error("bad status " + field);
            std::getline(ss, field, ',');
            r.pose.tx = std::stod(field);
            std::getline(ss, field, ',');
            r.pose.ty = std::stod(field);
            std::getline(ss, field, ',');
            r.pose.theta = std::stod(field);
            std::getline(ss, field, ',');
            r.pose.sigma = std::stod(field);
            std::getline(ss, field, ',');
            r.score = std::stod(field);
            std::getline(ss, field, ',');
            r.points_used = std::stoi(field);
            if (std::getline(ss, field, ',')) r.timings.us_total = std::stoll(field);
        } catch (const std::exception& e) {
            throw std::runtime_error("read_poses_csv: line " + std::to_string(line_no) + ": " +
                                     e.what());
        }
        results.push_back(r);
    }
    return results;
}

GrayImage render_overlay(const GrayImage& frame, const ShapeModel& model, const Pose& pose) {
    GrayImage out = frame;
    auto put = [&](int x, int y, double v) {
        if (out.in_bounds(x, y)) out.at(x, y) = v;
    };

    const Rect box = bbox_from_model(model, pose);
    const int x0 = static_cast<int>(std::lround(box.x));
    const int y0 = static_cast<int>(std::lround(box.y));
    const int x1 = static_cast<int>(std::lround(box.x2()));
    const int y1 = static_cast<int>(std::lround(box.y2()));
    for (int x = x0; x <= x1; ++x) {
        put(x, y0, 255.0);
        put(x, y1, 255.0);
    }
    for (int y = y0; y <= y1; ++y) {
        put(x0, y, 255.0);
        put(x1, y, 255.0);
    }
    for (const auto& mp : model.points) {
        const Vec2 p = transform_point(mp.p, pose);
        put(static_cast<int>(std::lround(p.x)), static_cast<int>(std::lround(p.y)), 255.0);
    }
    return out;
}

SynthSpec load_synth_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("synth spec: cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw std::runtime_error(std::string("synth spec: invalid JSON: ") + e.what());
    }

    SynthSpec spec;
    if (!j.contains("template")) throw std::runtime_error("synth spec: missing \"template\"");
    fs::path tmpl_path = j["template"].get<std::string>();
    if (tmpl_path.is_relative()) tmpl_path = fs::path(path).parent_path() / tmpl_path;
    spec.tmpl = load_frame(tmpl_path.string());

    if (j.contains("content")) {
        const auto& c = j["content"];
        spec.content = {c[0].get<double>(), c[1].get<double>(), c[2].get<double>(),
                        c[3].get<double>()};
    }
    spec.frame_width = j.value("frame_width", 0);
    spec.frame_height = j.value("frame_height", 0);
    spec.noise_sigma = j.value("noise_sigma", 0.0);
    spec.seed = j.value("seed", 1ull);

    auto parse_pose = [](const nlohmann::json& v) {
        return Pose{v[0].get<double>(), v[1].get<double>(), parse_angle_value(v[2]),
                    v[3].get<double>()};
    };

    if (!j.contains("trajectory")) throw std::runtime_error("synth spec: missing \"trajectory\"");
    const auto& traj = j["trajectory"];
    if (traj.is_array()) {
        for (const auto& v : traj) spec.trajectory.push_back(parse_pose(v));
    } else if (traj.is_object() && traj.value("type", "") == "linear") {
        const int frames = traj.at("frames").get<int>();
        if (frames < 1) throw std::runtime_error("synth spec: trajectory.frames must be >= 1");
        const Pose from = parse_pose(traj.at("from"));
        const Pose to = parse_pose(traj.at("to"));
        for (int t = 0; t < frames; ++t) {
            const double a = frames > 1 ? static_cast<double>(t) / (frames - 1) : 0.0;
            spec.trajectory.push_back({from.tx + a * (to.tx - from.tx),
                                       from.ty + a * (to.ty - from.ty),
                                       from.theta + a * (to.theta - from.theta),
                                       from.sigma + a * (to.sigma - from.sigma)});
        }
    } else {
        throw std::runtime_error("synth spec: trajectory must be a pose list or a linear ramp");
    }

    if (j.contains("illum")) {
        for (const auto& v : j["illum"]) {
            spec.illum.push_back({v[0].get<double>(), v[1].get<double>()});
        }
    }
    if (j.contains("occluders")) {
        for (const auto& v : j["occluders"]) {
            Occluder occ;
            occ.first_frame = v.at("first").get<int>();
            occ.last_frame = v.at("last").get<int>();
            const auto& r = v.at("rect");
            occ.rect = {r[0].get<double>(), r[1].get<double>(), r[2].get<double>(),
                        r[3].get<double>()};
            occ.fill = v.value("fill", 0.0);
            spec.occluders.push_back(occ);
        }
    }
    return spec;
}

}  // namespace shapetrack
