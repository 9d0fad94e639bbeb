#include "shapetrack/bench.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace shapetrack {

Rect GtRegion::bbox() const {
    if (!is_polygon) return rect;
    double min_x = poly[0].x, max_x = poly[0].x, min_y = poly[0].y, max_y = poly[0].y;
    for (const Vec2& p : poly) {
        min_x = std::min(min_x, p.x);
        max_x = std::max(max_x, p.x);
        min_y = std::min(min_y, p.y);
        max_y = std::max(max_y, p.y);
    }
    return {min_x, min_y, max_x - min_x, max_y - min_y};
}

namespace {

std::vector<double> parse_fields(const std::string& line, int line_no) {
    std::vector<double> out;
    const char* p = line.data();
    const char* end = p + line.size();
    while (p < end) {
        while (p < end && (*p == ',' || *p == '\t' || *p == ' ' || *p == '\r')) ++p;
        if (p >= end) break;
        double v = 0.0;
        const auto [next, ec] = std::from_chars(p, end, v);
        if (ec != std::errc{}) {
            throw GtParseError("ground truth: bad number at line " + std::to_string(line_no),
                               line_no);
        }
        out.push_back(v);
        p = next;
    }
    return out;
}

std::string format_double(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

}  // namespace

GroundTruthTrack parse_ground_truth_text(const std::string& text, GtFormat format) {
    GroundTruthTrack track;
    track.format = format;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r\n") == std::string::npos) continue;
        const auto fields = parse_fields(line, line_no);
        GtRegion region;
        if (format == GtFormat::Otb) {
            if (fields.size() != 4) {
                throw GtParseError("ground truth: expected x,y,w,h at line " +
                                       std::to_string(line_no) + " (got " +
                                       std::to_string(fields.size()) + " fields)",
                                   line_no);
            }
            // OTB corners are 1-based.
            region.rect = {fields[0] - 1.0, fields[1] - 1.0, fields[2], fields[3]};
        } else {
            if (fields.size() != 8) {
                throw GtParseError("ground truth: expected 8 polygon coordinates at line " +
                                       std::to_string(line_no) + " (got " +
                                       std::to_string(fields.size()) + " fields)",
                                   line_no);
            }
            region.is_polygon = true;
            for (int i = 0; i < 4; ++i) {
                region.poly[static_cast<size_t>(i)] = {fields[2 * i] - 1.0,
                                                       fields[2 * i + 1] - 1.0};
            }
        }
        track.regions.push_back(region);
    }
    return track;
}

GroundTruthTrack parse_ground_truth(const std::string& path, GtFormat format) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("parse_ground_truth: cannot open " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_ground_truth_text(text, format);
}

std::string serialize_ground_truth(const GroundTruthTrack& track) {
    std::string out;
    for (const auto& region : track.regions) {
        if (track.format == GtFormat::Otb) {
            out += format_double(region.rect.x + 1.0);
            out += ',';
            out += format_double(region.rect.y + 1.0);
            out += ',';
            out += format_double(region.rect.w);
            out += ',';
            out += format_double(region.rect.h);
        } else {
            for (int i = 0; i < 4; ++i) {
                if (i) out += ',';
                out += format_double(region.poly[static_cast<size_t>(i)].x + 1.0);
                out += ',';
                out += format_double(region.poly[static_cast<size_t>(i)].y + 1.0);
            }
        }
        out += '\n';
    }
    return out;
}

void write_ground_truth(const GroundTruthTrack& track, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_ground_truth: cannot open " + path);
    out << serialize_ground_truth(track);
}

Rect bbox_from_model(const ShapeModel& model, const Pose& pose) {
    double min_x = 1e300, min_y = 1e300, max_x = -1e300, max_y = -1e300;
    for (const auto& mp : model.points) {
        const Vec2 p = transform_point(mp.p, pose);
        min_x = std::min(min_x, p.x);
        min_y = std::min(min_y, p.y);
        max_x = std::max(max_x, p.x);
        max_y = std::max(max_y, p.y);
    }
    if (model.points.empty()) return {};
    return {min_x, min_y, max_x - min_x, max_y - min_y};
}

double iou(const Rect& a, const Rect& b) {
    const double ix = std::min(a.x2(), b.x2()) - std::max(a.x, b.x);
    const double iy = std::min(a.y2(), b.y2()) - std::max(a.y, b.y);
    const double inter = (ix > 0.0 && iy > 0.0) ? ix * iy : 0.0;
    const double uni = a.area() + b.area() - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

SequenceReport sequence_report(std::span<const FrameResult> results, const GroundTruthTrack& gt,
                               const ShapeModel& model) {
    if (results.size() != gt.regions.size()) {
        throw std::runtime_error("sequence_report: frame count mismatch (results " +
                                 std::to_string(results.size()) + ", ground truth " +
                                 std::to_string(gt.regions.size()) + ")");
    }
    SequenceReport rep;
    rep.per_frame_iou.reserve(results.size());
    int64_t total_us = 0;
    for (size_t i = 0; i < results.size(); ++i) {
        const Rect box = bbox_from_model(model, results[i].pose);
        rep.per_frame_iou.push_back(iou(box, gt.regions[i].bbox()));
        if (results[i].status == TrackStatus::Lost) rep.frames_lost++;
        total_us += results[i].timings.us_total;
    }
    double sum = 0.0;
    for (double v : rep.per_frame_iou) sum += v;
    rep.mean_iou = rep.per_frame_iou.empty() ? 0.0 : sum / rep.per_frame_iou.size();

    const size_t window = std::min<size_t>(5, rep.per_frame_iou.size());
    double tail = 0.0;
    for (size_t i = rep.per_frame_iou.size() - window; i < rep.per_frame_iou.size(); ++i) {
        tail += rep.per_frame_iou[i];
    }
    rep.robust = window > 0 && (tail / window) > 0.5;
    rep.fps = total_us > 0 ? 1e6 * static_cast<double>(results.size()) / total_us : 0.0;
    return rep;
}

std::string report_csv(const SequenceReport& report) {
    std::string out = "frame,iou\n";
    for (size_t i = 0; i < report.per_frame_iou.size(); ++i) {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%zu,%.6f\n", i, report.per_frame_iou[i]);
        out += buf;
    }
    return out;
}

std::string report_json(const SequenceReport& report) {
    nlohmann::json j;
    j["mean_iou"] = report.mean_iou;
    j["robust"] = report.robust;
    j["fps"] = report.fps;
    j["frames_lost"] = report.frames_lost;
    return j.dump(2);
}

}  // namespace shapetrack
