#pragma once

#include <array>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "shapetrack/geometry.hpp"
#include "shapetrack/model.hpp"
#include "shapetrack/tracker.hpp"

namespace shapetrack {

enum class GtFormat { Otb, Vot };

/// Ground-truth region: axis-aligned rect (OTB) or 4-corner polygon (VOT).
struct GtRegion {
    bool is_polygon = false;
    Rect rect;
    std::array<Vec2, 4> poly{};

    Rect bbox() const;
};

struct GroundTruthTrack {
    GtFormat format = GtFormat::Otb;
    std::vector<GtRegion> regions;
};

/// Parse error with the offending 1-based line number.
struct GtParseError : std::runtime_error {
    int line;
    GtParseError(const std::string& msg, int line_no)
        : std::runtime_error(msg), line(line_no) {}
};

/// OTB: one "x,y,w,h" line per frame (comma or tab separated, 1-based
/// corner). VOT: one line of 8 comma-separated polygon coordinates.
/// Normalizes to 0-based coordinates.
GroundTruthTrack parse_ground_truth(const std::string& path, GtFormat format);
GroundTruthTrack parse_ground_truth_text(const std::string& text, GtFormat format);

/// Inverse of parse_ground_truth (writes 1-based OTB corners back).
std::string serialize_ground_truth(const GroundTruthTrack& track);
void write_ground_truth(const GroundTruthTrack& track, const std::string& path);

/// Axis-aligned box of the transformed model point set.
Rect bbox_from_model(const ShapeModel& model, const Pose& pose);

/// Intersection over union; 0 when the union has zero area.
double iou(const Rect& a, const Rect& b);

struct SequenceReport {
    std::vector<double> per_frame_iou;
    double mean_iou = 0.0;
    bool robust = false;  // mean IoU over the final 5 frames > 0.5
    double fps = 0.0;
    int frames_lost = 0;
};

/// Per-frame IoU of the model box against the ground truth (polygons are
/// compared through their bounding boxes). Throws on length mismatch.
SequenceReport sequence_report(std::span<const FrameResult> results,
                               const GroundTruthTrack& gt, const ShapeModel& model);

std::string report_csv(const SequenceReport& report);
std::string report_json(const SequenceReport& report);

}  // namespace shapetrack
