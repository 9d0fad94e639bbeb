#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "shapetrack/geometry.hpp"
#include "shapetrack/gradient.hpp"
#include "shapetrack/roi.hpp"

namespace shapetrack {

/// One model point: subpixel position and unit edge direction, both relative
/// to the model reference point, plus the health statistics used by the
/// per-frame update.
struct ModelPoint {
    Vec2 p;
    Vec2 d;
    double found_ema = 1.0;  // exponentially weighted "found" rate in [0, 1]
    int age = 0;             // frames since creation
};

struct ModelBuildOptions {
    int min_points = 32;
    std::optional<Thresholds> thresholds;  // override the automatic estimate
    double threshold_percentile = 0.70;
    double threshold_low_ratio = 0.4;
};

/// Point-direction shape model. Coordinates are relative to ref_point, the
/// center of the generating ROI's bounding box in first-frame image space.
struct ShapeModel {
    std::vector<ModelPoint> points;
    Vec2 ref_point;
    double diag = 0.0;      // bounding-box diagonal of the point set
    Rect roi_bbox;          // generating region, image space
    uint64_t version = 0;   // bumped by every mutation

    /// Farthest point radius from the reference point (model space).
    double max_radius() const;
    /// Recomputes diag from the current point set.
    void recompute_diag();
};

/// Extracts edge points inside the ROI (threshold estimate, NMS, subpixel
/// refinement) and assembles the model. Throws std::runtime_error when the
/// region yields fewer than min_points points.
ShapeModel build_model(const GradientField& field, const Roi& roi,
                       const ModelBuildOptions& opts = {});

/// Uniform random k-subset of point indices, sorted ascending; deterministic
/// for a fixed seed. k >= size returns all indices.
std::vector<int> subsample_points(const ShapeModel& model, int k, uint64_t seed);

/// Versioned JSON (de)serialization.
std::string model_to_json(const ShapeModel& model);
ShapeModel model_from_json(const std::string& json_text);
void save_model(const ShapeModel& model, const std::string& path);
ShapeModel load_model(const std::string& path);

}  // namespace shapetrack
