#pragma once

#include <cstdint>
#include <string>

#include "shapetrack/model.hpp"
#include "shapetrack/refine.hpp"
#include "shapetrack/search.hpp"
#include "shapetrack/update.hpp"

namespace shapetrack {

struct TrackerConfig {
    double s_min = 0.7;
    int subsample_k = 0;  // points used per localization; 0 = all
    int max_expansion_level = 6;
    SearchConfig search;
    UpdateConfig update;
    ModelBuildOptions model;
    double refine_search_len = 3.0;  // normal-search half-length, refinement stage
    double cos_tol = 0.5;
    int ls_iterations = 1;        // match + least-squares rounds per frame
    bool enable_update = true;    // lambda still controls blending; this gates the stage
    Interp search_interp = Interp::Nearest;
    Interp refine_interp = Interp::Bilinear;
    int threads = 1;  // grid-search worker count; 0 = hardware concurrency
    uint64_t seed = 0x7365656473ULL;
};

enum class TrackStatus { Tracked, Lost };

inline const char* to_string(TrackStatus s) {
    return s == TrackStatus::Tracked ? "tracked" : "lost";
}

struct StageTimings {
    int64_t us_gradient = 0;
    int64_t us_search = 0;
    int64_t us_refine = 0;
    int64_t us_update = 0;
    int64_t us_total = 0;
};

struct FrameResult {
    int frame_index = 0;
    TrackStatus status = TrackStatus::Lost;
    int lost_level = 0;  // expansion level used for this frame's search
    Pose pose;           // refined when tracked, last-known when lost
    double score = 0.0;
    int points_used = 0;
    StageTimings timings;
};

/// Per-frame pipeline with the lost/re-detect state machine: gradients ->
/// search-space -> grid search -> facet refinement -> normal matches ->
/// least squares -> re-score gate -> model update. The model is only mutated
/// on tracked frames; while lost, the search region and parameter ranges
/// expand each frame and reset on re-acquisition.
class Tracker {
public:
    /// Builds the model from the first frame. Throws when the ROI is
    /// untrackable (too few edge points).
    Tracker(const GrayImage& first_frame, const Roi& roi, const TrackerConfig& cfg);

    /// Uses a previously built model instead of extracting one.
    Tracker(const GrayImage& first_frame, ShapeModel model, const TrackerConfig& cfg);

    /// Throws on frame size mismatch.
    FrameResult track_frame(const GrayImage& frame);

    const ShapeModel& model() const { return model_; }
    const Pose& pose() const { return pose_; }
    int expansion_level() const { return expansion_level_; }
    const TrackerConfig& config() const { return cfg_; }

private:
    Pose predicted_center() const;

    TrackerConfig cfg_;
    ShapeModel model_;
    Pose pose_;
    Pose prev_pose_;
    bool last_was_tracked_ = true;
    int expansion_level_ = 0;
    int frame_index_ = 0;  // frames processed through track_frame
    int frame_w_ = 0;
    int frame_h_ = 0;
};

/// CSV row for a FrameResult. `frame,status,x,y,theta,sigma,score,points,
/// us_total`; set with_timing=false for determinism comparisons (wall-clock
/// timing is the one non-reproducible column).
std::string frame_result_csv_row(const FrameResult& r, bool with_timing = true);
inline const char* frame_result_csv_header() {
    return "frame,status,x,y,theta,sigma,score,points,us_total";
}

}  // namespace shapetrack
