#pragma once

#include <cstdint>
#include <vector>

#include "shapetrack/geometry.hpp"
#include "shapetrack/image.hpp"

namespace shapetrack {

struct IllumStep {
    double gain = 1.0;  // nonzero; negative gains exercise contrast inversion
    double bias = 0.0;
};

struct Occluder {
    int first_frame = 0;
    int last_frame = -1;  // inclusive
    Rect rect;
    double fill = 0.0;  // constant fill -> zero gradient inside
};

/// Synthetic-sequence recipe: a template warped along an exact trajectory,
/// then gain/bias, occluders, and seeded Gaussian noise. The pose maps
/// template-centered coordinates into the frame, so (tx, ty) is the frame
/// position of the template center.
struct SynthSpec {
    GrayImage tmpl;
    Rect content;                 // object extent in template coords; for gt boxes
    int frame_width = 0;          // 0 -> template size
    int frame_height = 0;
    std::vector<Pose> trajectory; // one pose per frame
    double noise_sigma = 0.0;
    std::vector<IllumStep> illum; // empty, or one entry per frame
    std::vector<Occluder> occluders;
    uint64_t seed = 1;
};

/// Deterministic frame generator (noise is seeded per frame, so frames can
/// be rendered in any order). Construction validates the spec and throws a
/// std::runtime_error naming the first frame whose content leaves the frame.
class SynthSequence {
public:
    explicit SynthSequence(SynthSpec spec);

    int size() const { return static_cast<int>(spec_.trajectory.size()); }
    GrayImage frame(int t) const;
    const Pose& pose(int t) const { return spec_.trajectory[t]; }
    /// Axis-aligned box of the four warped content-rect corners.
    Rect gt_box(int t) const;
    const SynthSpec& spec() const { return spec_; }

    /// Pose that renders the template 1:1 into the frame.
    static Pose identity_pose(const SynthSpec& spec) {
        return Pose::identity_at({0.5 * spec.tmpl.width, 0.5 * spec.tmpl.height});
    }

private:
    SynthSpec spec_;
    Vec2 tmpl_center_;
};

}  // namespace shapetrack
