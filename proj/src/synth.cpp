#include "shapetrack/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "shapetrack/rng.hpp"

namespace shapetrack {

SynthSequence::SynthSequence(SynthSpec spec) : spec_(std::move(spec)) {
    if (spec_.tmpl.empty()) throw std::runtime_error("synth: empty template");
    if (spec_.trajectory.empty()) throw std::runtime_error("synth: empty trajectory");
    if (spec_.frame_width <= 0) spec_.frame_width = spec_.tmpl.width;
    if (spec_.frame_height <= 0) spec_.frame_height = spec_.tmpl.height;
    if (spec_.content.area() <= 0.0) {
        spec_.content = {0.0, 0.0, static_cast<double>(spec_.tmpl.width),
                         static_cast<double>(spec_.tmpl.height)};
    }
    if (!spec_.illum.empty() && spec_.illum.size() != spec_.trajectory.size()) {
        throw std::runtime_error("synth: illum list must match trajectory length");
    }
    for (const auto& step : spec_.illum) {
        if (step.gain == 0.0) throw std::runtime_error("synth: zero gain");
    }
    tmpl_center_ = {0.5 * spec_.tmpl.width, 0.5 * spec_.tmpl.height};

    for (size_t t = 0; t < spec_.trajectory.size(); ++t) {
        const Rect box = gt_box(static_cast<int>(t));
        if (box.x < 0.0 || box.y < 0.0 || box.x2() > spec_.frame_width ||
            box.y2() > spec_.frame_height) {
            throw std::runtime_error("synth: content leaves the frame at frame " +
                                     std::to_string(t));
        }
    }
}

Rect SynthSequence::gt_box(int t) const {
    const Pose& pose = spec_.trajectory[static_cast<size_t>(t)];
    const Rect& c = spec_.content;
    const Vec2 corners[4] = {{c.x, c.y}, {c.x2(), c.y}, {c.x, c.y2()}, {c.x2(), c.y2()}};
    double min_x = 1e300, min_y = 1e300, max_x = -1e300, max_y = -1e300;
    for (const Vec2& corner : corners) {
        const Vec2 p = transform_point(corner - tmpl_center_, pose);
        min_x = std::min(min_x, p.x);
        min_y = std::min(min_y, p.y);
        max_x = std::max(max_x, p.x);
        max_y = std::max(max_y, p.y);
    }
    return {min_x, min_y, max_x - min_x, max_y - min_y};
}

GrayImage SynthSequence::frame(int t) const {
    const Pose& pose = spec_.trajectory[static_cast<size_t>(t)];
    GrayImage out(spec_.frame_width, spec_.frame_height);

    // Inverse map: template coords of every output pixel, bilinear sample
    // with clamp-to-edge (the margin precondition keeps content interior).
    const Pose inv = inverse(pose);
    const double c = std::cos(inv.theta);
    const double s = std::sin(inv.theta);
    for (int y = 0; y < out.height; ++y) {
        for (int x = 0; x < out.width; ++x) {
            const double ux = inv.sigma * (c * x - s * y) + inv.tx + tmpl_center_.x;
            const double uy = inv.sigma * (s * x + c * y) + inv.ty + tmpl_center_.y;
            out.at(x, y) = spec_.tmpl.sample_clamped(ux, uy);
        }
    }

    if (!spec_.illum.empty()) {
        const IllumStep& step = spec_.illum[static_cast<size_t>(t)];
        if (step.gain != 1.0 || step.bias != 0.0) {
            for (double& v : out.pixels) v = step.gain * v + step.bias;
        }
    }

    for (const auto& occ : spec_.occluders) {
        if (t < occ.first_frame || t > occ.last_frame) continue;
        const int x0 = std::max(0, static_cast<int>(std::floor(occ.rect.x)));
        const int y0 = std::max(0, static_cast<int>(std::floor(occ.rect.y)));
        const int x1 = std::min(out.width, static_cast<int>(std::ceil(occ.rect.x2())));
        const int y1 = std::min(out.height, static_cast<int>(std::ceil(occ.rect.y2())));
        for (int y = y0; y < y1; ++y)
            for (int x = x0; x < x1; ++x) out.at(x, y) = occ.fill;
    }

    if (spec_.noise_sigma > 0.0) {
        // Noise is seeded per frame so frames render independently.
        std::mt19937_64 rng(mix_seed(spec_.seed, static_cast<uint64_t>(t)));
        for (double& v : out.pixels) v += spec_.noise_sigma * rng_normal(rng);
    }
    return out;
}

}  // namespace shapetrack
