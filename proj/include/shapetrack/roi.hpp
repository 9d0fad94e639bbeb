#pragma once

#include <cstdint>
#include <vector>

#include "shapetrack/geometry.hpp"
#include "shapetrack/image.hpp"

namespace shapetrack {

/// Region of interest: either an axis-aligned rectangle or an arbitrary
/// binary mask (image-sized, nonzero pixels belong to the region).
class Roi {
public:
    static Roi rect(const Rect& r) {
        Roi roi;
        roi.bbox_ = r;
        return roi;
    }

    /// Pixels with value > threshold belong to the region.
    static Roi mask(const GrayImage& m, double threshold = 127.5);

    bool is_mask() const { return !mask_.empty(); }

    bool contains(int x, int y) const {
        if (!bbox_.contains(x + 0.5, y + 0.5)) return false;
        if (mask_.empty()) return true;
        if (x < 0 || x >= mask_w_ || y < 0 || y >= mask_h_) return false;
        return mask_[static_cast<size_t>(y) * mask_w_ + x] != 0;
    }

    const Rect& bounding_box() const { return bbox_; }

    bool intersects_image(int width, int height) const {
        return bbox_.x < width && bbox_.y < height && bbox_.x2() > 0 && bbox_.y2() > 0 &&
               bbox_.w > 0 && bbox_.h > 0;
    }

private:
    Rect bbox_;
    std::vector<uint8_t> mask_;  // empty for plain rectangles
    int mask_w_ = 0;
    int mask_h_ = 0;
};

}  // namespace shapetrack
