#include "shapetrack/roi.hpp"

#include <algorithm>
#include <stdexcept>

namespace shapetrack {

Roi Roi::mask(const GrayImage& m, double threshold) {
    if (m.empty()) throw std::runtime_error("Roi::mask: empty mask image");
    Roi roi;
    roi.mask_w_ = m.width;
    roi.mask_h_ = m.height;
    roi.mask_.assign(static_cast<size_t>(m.width) * m.height, 0);

    int min_x = m.width, min_y = m.height, max_x = -1, max_y = -1;
    for (int y = 0; y < m.height; ++y) {
        for (int x = 0; x < m.width; ++x) {
            if (m.at(x, y) > threshold) {
                roi.mask_[static_cast<size_t>(y) * m.width + x] = 1;
                min_x = std::min(min_x, x);
                min_y = std::min(min_y, y);
                max_x = std::max(max_x, x);
                max_y = std::max(max_y, y);
            }
        }
    }
    if (max_x < 0) throw std::runtime_error("Roi::mask: mask selects no pixels");
    roi.bbox_ = {static_cast<double>(min_x), static_cast<double>(min_y),
                 static_cast<double>(max_x - min_x + 1), static_cast<double>(max_y - min_y + 1)};
    return roi;
}

}  // namespace shapetrack
