#pragma once

#include <cassert>
#include <string>
#include <vector>

#include "shapetrack/geometry.hpp"

namespace shapetrack {

/// Single-channel image with real-valued intensities (nominal range 0-255).
struct GrayImage {
    int width = 0;
    int height = 0;
    std::vector<double> pixels;  // row-major, size = width * height

    GrayImage() = default;
    GrayImage(int w, int h, double fill = 0.0)
        : width(w), height(h), pixels(static_cast<size_t>(w) * h, fill) {}

    double& at(int x, int y) { return pixels[static_cast<size_t>(y) * width + x]; }
    double at(int x, int y) const { return pixels[static_cast<size_t>(y) * width + x]; }

    bool in_bounds(int x, int y) const {
        return x >= 0 && x < width && y >= 0 && y < height;
    }
    bool empty() const { return pixels.empty(); }

    /// Bilinear sample with clamp-to-edge extension.
    double sample_clamped(double x, double y) const;
};

/// Loads a PNG/JPEG/BMP/PGM frame. Color inputs are converted to luminance
/// with weights 0.299 R + 0.587 G + 0.114 B; grayscale inputs keep their raw
/// values. Throws std::runtime_error on missing/undecodable/empty files.
GrayImage load_frame(const std::string& path);

/// Writes an 8-bit PNG (values rounded and clamped to [0, 255]).
void save_png(const GrayImage& img, const std::string& path);

}  // namespace shapetrack
