#pragma once

#include <optional>
#include <vector>

#include "shapetrack/geometry.hpp"
#include "shapetrack/image.hpp"
#include "shapetrack/roi.hpp"

namespace shapetrack {

/// Gradient magnitudes below this count as "no edge information": any term
/// that would divide by such an amplitude contributes zero instead.
inline constexpr double kZeroGradientEps = 1e-9;

/// Per-pixel Sobel direction vectors (gx, gy) and their amplitudes.
/// The outermost pixel ring is zeroed by convention. Immutable after
/// construction; safe for concurrent reads.
struct GradientField {
    int width = 0;
    int height = 0;
    std::vector<double> gx;
    std::vector<double> gy;
    std::vector<double> amp;

    size_t idx(int x, int y) const { return static_cast<size_t>(y) * width + x; }
    Vec2 dir(int x, int y) const { return {gx[idx(x, y)], gy[idx(x, y)]}; }
    double amplitude(int x, int y) const { return amp[idx(x, y)]; }
    bool in_bounds(int x, int y) const {
        return x >= 0 && x < width && y >= 0 && y < height;
    }
};

/// Unnormalized 3x3 Sobel ([-1 0 1] ⊗ [1 2 1]). Throws if the image is
/// smaller than 3x3.
GradientField sobel_gradients(const GrayImage& img);

struct Thresholds {
    double low = 0.0;
    double high = 0.0;
};

/// Hysteresis thresholds from the amplitude histogram of the (optional) ROI:
/// high = `percentile` of the nonzero amplitudes, low = `low_ratio` * high.
/// Throws std::runtime_error when every amplitude in the region is zero.
Thresholds estimate_thresholds(const GradientField& field, const Roi* roi = nullptr,
                               double percentile = 0.70, double low_ratio = 0.4);

/// Non-throwing variant; nullopt for a featureless region.
std::optional<Thresholds> try_estimate_thresholds(const GradientField& field,
                                                  const Roi* roi = nullptr,
                                                  double percentile = 0.70,
                                                  double low_ratio = 0.4);

struct PixelCoord {
    int x = 0;
    int y = 0;
};

/// Non-maximum suppression along the quantized gradient direction with
/// hysteresis: survivors have amplitude >= high, or >= low with an
/// 8-connected path (through other survivors) to a >= high pixel.
std::vector<PixelCoord> nonmax_suppress(const GradientField& field, double low, double high,
                                        const Roi* roi = nullptr);

/// Subpixel edge point: position, unit direction, amplitude at the maximum.
struct EdgePoint {
    Vec2 pos;
    Vec2 dir;
    double amplitude = 0.0;
    bool low_confidence = false;  // degenerate parabola, offset forced to 0
};

/// Parabola fit through the three amplitude samples along the gradient
/// direction (offsets -1, 0, +1; bilinear interpolation). The vertex offset
/// (a- - a+) / (2 (a- - 2 a0 + a+)) is clamped to [-0.5, +0.5].
EdgePoint refine_edge_subpixel(const GradientField& field, PixelCoord px);

enum class Interp { Nearest, Bilinear };

/// Direction vector at a subpixel location; out-of-image queries return the
/// zero vector (which scores zero under the zero-gradient convention).
Vec2 sample_direction(const GradientField& field, const Vec2& at, Interp mode);

/// Bilinear amplitude sample; zero outside the image.
double sample_amplitude(const GradientField& field, const Vec2& at);

}  // namespace shapetrack
