#include "shapetrack/gradient.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace shapetrack {

GradientField sobel_gradients(const GrayImage& img) {
    if (img.width < 3 || img.height < 3) {
        throw std::runtime_error("sobel_gradients: image smaller than 3x3");
    }
    GradientField f;
    f.width = img.width;
    f.height = img.height;
    const size_t n = static_cast<size_t>(img.width) * img.height;
    f.gx.assign(n, 0.0);
    f.gy.assign(n, 0.0);
    f.amp.assign(n, 0.0);

    for (int y = 1; y < img.height - 1; ++y) {
        for (int x = 1; x < img.width - 1; ++x) {
            const double tl = img.at(x - 1, y - 1), tc = img.at(x, y - 1), tr = img.at(x + 1, y - 1);
            const double ml = img.at(x - 1, y), mr = img.at(x + 1, y);
            const double bl = img.at(x - 1, y + 1), bc = img.at(x, y + 1), br = img.at(x + 1, y + 1);
            const double v = (tr + 2.0 * mr + br) - (tl + 2.0 * ml + bl);
            const double w = (bl + 2.0 * bc + br) - (tl + 2.0 * tc + tr);
            const size_t i = f.idx(x, y);
            f.gx[i] = v;
            f.gy[i] = w;
            f.amp[i] = std::sqrt(v * v + w * w);
        }
    }
    return f;
}

std::optional<Thresholds> try_estimate_thresholds(const GradientField& field, const Roi* roi,
                                                  double percentile, double low_ratio) {
    std::vector<double> amps;
    amps.reserve(1024);
    for (int y = 0; y < field.height; ++y) {
        for (int x = 0; x < field.width; ++x) {
            if (roi && !roi->contains(x, y)) continue;
            const double a = field.amp[field.idx(x, y)];
            if (a > 0.0) amps.push_back(a);
        }
    }
    if (amps.empty()) return std::nullopt;

    // Nearest-rank percentile.
    const size_t rank =
        std::min(amps.size() - 1,
                 static_cast<size_t>(std::ceil(percentile * static_cast<double>(amps.size()))) -
                     (percentile > 0.0 ? 1 : 0));
    std::nth_element(amps.begin(), amps.begin() + rank, amps.end());
    const double high = amps[rank];
    return Thresholds{low_ratio * high, high};
}

Thresholds estimate_thresholds(const GradientField& field, const Roi* roi, double percentile,
                               double low_ratio) {
    auto t = try_estimate_thresholds(field, roi, percentile, low_ratio);
    if (!t) {
        throw std::runtime_error("estimate_thresholds: featureless region (all amplitudes zero)");
    }
    return *t;
}

namespace {

// Quantized gradient direction -> neighbor offset, 4 sectors.
inline void direction_offsets(double gx, double gy, int& ox, int& oy) {
    // Sector boundaries at tan(22.5 deg) and tan(67.5 deg).
    const double ax = std::fabs(gx);
    const double ay = std::fabs(gy);
    constexpr double kTan225 = 0.41421356237309503;  // tan(pi/8)
    constexpr double kTan675 = 2.414213562373095;    // tan(3 pi/8)
    if (ay <= kTan225 * ax) {
        ox = 1; oy = 0;          // horizontal gradient
    } else if (ay >= kTan675 * ax) {
        ox = 0; oy = 1;          // vertical
    } else if ((gx > 0) == (gy > 0)) {
        ox = 1; oy = 1;          // diagonal
    } else {
        ox = 1; oy = -1;         // anti-diagonal
    }
}

}  // namespace

std::vector<PixelCoord> nonmax_suppress(const GradientField& field, double low, double high,
                                        const Roi* roi) {
    if (low > high) throw std::runtime_error("nonmax_suppress: low > high");

    const int w = field.width;
    const int h = field.height;
    // 0 = rejected, 1 = weak candidate, 2 = strong candidate
    std::vector<uint8_t> mark(static_cast<size_t>(w) * h, 0);

    for (int y = 1; y < h - 1; ++y) {
        for (int x = 1; x < w - 1; ++x) {
            if (roi && !roi->contains(x, y)) continue;
            const size_t i = field.idx(x, y);
            const double a = field.amp[i];
            if (a < low || a <= 0.0) continue;

            int ox, oy;
            direction_offsets(field.gx[i], field.gy[i], ox, oy);
            const double fwd = field.amp[field.idx(x + ox, y + oy)];
            const double bwd = field.amp[field.idx(x - ox, y - oy)];
            // One strict side resolves plateau ties to a single survivor.
            if (a >= fwd && a > bwd) {
                mark[i] = a >= high ? 2 : 1;
            }
        }
    }

    // Hysteresis: flood from strong candidates over 8-connected weak ones.
    std::vector<PixelCoord> stack;
    for (int y = 1; y < h - 1; ++y) {
        for (int x = 1; x < w - 1; ++x) {
            if (mark[field.idx(x, y)] == 2) stack.push_back({x, y});
        }
    }
    std::vector<uint8_t> keep(static_cast<size_t>(w) * h, 0);
    while (!stack.empty()) {
        const PixelCoord p = stack.back();
        stack.pop_back();
        const size_t i = field.idx(p.x, p.y);
        if (keep[i]) continue;
        keep[i] = 1;
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                if (dx == 0 && dy == 0) continue;
                const int nx = p.x + dx;
                const int ny = p.y + dy;
                if (nx < 1 || nx >= w - 1 || ny < 1 || ny >= h - 1) continue;
                const size_t j = field.idx(nx, ny);
                if (mark[j] != 0 && !keep[j]) stack.push_back({nx, ny});
            }
        }
    }

    std::vector<PixelCoord> out;
    for (int y = 1; y < h - 1; ++y) {
        for (int x = 1; x < w - 1; ++x) {
            if (keep[field.idx(x, y)]) out.push_back({x, y});
        }
    }
    return out;
}

double sample_amplitude(const GradientField& field, const Vec2& at) {
    const int x0 = static_cast<int>(std::floor(at.x));
    const int y0 = static_cast<int>(std::floor(at.y));
    if (x0 < 0 || y0 < 0 || x0 + 1 >= field.width || y0 + 1 >= field.height) return 0.0;
    const double fx = at.x - x0;
    const double fy = at.y - y0;
    const double a00 = field.amp[field.idx(x0, y0)];
    const double a10 = field.amp[field.idx(x0 + 1, y0)];
    const double a01 = field.amp[field.idx(x0, y0 + 1)];
    const double a11 = field.amp[field.idx(x0 + 1, y0 + 1)];
    return (1.0 - fy) * ((1.0 - fx) * a00 + fx * a10) + fy * ((1.0 - fx) * a01 + fx * a11);
}

Vec2 sample_direction(const GradientField& field, const Vec2& at, Interp mode) {
    if (mode == Interp::Nearest) {
        const long x = std::lround(at.x);
        const long y = std::lround(at.y);
        if (x < 0 || y < 0 || x >= field.width || y >= field.height) return {};
        return field.dir(static_cast<int>(x), static_cast<int>(y));
    }
    const int x0 = static_cast<int>(std::floor(at.x));
    const int y0 = static_cast<int>(std::floor(at.y));
    if (x0 < 0 || y0 < 0 || x0 + 1 >= field.width || y0 + 1 >= field.height) return {};
    const double fx = at.x - x0;
    const double fy = at.y - y0;
    const size_t i00 = field.idx(x0, y0);
    const size_t i10 = i00 + 1;
    const size_t i01 = i00 + field.width;
    const size_t i11 = i01 + 1;
    const double w00 = (1.0 - fx) * (1.0 - fy);
    const double w10 = fx * (1.0 - fy);
    const double w01 = (1.0 - fx) * fy;
    const double w11 = fx * fy;
    return {w00 * field.gx[i00] + w10 * field.gx[i10] + w01 * field.gx[i01] + w11 * field.gx[i11],
            w00 * field.gy[i00] + w10 * field.gy[i10] + w01 * field.gy[i01] + w11 * field.gy[i11]};
}

EdgePoint refine_edge_subpixel(const GradientField& field, PixelCoord px) {
    EdgePoint ep;
    const size_t i = field.idx(px.x, px.y);
    const Vec2 dir{field.gx[i], field.gy[i]};
    const double a0 = field.amp[i];
    ep.dir = dir.normalized();
    ep.amplitude = a0;
    ep.pos = {static_cast<double>(px.x), static_cast<double>(px.y)};
    if (a0 < kZeroGradientEps) {
        ep.low_confidence = true;
        return ep;
    }

    const Vec2 base{static_cast<double>(px.x), static_cast<double>(px.y)};
    const double am = sample_amplitude(field, base - ep.dir);
    const double ap = sample_amplitude(field, base + ep.dir);
    const double denom = am - 2.0 * a0 + ap;
    if (denom >= 0.0) {
        ep.low_confidence = true;  // degenerate parabola, keep pixel position
        return ep;
    }
    double offset = (am - ap) / (2.0 * denom);
    offset = std::clamp(offset, -0.5, 0.5);
    ep.pos = base + offset * ep.dir;
    return ep;
}

}  // namespace shapetrack
