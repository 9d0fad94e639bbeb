#pragma once

#include <cmath>

namespace shapetrack {

inline constexpr double kPi = 3.14159265358979323846;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2 operator-() const { return {-x, -y}; }

    double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double norm() const { return std::sqrt(x * x + y * y); }
    double squared_norm() const { return x * x + y * y; }

    Vec2 normalized() const {
        const double n = norm();
        return n > 0.0 ? Vec2{x / n, y / n} : Vec2{};
    }
    /// Counter-clockwise perpendicular.
    Vec2 perp() const { return {-y, x}; }

    double angle() const { return std::atan2(y, x); }
};

inline Vec2 operator*(double s, const Vec2& v) { return {v.x * s, v.y * s}; }

/// Wraps an angle into (-pi, pi].
inline double normalize_angle(double a) {
    a = std::remainder(a, 2.0 * kPi);  // (-pi, pi], except -pi maps to -pi
    if (a <= -kPi) a += 2.0 * kPi;
    return a;
}

/// Similarity-transform object state: translation, rotation, isotropic scale.
/// The translation is absolute image coordinates of the model reference point.
struct Pose {
    double tx = 0.0;
    double ty = 0.0;
    double theta = 0.0;
    double sigma = 1.0;

    static Pose identity_at(const Vec2& p) { return {p.x, p.y, 0.0, 1.0}; }

    Pose normalized() const { return {tx, ty, normalize_angle(theta), sigma}; }
};

/// sigma * R(theta) * p + t
inline Vec2 transform_point(const Vec2& p, const Pose& pose) {
    const double c = std::cos(pose.theta);
    const double s = std::sin(pose.theta);
    return {pose.sigma * (c * p.x - s * p.y) + pose.tx,
            pose.sigma * (s * p.x + c * p.y) + pose.ty};
}

/// (T^-1)^T d for a similarity transform, which reduces to (1/sigma) R(theta) d.
inline Vec2 transform_direction(const Vec2& d, const Pose& pose) {
    const double c = std::cos(pose.theta);
    const double s = std::sin(pose.theta);
    return {(c * d.x - s * d.y) / pose.sigma, (s * d.x + c * d.y) / pose.sigma};
}

/// R(theta) d: the direction part of the transform for pre-normalized d.
inline Vec2 rotate_direction(const Vec2& d, double theta) {
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    return {c * d.x - s * d.y, s * d.x + c * d.y};
}

/// Maps an image point back into model coordinates: R(-theta) (q - t) / sigma.
inline Vec2 invert_point(const Vec2& q, const Pose& pose) {
    const double c = std::cos(pose.theta);
    const double s = std::sin(pose.theta);
    const double dx = q.x - pose.tx;
    const double dy = q.y - pose.ty;
    return {(c * dx + s * dy) / pose.sigma, (-s * dx + c * dy) / pose.sigma};
}

/// Composition b∘a: apply a first, then b.
inline Pose compose(const Pose& b, const Pose& a) {
    const Vec2 t = transform_point({a.tx, a.ty}, {b.tx, b.ty, b.theta, b.sigma});
    return {t.x, t.y, normalize_angle(a.theta + b.theta), a.sigma * b.sigma};
}

inline Pose inverse(const Pose& p) {
    const double c = std::cos(p.theta);
    const double s = std::sin(p.theta);
    const double inv_sigma = 1.0 / p.sigma;
    return {-(c * p.tx + s * p.ty) * inv_sigma,
            -(-s * p.tx + c * p.ty) * inv_sigma,
            normalize_angle(-p.theta), inv_sigma};
}

/// Axis-aligned rectangle, x/y = min corner.
struct Rect {
    double x = 0.0;
    double y = 0.0;
    double w = 0.0;
    double h = 0.0;

    double area() const { return (w > 0.0 && h > 0.0) ? w * h : 0.0; }
    double x2() const { return x + w; }
    double y2() const { return y + h; }
    Vec2 center() const { return {x + 0.5 * w, y + 0.5 * h}; }
    bool contains(double px, double py) const {
        return px >= x && px < x + w && py >= y && py < y + h;
    }
};

}  // namespace shapetrack
