#pragma once
#include <algorithm>
#include <cmath>

namespace mste {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
    Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
    Vec2 operator*(double s) const { return {x * s, y * s}; }
    Vec2& operator+=(Vec2 o) { x += o.x; y += o.y; return *this; }
    bool operator==(const Vec2&) const = default;
};

inline Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double sq_norm(Vec2 a) { return a.x * a.x + a.y * a.y; }

/// Unit vector at the given angle from the +x axis.
inline Vec2 heading_vector(double angle) { return {std::cos(angle), std::sin(angle)}; }

/// Wrap an angle into [-pi, pi).
inline double wrap_angle(double a) {
    const double two_pi = 2.0 * M_PI;
    double w = a - two_pi * std::floor((a + M_PI) / two_pi);
    if (w >= M_PI) w = -M_PI;  // guard against floating round-up
    return w;
}

/// Axis-aligned rectangular operating region.
struct Domain {
    double x_min = 0.0;
    double x_max = 0.0;
    double y_min = 0.0;
    double y_max = 0.0;

    double width() const { return x_max - x_min; }
    double height() const { return y_max - y_min; }
    double area() const { return width() * height(); }
    double diagonal() const { return std::hypot(width(), height()); }
    bool valid() const { return x_max > x_min && y_max > y_min; }

    bool contains(Vec2 p) const {
        return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
    }

    Vec2 clamp(Vec2 p) const {
        return {std::clamp(p.x, x_min, x_max), std::clamp(p.y, y_min, y_max)};
    }

    /// Fold a point back inside by reflecting at the boundary as often as needed.
    Vec2 reflect(Vec2 p) const {
        auto fold = [](double v, double lo, double hi) {
            const double span = hi - lo;
            if (span <= 0.0) return lo;
            double t = std::fmod(v - lo, 2.0 * span);
            if (t < 0.0) t += 2.0 * span;
            return t <= span ? lo + t : hi - (t - span);
        };
        return {fold(p.x, x_min, x_max), fold(p.y, y_min, y_max)};
    }

    bool operator==(const Domain&) const = default;
};

}  // namespace mste
