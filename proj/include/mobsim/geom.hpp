#pragma once

#include <cmath>
#include <optional>
#include <span>

namespace mobsim {

inline constexpr double kPi = 3.141592653589793238462643383279502884;
inline constexpr double kGeomTol = 1e-9;

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2 operator+(const Vec2& o) const { return {x + o.x, y + o.y}; }
    constexpr Vec2 operator-(const Vec2& o) const { return {x - o.x, y - o.y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
    Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
    constexpr bool operator==(const Vec2&) const = default;

    constexpr double dot(const Vec2& o) const { return x * o.x + y * o.y; }
    double norm() const { return std::hypot(x, y); }
    constexpr double norm2() const { return x * x + y * y; }
    Vec2 normalized() const { const double n = norm(); return {x / n, y / n}; }
};

constexpr Vec2 operator*(double s, const Vec2& v) { return {v.x * s, v.y * s}; }

/// Unit vector at angle `a` (radians, 0 = +x, counterclockwise positive).
inline Vec2 unit_vec(double a) { return {std::cos(a), std::sin(a)}; }

/// Normalizes an angle into (-pi, pi].
double wrap_angle(double a);

struct Pose {
    Vec2 position;
    double heading = 0.0;  // radians in (-pi, pi]
};

/// Axis-aligned square obstacle: equal half extent per axis.
struct AxisBox {
    Vec2 center;
    double half = 0.0;

    constexpr Vec2 lo() const { return {center.x - half, center.y - half}; }
    constexpr Vec2 hi() const { return {center.x + half, center.y + half}; }
    constexpr bool contains(const Vec2& p) const {
        return p.x >= center.x - half && p.x <= center.x + half &&
               p.y >= center.y - half && p.y <= center.y + half;
    }
};

struct Segment {
    Vec2 a;
    Vec2 b;
};

struct Ray {
    Vec2 origin;
    Vec2 direction;  // unit length
};

// Smallest t >= 0 with origin + t*direction on the box boundary or interior.
// An origin inside the box yields 0.
std::optional<double> ray_box_intersect(const Ray& ray, const AxisBox& box);

std::optional<double> ray_segment_intersect(const Ray& ray, const Segment& seg);

// Smallest t >= 0 hitting the disc; origin inside the disc yields 0.
std::optional<double> ray_circle_intersect(const Ray& ray, const Vec2& center, double radius);

// True iff any box intersects the open segment (p, q). Requires p != q.
bool segment_occluded(const Vec2& p, const Vec2& q, std::span<const AxisBox> boxes);

struct PairPush {
    Vec2 first;
    Vec2 second;
};

// Displacements separating two overlapping discs, half the overlap depth each,
// along the center line. Coincident centers separate along +x by convention.
PairPush resolve_circle_circle(const Vec2& c1, double r1, const Vec2& c2, double r2);

// Minimal translation moving the disc out of overlap with an immovable box.
// A center exactly on a box face is pushed along the outward face normal by r.
Vec2 resolve_circle_box(const Vec2& c, double r, const AxisBox& box);

/// Euclidean distance from a point to the box (0 inside or on the boundary).
double point_box_distance(const Vec2& p, const AxisBox& box);

/// Euclidean gap between two boxes (0 if they touch or overlap).
double box_box_gap(const AxisBox& a, const AxisBox& b);

/// Overlap depth of two discs (0 if disjoint).
double circle_circle_depth(const Vec2& c1, double r1, const Vec2& c2, double r2);

/// Overlap depth of a disc against a box (0 if disjoint).
double circle_box_depth(const Vec2& c, double r, const AxisBox& box);

}  // namespace mobsim
