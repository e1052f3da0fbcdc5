#include "mobsim/geom.hpp"

#include <algorithm>
#include <limits>

namespace mobsim {

double wrap_angle(double a) {
    double w = std::remainder(a, 2.0 * kPi);  // [-pi, pi]
    if (w <= -kPi) w += 2.0 * kPi;
    return w;
}

std::optional<double> ray_box_intersect(const Ray& ray, const AxisBox& box) {
    const Vec2 lo = box.lo();
    const Vec2 hi = box.hi();
    double tmin = -std::numeric_limits<double>::infinity();
    double tmax = std::numeric_limits<double>::infinity();

    const double o[2] = {ray.origin.x, ray.origin.y};
    const double d[2] = {ray.direction.x, ray.direction.y};
    const double l[2] = {lo.x, lo.y};
    const double h[2] = {hi.x, hi.y};

    for (int axis = 0; axis < 2; ++axis) {
        if (std::abs(d[axis]) < 1e-15) {
            if (o[axis] < l[axis] || o[axis] > h[axis]) return std::nullopt;
            continue;  // slab unbounded along this axis
        }
        double t1 = (l[axis] - o[axis]) / d[axis];
        double t2 = (h[axis] - o[axis]) / d[axis];
        if (t1 > t2) std::swap(t1, t2);
        tmin = std::max(tmin, t1);
        tmax = std::min(tmax, t2);
    }
    if (tmax < tmin || tmax < 0.0) return std::nullopt;
    return std::max(tmin, 0.0);
}

std::optional<double> ray_segment_intersect(const Ray& ray, const Segment& seg) {
    // Solve origin + t*dir = a + s*(b - a), t >= 0, s in [0, 1].
    const Vec2 e = seg.b - seg.a;
    const double denom = ray.direction.x * (-e.y) - ray.direction.y * (-e.x);
    if (std::abs(denom) < 1e-15) return std::nullopt;  // parallel
    const Vec2 w = seg.a - ray.origin;
    const double t = (w.x * (-e.y) - w.y * (-e.x)) / denom;
    const double s = (ray.direction.x * w.y - ray.direction.y * w.x) / denom;
    if (t < 0.0 || s < 0.0 || s > 1.0) return std::nullopt;
    return t;
}

std::optional<double> ray_circle_intersect(const Ray& ray, const Vec2& center, double radius) {
    const Vec2 oc = center - ray.origin;
    const double cc = oc.norm2() - radius * radius;
    if (cc <= 0.0) return 0.0;  // origin inside or on the disc
    const double proj = ray.direction.dot(oc);
    if (proj < 0.0) return std::nullopt;  // disc behind
    const double disc = proj * proj - cc;
    if (disc < 0.0) return std::nullopt;
    const double t = proj - std::sqrt(disc);
    if (t < 0.0) return std::nullopt;
    return t;
}

bool segment_occluded(const Vec2& p, const Vec2& q, std::span<const AxisBox> boxes) {
    const Vec2 d = q - p;
    const double len = d.norm();
    const Ray ray{p, d / len};
    for (const AxisBox& box : boxes) {
        const auto t = ray_box_intersect(ray, box);
        if (t && *t < len - 1e-12) return true;
    }
    return false;
}

PairPush resolve_circle_circle(const Vec2& c1, double r1, const Vec2& c2, double r2) {
    const Vec2 delta = c2 - c1;
    const double dist = delta.norm();
    const double depth = r1 + r2 - dist;
    if (depth <= 0.0) return {};
    const Vec2 dir = dist < 1e-12 ? Vec2{1.0, 0.0} : delta / dist;
    return {dir * (-0.5 * depth), dir * (0.5 * depth)};
}

Vec2 resolve_circle_box(const Vec2& c, double r, const AxisBox& box) {
    const Vec2 lo = box.lo();
    const Vec2 hi = box.hi();
    const Vec2 nearest{std::clamp(c.x, lo.x, hi.x), std::clamp(c.y, lo.y, hi.y)};

    if (nearest.x != c.x || nearest.y != c.y) {
        // Center outside the box.
        const Vec2 away = c - nearest;
        const double dist = away.norm();
        if (dist >= r) return {};
        return away * ((r - dist) / dist);
    }

    // Center inside or on the boundary: push out along the cheapest face.
    const double exits[4] = {c.x - lo.x, hi.x - c.x, c.y - lo.y, hi.y - c.y};
    static constexpr Vec2 normals[4] = {{-1, 0}, {1, 0}, {0, -1}, {0, 1}};
    int best = 0;
    for (int i = 1; i < 4; ++i)
        if (exits[i] < exits[best]) best = i;
    return normals[best] * (exits[best] + r);
}

double point_box_distance(const Vec2& p, const AxisBox& box) {
    const Vec2 lo = box.lo();
    const Vec2 hi = box.hi();
    const double dx = std::max({lo.x - p.x, 0.0, p.x - hi.x});
    const double dy = std::max({lo.y - p.y, 0.0, p.y - hi.y});
    return std::hypot(dx, dy);
}

double box_box_gap(const AxisBox& a, const AxisBox& b) {
    const double span = a.half + b.half;
    const double gx = std::max(0.0, std::abs(a.center.x - b.center.x) - span);
    const double gy = std::max(0.0, std::abs(a.center.y - b.center.y) - span);
    return std::hypot(gx, gy);
}

double circle_circle_depth(const Vec2& c1, double r1, const Vec2& c2, double r2) {
    return std::max(0.0, r1 + r2 - (c2 - c1).norm());
}

double circle_box_depth(const Vec2& c, double r, const AxisBox& box) {
    const Vec2 lo = box.lo();
    const Vec2 hi = box.hi();
    if (c.x >= lo.x && c.x <= hi.x && c.y >= lo.y && c.y <= hi.y) {
        const double exit = std::min({c.x - lo.x, hi.x - c.x, c.y - lo.y, hi.y - c.y});
        return exit + r;
    }
    return std::max(0.0, r - point_box_distance(c, box));
}

}  // namespace mobsim
