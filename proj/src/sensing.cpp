#include "mobsim/sensing.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mobsim {

namespace {

constexpr double deg2rad(double d) { return d * kPi / 180.0; }

}  // namespace

double light_contribution(const Vec2& sensor_pos, const Vec2& sensor_normal,
                          const LightSource& light, std::span<const AxisBox> boxes) {
    const Vec2 to_light = light.position - sensor_pos;
    const double d = to_light.norm();
    if (d < 1e-15) return light.intensity / (kLightDistanceFloor * kLightDistanceFloor);
    const double cos_phi = sensor_normal.dot(to_light) / d;
    if (cos_phi <= 0.0) return 0.0;
    if (segment_occluded(sensor_pos, light.position, boxes)) return 0.0;
    const double deff = std::max(d, kLightDistanceFloor);
    return light.intensity * cos_phi / (deff * deff);
}

SideReading light_side_sums(const WorldSpec& world, const Pose& robot) {
    SideReading out;
    for (double bearing_deg : kLightBearingsDeg) {
        for (int sign : {+1, -1}) {
            const double a = robot.heading + sign * deg2rad(bearing_deg);
            const Vec2 n = unit_vec(a);
            const Vec2 p = robot.position + n * kSensorMountRadius;
            const double c = light_contribution(p, n, world.light, world.boxes);
            (sign > 0 ? out.left : out.right) += c;
        }
    }
    return out;
}

SideReading proximity_side_sums(const WorldSpec& world, const Pose& robot,
                                std::span<const Disc> other_robots) {
    const auto walls = world.walls();
    SideReading out;
    for (double bearing_deg : kProxBearingsDeg) {
        for (int sign : {+1, -1}) {
            const double a = robot.heading + sign * deg2rad(bearing_deg);
            const Vec2 n = unit_vec(a);
            const Ray ray{robot.position + n * kSensorMountRadius, n};

            double nearest = std::numeric_limits<double>::infinity();
            for (const AxisBox& box : world.boxes)
                if (auto t = ray_box_intersect(ray, box)) nearest = std::min(nearest, *t);
            for (const Segment& wall : walls)
                if (auto t = ray_segment_intersect(ray, wall)) nearest = std::min(nearest, *t);
            for (const Disc& other : other_robots)
                if (auto t = ray_circle_intersect(ray, other.center, other.radius))
                    nearest = std::min(nearest, *t);

            if (nearest <= kProxRange) {
                const double c = std::clamp((kProxRange - nearest) / kProxRange, 0.0, 1.0);
                (sign > 0 ? out.left : out.right) += c;
            }
        }
    }
    return out;
}

std::optional<double> detection_radius(double intensity, double threshold) {
    WorldSpec empty;
    empty.light.intensity = intensity;

    // Head-on response: robot at origin heading +x, light at (d, 0).
    auto head_on_peak = [&](double d) {
        empty.light.position = {d, 0.0};
        const SideReading r = light_side_sums(empty, Pose{{0.0, 0.0}, 0.0});
        return std::max(r.left, r.right);
    };

    // The response is single-peaked in distance: it vanishes when the light
    // sits inside the sensor ring (the forward sensors face away from it) and
    // decays ~1/d^2 far out. Locate the peak by coarse scan, then bisect the
    // outer, monotone branch for the threshold crossing.
    const double hi = 3.0;
    double peak_d = kSensorMountRadius;
    double peak_val = 0.0;
    for (double d = kSensorMountRadius; d <= hi; d *= 1.02) {
        const double v = head_on_peak(d);
        if (v > peak_val) {
            peak_val = v;
            peak_d = d;
        }
    }
    if (peak_val <= threshold) return std::nullopt;  // never above it
    if (head_on_peak(hi) > threshold) return hi;     // still above at the cap
    double lo = peak_d;
    double outer = hi;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + outer);
        (head_on_peak(mid) > threshold ? lo : outer) = mid;
    }
    return 0.5 * (lo + outer);
}

}  // namespace mobsim
