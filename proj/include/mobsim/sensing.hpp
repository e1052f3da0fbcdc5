#pragma once

#include <array>
#include <optional>
#include <span>

#include "mobsim/geom.hpp"
#include "mobsim/world.hpp"

namespace mobsim {

// Sensor rig geometry. Bearings are body-frame angles from the heading;
// positive bearings are the left side, negative the right (mirror pairs).
// Light sensors include the rear pair so a robot that overshoots the light
// still senses it laterally; proximity uses the forward/side sensors only.
inline constexpr std::array<double, 4> kLightBearingsDeg = {17.0, 47.0, 90.0, 150.0};
inline constexpr std::array<double, 3> kProxBearingsDeg = {17.0, 47.0, 90.0};
inline constexpr double kSensorMountRadius = 0.037;  // on the body perimeter
inline constexpr double kProxRange = 0.05;           // R_prox
inline constexpr double kLightDistanceFloor = 0.01;  // d_min, clamps the inverse-square pole

struct SideReading {
    double left = 0.0;
    double right = 0.0;
};

struct Disc {
    Vec2 center;
    double radius = 0.0;
};

// One sensor's light reading: 0 when a box occludes the sensor-to-light
// segment, otherwise intensity * max(0, cos phi) / max(d, d_min)^2 with phi
// the angle between the sensor normal and the direction to the light.
double light_contribution(const Vec2& sensor_pos, const Vec2& sensor_normal,
                          const LightSource& light, std::span<const AxisBox> boxes);

// Per-side sums over the 8 light sensors. Only boxes occlude.
SideReading light_side_sums(const WorldSpec& world, const Pose& robot);

// Per-side sums over the 6 proximity sensors. Each sensor casts a ray along
// its normal; the contribution is clamp((R_prox - d_hit)/R_prox, 0, 1) for the
// nearest box, wall segment, or other robot disc within range, else 0.
SideReading proximity_side_sums(const WorldSpec& world, const Pose& robot,
                                std::span<const Disc> other_robots);

// Distance at which a robot driving head-on at the light first reads a side
// sum above `threshold` (bisection on the head-on response curve). Empty when
// the threshold is never reached.
std::optional<double> detection_radius(double intensity, double threshold);

}  // namespace mobsim
