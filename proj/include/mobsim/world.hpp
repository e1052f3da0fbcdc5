#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mobsim/errors.hpp"
#include "mobsim/geom.hpp"

namespace mobsim {

inline constexpr double kArenaSide = 1.0;
inline constexpr double kRobotRadius = 0.037;        // e-puck-like body, 7.4 cm diameter
inline constexpr double kBoxHalfExtent = 0.05;       // 10 cm wooden boxes
inline constexpr double kDefaultLightIntensity = 2.0;
inline constexpr double kLightPlacementRadius = 0.02;  // placement disc only, no physics
inline constexpr double kSpawnClearance = 0.02;
inline constexpr double kWallClearance = 0.01;
inline constexpr int kMaxPlacementRejects = 10000;

struct LightSource {
    Vec2 position;
    double intensity = kDefaultLightIntensity;
};

struct RobotSpawn {
    int id = 0;  // 1-based; spawn list is ordered by id
    Pose pose;
};

/// Immutable arena description: square arena, opaque boxes, one light,
/// ordered robot spawn poses.
struct WorldSpec {
    double arena_side = kArenaSide;
    std::vector<AxisBox> boxes;
    LightSource light;
    std::vector<RobotSpawn> spawns;

    std::array<Segment, 4> walls() const {
        const double s = arena_side;
        return {Segment{{0, 0}, {s, 0}}, Segment{{s, 0}, {s, s}},
                Segment{{s, s}, {0, s}}, Segment{{0, s}, {0, 0}}};
    }
};

// Deterministic randomized world: placement by rejection sampling from a
// seeded mt19937_64 (explicit 53-bit uniform mapping, no std distributions,
// so output is identical across platforms). Placement order: light, boxes,
// robots by id. Throws PlacementError after kMaxPlacementRejects rejected
// draws for a single body.
WorldSpec generate_world(std::uint64_t seed, int n_robots, int n_boxes);

/// Keeps the spawns of robots #1..#k, drops the rest; everything else unchanged.
WorldSpec reduce_to_group(const WorldSpec& spec, int k);

// Spawn-time validity: bodies inside the arena with wall clearance, pairwise
// clearance >= kSpawnClearance, spawns ordered by id. Returns an empty string
// when valid, else a description of the first violation.
std::string validate_world(const WorldSpec& spec);

std::string world_to_json(const WorldSpec& spec);
WorldSpec world_from_json(const std::string& text);  // throws DataError

void save_world(const WorldSpec& spec, const std::string& path);
WorldSpec load_world(const std::string& path);  // throws DataError

}  // namespace mobsim
