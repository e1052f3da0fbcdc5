#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "mobsim/errors.hpp"
#include "mobsim/world.hpp"

using namespace mobsim;

namespace {

// Brute-force audit, independent of validate_world: wall clearance and
// pairwise body clearance straight from the definitions.
void audit_world(const WorldSpec& w) {
    struct Body {
        bool is_box;
        Vec2 pos;
        double extent;
    };
    std::vector<Body> bodies;
    bodies.push_back({false, w.light.position, kLightPlacementRadius});
    for (const AxisBox& box : w.boxes) bodies.push_back({true, box.center, box.half});
    for (const RobotSpawn& spawn : w.spawns) bodies.push_back({false, spawn.pose.position, kRobotRadius});

    for (const Body& body : bodies) {
        CHECK(body.pos.x - body.extent >= kWallClearance - 1e-12);
        CHECK(body.pos.x + body.extent <= w.arena_side - kWallClearance + 1e-12);
        CHECK(body.pos.y - body.extent >= kWallClearance - 1e-12);
        CHECK(body.pos.y + body.extent <= w.arena_side - kWallClearance + 1e-12);
    }
    for (std::size_t i = 0; i < bodies.size(); ++i)
        for (std::size_t j = i + 1; j < bodies.size(); ++j) {
            const Body& p = bodies[i];
            const Body& q = bodies[j];
            double gap;
            if (p.is_box && q.is_box)
                gap = box_box_gap({p.pos, p.extent}, {q.pos, q.extent});
            else if (p.is_box)
                gap = point_box_distance(q.pos, {p.pos, p.extent}) - q.extent;
            else if (q.is_box)
                gap = point_box_distance(p.pos, {q.pos, q.extent}) - p.extent;
            else
                gap = (p.pos - q.pos).norm() - p.extent - q.extent;
            CHECK(gap >= kSpawnClearance - 1e-12);
        }
    for (const RobotSpawn& spawn : w.spawns) {
        CHECK(spawn.pose.heading > -kPi);
        CHECK(spawn.pose.heading <= kPi);
    }
}

}  // namespace

TEST_CASE("generate_world is deterministic and correctly sized") {
    const WorldSpec a = generate_world(7, 10, 3);
    const WorldSpec b = generate_world(7, 10, 3);
    CHECK(world_to_json(a) == world_to_json(b));

    CHECK(a.arena_side == 1.0);
    CHECK(a.boxes.size() == 3);
    CHECK(a.light.intensity == kDefaultLightIntensity);
    REQUIRE(a.spawns.size() == 10);
    for (int i = 0; i < 10; ++i) CHECK(a.spawns[i].id == i + 1);
}

TEST_CASE("generated worlds satisfy the placement invariants") {
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        const WorldSpec w = generate_world(seed, 10, 3);
        CHECK(validate_world(w) == "");
        audit_world(w);
    }
}

TEST_CASE("reduce_to_group keeps the low-id prefix") {
    const WorldSpec w = generate_world(11, 10, 3);

    const WorldSpec trio = reduce_to_group(w, 3);
    REQUIRE(trio.spawns.size() == 3);
    for (int i = 0; i < 3; ++i) {
        CHECK(trio.spawns[i].id == w.spawns[i].id);
        CHECK(trio.spawns[i].pose.position == w.spawns[i].pose.position);
        CHECK(trio.spawns[i].pose.heading == w.spawns[i].pose.heading);
    }
    CHECK(trio.boxes.size() == w.boxes.size());
    CHECK(trio.light.position == w.light.position);

    CHECK(world_to_json(reduce_to_group(w, 10)) == world_to_json(w));
    CHECK(world_to_json(reduce_to_group(reduce_to_group(w, 10), 3)) ==
          world_to_json(reduce_to_group(w, 3)));
    CHECK(reduce_to_group(w, 1).spawns.size() == 1);

    CHECK_THROWS_AS(reduce_to_group(w, 0), std::invalid_argument);
    CHECK_THROWS_AS(reduce_to_group(w, 11), std::invalid_argument);
}

TEST_CASE("world JSON round-trip is lossless") {
    const WorldSpec w = generate_world(23, 10, 3);
    const std::string text = world_to_json(w);
    const WorldSpec back = world_from_json(text);
    CHECK(world_to_json(back) == text);

    CHECK(back.light.position.x == w.light.position.x);
    CHECK(back.spawns[4].pose.heading == w.spawns[4].pose.heading);
    CHECK(back.boxes[2].center.y == w.boxes[2].center.y);
}

TEST_CASE("world parsing rejects malformed input") {
    CHECK_THROWS_AS(world_from_json("not json at all"), DataError);
    CHECK_THROWS_AS(world_from_json("{}"), DataError);
    CHECK_THROWS_AS(world_from_json(R"({"arena_side": 1.0})"), DataError);
    CHECK_THROWS_AS(load_world("/nonexistent/world.json"), DataError);
}

TEST_CASE("overcrowded arenas exhaust placement") {
    CHECK_THROWS_AS(generate_world(1, 150, 0), PlacementError);
}
