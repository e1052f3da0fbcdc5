#include "mobsim/world.hpp"

#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"

namespace mobsim {

namespace {

// mt19937_64 output is pinned by the standard; the distributions are not.
// Map raw draws to doubles explicitly so worlds are bit-identical everywhere.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : gen_(seed) {}

    double uniform01() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + uniform01() * (hi - lo); }

    // Heading uniform in (-pi, pi].
    double angle() { return kPi - uniform01() * 2.0 * kPi; }

private:
    std::mt19937_64 gen_;
};

struct PlacedBody {
    enum class Shape { Disc, Box } shape;
    Vec2 position;
    double extent;  // disc radius or box half extent
};

double body_gap(const PlacedBody& a, const PlacedBody& b) {
    using Shape = PlacedBody::Shape;
    if (a.shape == Shape::Disc && b.shape == Shape::Disc)
        return (b.position - a.position).norm() - a.extent - b.extent;
    if (a.shape == Shape::Box && b.shape == Shape::Box)
        return box_box_gap({a.position, a.extent}, {b.position, b.extent});
    const PlacedBody& disc = a.shape == Shape::Disc ? a : b;
    const PlacedBody& box = a.shape == Shape::Disc ? b : a;
    return point_box_distance(disc.position, {box.position, box.extent}) - disc.extent;
}

bool clear_of_all(const PlacedBody& candidate, const std::vector<PlacedBody>& placed) {
    for (const PlacedBody& p : placed)
        if (body_gap(candidate, p) < kSpawnClearance) return false;
    return true;
}

}  // namespace

WorldSpec generate_world(std::uint64_t seed, int n_robots, int n_boxes) {
    if (n_robots < 1) throw std::invalid_argument("generate_world: n_robots must be >= 1");
    if (n_boxes < 0) throw std::invalid_argument("generate_world: n_boxes must be >= 0");

    WorldSpec spec;
    SeededRng rng(seed);
    std::vector<PlacedBody> placed;

    auto place = [&](PlacedBody::Shape shape, double extent, bool with_heading,
                     const char* what) {
        const double margin = extent + kWallClearance;
        for (int rejects = 0; rejects < kMaxPlacementRejects; ++rejects) {
            PlacedBody candidate{shape,
                                 {rng.uniform(margin, spec.arena_side - margin),
                                  rng.uniform(margin, spec.arena_side - margin)},
                                 extent};
            const double heading = with_heading ? rng.angle() : 0.0;
            if (clear_of_all(candidate, placed)) {
                placed.push_back(candidate);
                return Pose{candidate.position, heading};
            }
        }
        throw PlacementError(std::string("generate_world: could not place ") + what +
                             " after " + std::to_string(kMaxPlacementRejects) +
                             " rejected draws (overcrowded configuration)");
    };

    spec.light.position = place(PlacedBody::Shape::Disc, kLightPlacementRadius, false, "light").position;
    spec.light.intensity = kDefaultLightIntensity;
    for (int b = 0; b < n_boxes; ++b)
        spec.boxes.push_back({place(PlacedBody::Shape::Box, kBoxHalfExtent, false, "box").position,
                              kBoxHalfExtent});
    for (int r = 1; r <= n_robots; ++r)
        spec.spawns.push_back({r, place(PlacedBody::Shape::Disc, kRobotRadius, true, "robot")});
    return spec;
}

WorldSpec reduce_to_group(const WorldSpec& spec, int k) {
    if (k < 1 || k > static_cast<int>(spec.spawns.size()))
        throw std::invalid_argument("reduce_to_group: k out of range");
    WorldSpec out = spec;
    out.spawns.assign(spec.spawns.begin(), spec.spawns.begin() + k);
    return out;
}

std::string validate_world(const WorldSpec& spec) {
    std::ostringstream err;
    if (spec.arena_side <= 0.0) return "arena_side must be positive";
    if (spec.light.intensity <= 0.0) return "light intensity must be positive";

    std::vector<PlacedBody> bodies;
    std::vector<std::string> names;
    auto add = [&](PlacedBody::Shape shape, Vec2 pos, double extent, std::string name) {
        bodies.push_back({shape, pos, extent});
        names.push_back(std::move(name));
    };
    add(PlacedBody::Shape::Disc, spec.light.position, kLightPlacementRadius, "light");
    for (size_t i = 0; i < spec.boxes.size(); ++i)
        add(PlacedBody::Shape::Box, spec.boxes[i].center, spec.boxes[i].half,
            "box " + std::to_string(i));
    int prev_id = 0;
    for (const RobotSpawn& s : spec.spawns) {
        if (s.id <= prev_id) return "spawns not ordered by robot id";
        prev_id = s.id;
        add(PlacedBody::Shape::Disc, s.pose.position, kRobotRadius,
            "robot " + std::to_string(s.id));
        if (!(s.pose.heading > -kPi - 1e-12 && s.pose.heading <= kPi + 1e-12))
            return "robot " + std::to_string(s.id) + " heading outside (-pi, pi]";
    }

    for (size_t i = 0; i < bodies.size(); ++i) {
        const double m = bodies[i].extent + kWallClearance;
        const Vec2 p = bodies[i].position;
        if (p.x < m - 1e-12 || p.x > spec.arena_side - m + 1e-12 || p.y < m - 1e-12 ||
            p.y > spec.arena_side - m + 1e-12) {
            err << names[i] << " violates wall clearance";
            return err.str();
        }
        for (size_t j = i + 1; j < bodies.size(); ++j) {
            if (body_gap(bodies[i], bodies[j]) < kSpawnClearance - 1e-12) {
                err << names[i] << " and " << names[j] << " closer than spawn clearance";
                return err.str();
            }
        }
    }
    return {};
}

std::string world_to_json(const WorldSpec& spec) {
    nlohmann::ordered_json j;
    j["arena_side"] = spec.arena_side;
    j["light"] = {{"x", spec.light.position.x},
                  {"y", spec.light.position.y},
                  {"intensity", spec.light.intensity}};
    j["boxes"] = nlohmann::ordered_json::array();
    for (const AxisBox& b : spec.boxes)
        j["boxes"].push_back({{"x", b.center.x}, {"y", b.center.y}, {"half", b.half}});
    j["robots"] = nlohmann::ordered_json::array();
    for (const RobotSpawn& s : spec.spawns)
        j["robots"].push_back({{"id", s.id},
                               {"x", s.pose.position.x},
                               {"y", s.pose.position.y},
                               {"heading", s.pose.heading}});
    return j.dump(2) + "\n";
}

WorldSpec world_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("world file is not valid JSON: ") + e.what());
    }
    try {
        WorldSpec spec;
        spec.arena_side = j.at("arena_side").get<double>();
        spec.light.position = {j.at("light").at("x").get<double>(),
                               j.at("light").at("y").get<double>()};
        spec.light.intensity = j.at("light").at("intensity").get<double>();
        for (const auto& b : j.at("boxes"))
            spec.boxes.push_back({{b.at("x").get<double>(), b.at("y").get<double>()},
                                  b.at("half").get<double>()});
        for (const auto& r : j.at("robots"))
            spec.spawns.push_back({r.at("id").get<int>(),
                                   {{r.at("x").get<double>(), r.at("y").get<double>()},
                                    r.at("heading").get<double>()}});
        return spec;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(std::string("world file missing or mistyped field: ") + e.what());
    }
}

void save_world(const WorldSpec& spec, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open for writing: " + path);
    out << world_to_json(spec);
}

WorldSpec load_world(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open world file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return world_from_json(buf.str());
}

}  // namespace mobsim
