#include <cmath>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "json.hpp"
#include "mobsim/engine.hpp"
#include "mobsim/errors.hpp"
#include "support/test_rng.hpp"

using namespace mobsim;
using testsupport::TestRng;

namespace {

constexpr double kR = 0.0205;  // wheel radius used throughout
constexpr double kL = 0.053;   // axle length

// Classical RK4 on the unicycle ODE, many substeps; the closed-form arc
// update must agree to well below 1e-9.
Pose rk4_unicycle(const Pose& pose, const WheelCommand& w, double dt, int substeps) {
    const double v = kR * (w.left + w.right) / 2.0;
    const double omega = kR * (w.right - w.left) / kL;
    double x = pose.position.x, y = pose.position.y, h = pose.heading;
    const double hstep = dt / substeps;
    for (int s = 0; s < substeps; ++s) {
        const double k1x = v * std::cos(h), k1y = v * std::sin(h);
        const double k2x = v * std::cos(h + 0.5 * hstep * omega);
        const double k2y = v * std::sin(h + 0.5 * hstep * omega);
        const double k4x = v * std::cos(h + hstep * omega);
        const double k4y = v * std::sin(h + hstep * omega);
        x += hstep * (k1x + 4.0 * k2x + k4x) / 6.0;
        y += hstep * (k1y + 4.0 * k2y + k4y) / 6.0;
        h += hstep * omega;
    }
    return {{x, y}, wrap_angle(h)};
}

// Two robots facing a bright light from either side; both cross the light
// threshold on the very first tick.
WorldSpec handshake_world() {
    WorldSpec world;
    world.light = {{0.5, 0.8}, 2.0};
    world.spawns.push_back({1, {{0.4, 0.5}, std::atan2(0.3, 0.1)}});
    world.spawns.push_back({2, {{0.6, 0.5}, std::atan2(0.3, -0.1)}});
    return world;
}

SimConfig short_config(double duration) {
    SimConfig config;
    config.duration = duration;
    config.trace_stride = 1;
    config.audit = true;
    return config;
}

std::string events_text(const std::vector<Event>& events) {
    std::ostringstream out;
    write_events_jsonl(out, events);
    return out.str();
}

std::string trace_text(const std::vector<TraceRow>& trace) {
    std::ostringstream out;
    write_trace_csv(out, trace);
    return out.str();
}

}  // namespace

TEST_CASE("equal wheel speeds drive a straight line") {
    const Pose start{{0.2, 0.3}, 0.7};
    const Pose end = integrate_unicycle(start, {4.0, 4.0}, kR, kL, 0.032);
    const double dist = kR * 4.0 * 0.032;
    CHECK(end.heading == start.heading);
    CHECK((end.position - start.position).norm() == doctest::Approx(dist).epsilon(1e-12));
    CHECK(end.position.x ==
          doctest::Approx(start.position.x + dist * std::cos(0.7)).epsilon(1e-12));
    CHECK(end.position.y ==
          doctest::Approx(start.position.y + dist * std::sin(0.7)).epsilon(1e-12));
}

TEST_CASE("opposite wheel speeds spin in place") {
    const Pose start{{0.5, 0.5}, -1.0};
    const Pose end = integrate_unicycle(start, {-3.0, 3.0}, kR, kL, 0.1);
    CHECK(end.position.x == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(end.position.y == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(end.heading == doctest::Approx(-1.0 + kR * 6.0 / kL * 0.1).epsilon(1e-12));
}

TEST_CASE("single-wheel drive follows the expected arc") {
    const Pose start{{0.5, 0.5}, 0.0};
    const WheelCommand w{0.0, 6.28};
    const Pose end = integrate_unicycle(start, w, kR, kL, 0.032);
    const double v = kR * 6.28 / 2.0;
    const double omega = kR * 6.28 / kL;
    CHECK(v == doctest::Approx(0.06437).epsilon(1e-3));
    CHECK(omega == doctest::Approx(0.0205 * 6.28 / 0.053).epsilon(1e-12));
    CHECK(end.heading == doctest::Approx(omega * 0.032).epsilon(1e-12));
    const Pose oracle = rk4_unicycle(start, w, 0.032, 4096);
    CHECK(end.position.x == doctest::Approx(oracle.position.x).epsilon(1e-10));
    CHECK(end.position.y == doctest::Approx(oracle.position.y).epsilon(1e-10));
}

TEST_CASE("arc update matches high-resolution integration on random inputs") {
    TestRng rng(811);
    for (int i = 0; i < 300; ++i) {
        const Pose start{{rng.uniform(0, 1), rng.uniform(0, 1)},
                         rng.uniform(-3.14, 3.14)};
        const WheelCommand w{rng.uniform(-6.28, 6.28), rng.uniform(-6.28, 6.28)};
        const Pose got = integrate_unicycle(start, w, kR, kL, 0.032);
        const Pose want = rk4_unicycle(start, w, 0.032, 2048);
        CHECK(std::abs(got.position.x - want.position.x) < 1e-9);
        CHECK(std::abs(got.position.y - want.position.y) < 1e-9);
        CHECK(std::abs(wrap_angle(got.heading - want.heading)) < 1e-9);
        CHECK(got.heading > -kPi - 1e-15);
        CHECK(got.heading <= kPi + 1e-15);
    }
}

TEST_CASE("status classification by mobbing count") {
    CHECK(classify(10, 10) == RunStatus::Unanimous);
    CHECK(classify(0, 10) == RunStatus::Failed);
    CHECK(classify(4, 10) == RunStatus::Partial);
    CHECK(classify(1, 1) == RunStatus::Unanimous);
    CHECK(std::string(status_str(RunStatus::Unanimous)) == "unanimous");
    CHECK(std::string(status_str(RunStatus::Partial)) == "partial");
    CHECK(std::string(status_str(RunStatus::Failed)) == "failed");
}

TEST_CASE("two facing robots complete the call-ack handshake") {
    const WorldSpec world = handshake_world();
    const RunOutput out = run(world, short_config(2.0));

    CHECK(out.record.status == RunStatus::Unanimous);
    CHECK(out.record.n_mobbing == 2);
    CHECK(out.record.participation_pct == 100.0);
    REQUIRE(out.record.first_call_time_s.has_value());
    CHECK(*out.record.first_call_time_s == doctest::Approx(0.032).epsilon(1e-12));

    // Both switch on the tick after the first calls.
    REQUIRE(out.record.robots.size() == 2);
    for (const RobotOutcome& robot : out.record.robots) {
        CHECK(robot.mobbed);
        REQUIRE(robot.decision_time_s.has_value());
        CHECK(*robot.decision_time_s == doctest::Approx(0.064).epsilon(1e-12));
    }

    // Tick-1 log: replies first, then the switches, then any fresh calls.
    std::vector<EventKind> at_064;
    for (const Event& e : out.events)
        if (std::abs(e.time_s - 0.064) < 1e-12) at_064.push_back(e.kind);
    REQUIRE(at_064.size() == 4);
    CHECK(at_064[0] == EventKind::AckSent);
    CHECK(at_064[1] == EventKind::AckSent);
    CHECK(at_064[2] == EventKind::MobDecision);
    CHECK(at_064[3] == EventKind::MobDecision);
}

TEST_CASE("event log is consistent with the outcome record") {
    const WorldSpec world = generate_world(901, 10, 3);
    SimConfig config = short_config(60.0);
    config.trace_stride = 0;
    const RunOutput out = run(world, config);

    int decisions = 0;
    double last_t = 0.0;
    for (const Event& e : out.events) {
        CHECK(e.time_s >= last_t);  // tick-ordered log
        last_t = e.time_s;
        if (e.kind == EventKind::MobDecision) ++decisions;
    }
    CHECK(decisions == out.record.n_mobbing);

    // Decision times in the record match mob_decision events per robot.
    for (const RobotOutcome& robot : out.record.robots) {
        if (!robot.mobbed) continue;
        bool found = false;
        for (const Event& e : out.events)
            if (e.kind == EventKind::MobDecision && e.robot_id == robot.id) {
                CHECK(e.time_s == *robot.decision_time_s);
                found = true;
                break;
            }
        CHECK(found);
    }

    // Infinite range: one call wakes everyone, callers get acks one tick
    // later, so every switch lands within two ticks of the first call.
    REQUIRE(out.record.first_call_time_s.has_value());
    const double cutoff = *out.record.first_call_time_s + 2 * config.dt + 1e-12;
    for (const RobotOutcome& robot : out.record.robots) {
        REQUIRE(robot.decision_time_s.has_value());
        CHECK(*robot.decision_time_s <= cutoff);
    }
    CHECK(out.record.status == RunStatus::Unanimous);
}

TEST_CASE("a lone robot has nobody to convince") {
    const WorldSpec world = reduce_to_group(generate_world(902, 10, 3), 1);
    SimConfig config = short_config(5.0);
    config.trace_stride = 0;
    const RunOutput out = run(world, config);
    CHECK(out.record.status == RunStatus::Failed);
    CHECK(out.record.n_mobbing == 0);
    CHECK(out.record.participation_pct == 0.0);
    REQUIRE(out.record.robots.size() == 1);
    CHECK_FALSE(out.record.robots[0].mobbed);
    for (const Event& e : out.events) CHECK(e.kind == EventKind::CallSent);
}

TEST_CASE("runs are deterministic down to the serialized byte") {
    const WorldSpec world = generate_world(903, 10, 3);
    SimConfig config = short_config(10.0);
    const RunOutput a = run(world, config);
    const RunOutput b = run(world, config);
    CHECK(events_text(a.events) == events_text(b.events));
    CHECK(trace_text(a.trace) == trace_text(b.trace));
    CHECK(a.record.n_mobbing == b.record.n_mobbing);
    CHECK(a.record.participation_pct == b.record.participation_pct);
    CHECK(a.record.first_call_time_s == b.record.first_call_time_s);
}

TEST_CASE("audited full run stays collision-free and inside the arena") {
    const WorldSpec world = generate_world(904, 10, 3);
    SimConfig config = short_config(60.0);
    config.trace_stride = 0;
    const RunOutput out = run(world, config);
    CHECK(out.record.audit.audited);
    CHECK(out.record.audit.max_robot_overlap <= 1e-6);
    CHECK(out.record.audit.max_box_overlap <= 1e-6);
    CHECK(out.record.audit.max_wall_excursion <= 1e-9);
}

TEST_CASE("trace stride selects ticks") {
    const WorldSpec world = handshake_world();
    SimConfig config = short_config(1.0);  // 31 ticks

    config.trace_stride = 1;
    const RunOutput every = run(world, config);
    CHECK(every.trace.size() == 32u * 2u);  // ticks 0..31, two robots

    config.trace_stride = 0;
    CHECK(run(world, config).trace.empty());

    config.trace_stride = 5;
    const RunOutput strided = run(world, config);
    std::set<long> ticks;
    for (const TraceRow& row : strided.trace) ticks.insert(row.tick);
    CHECK(ticks == std::set<long>{0, 5, 10, 15, 20, 25, 30, 31});  // final kept
}

TEST_CASE("event stream serializes as one JSON object per line") {
    const WorldSpec world = handshake_world();
    const RunOutput out = run(world, short_config(1.0));
    REQUIRE_FALSE(out.events.empty());

    std::istringstream in(events_text(out.events));
    std::string line;
    std::size_t n_lines = 0;
    while (std::getline(in, line)) {
        const nlohmann::json j = nlohmann::json::parse(line);
        CHECK(j.at("time_s").is_number());
        CHECK(j.at("robot_id").is_number_integer());
        const std::string kind = j.at("kind").get<std::string>();
        if (kind == "call_sent")
            CHECK(j.at("payload").get<std::string>() == "must mob");
        else if (kind == "ack_sent")
            CHECK(j.at("payload").get<std::string>() == "ok");
        else {
            CHECK(kind == "mob_decision");
            CHECK_FALSE(j.contains("payload"));
        }
        ++n_lines;
    }
    CHECK(n_lines == out.events.size());
}

TEST_CASE("trace CSV round-trips through the loader") {
    const WorldSpec world = handshake_world();
    const RunOutput out = run(world, short_config(1.0));

    std::istringstream in(trace_text(out.trace));
    const std::vector<TraceRow> loaded = load_trace_csv(in);
    REQUIRE(loaded.size() == out.trace.size());
    for (std::size_t i = 0; i < loaded.size(); ++i) {
        CHECK(loaded[i].tick == out.trace[i].tick);
        CHECK(loaded[i].robot_id == out.trace[i].robot_id);
        CHECK(std::abs(loaded[i].position.x - out.trace[i].position.x) <= 5e-7);
        CHECK(std::abs(loaded[i].position.y - out.trace[i].position.y) <= 5e-7);
        CHECK(std::abs(loaded[i].heading - out.trace[i].heading) <= 5e-7);
        CHECK(loaded[i].mode == out.trace[i].mode);
    }
}

TEST_CASE("trace loader rejects malformed input") {
    std::istringstream bad_header("tick,robot,x,y,heading,mode\n");
    CHECK_THROWS_AS(load_trace_csv(bad_header), DataError);

    std::istringstream bad_row("tick,robot_id,x,y,heading,mode\n1,2,nope,0.4,0.1,avoiding\n");
    CHECK_THROWS_AS(load_trace_csv(bad_row), DataError);

    std::istringstream bad_mode("tick,robot_id,x,y,heading,mode\n1,2,0.3,0.4,0.1,hiding\n");
    CHECK_THROWS_AS(load_trace_csv(bad_mode), DataError);

    std::istringstream empty("");
    CHECK_THROWS_AS(load_trace_csv(empty), DataError);
}
