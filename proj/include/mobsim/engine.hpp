#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "mobsim/comms.hpp"
#include "mobsim/controller.hpp"
#include "mobsim/world.hpp"

namespace mobsim {

enum class EventKind { CallSent, AckSent, MobDecision };

const char* event_kind_str(EventKind kind);

struct Event {
    double time_s = 0.0;
    int robot_id = 0;
    EventKind kind = EventKind::CallSent;
};

enum class RunStatus { Unanimous, Partial, Failed };

const char* status_str(RunStatus status);

// Collision passes beyond SimConfig::collision_passes keep running until the
// largest correction in a pass drops below the tolerance (a real fixed
// point), so a dense pile of robots still ends every tick separated. The cap
// only guards against geometrically unsatisfiable configurations.
inline constexpr int kMaxCollisionPasses = 512;
inline constexpr double kCollisionCorrectionTol = 1e-12;

struct SimConfig {
    double dt = 0.032;       // control step, seconds
    double duration = 60.0;  // per-run budget, seconds
    RangePolicy range_policy = RangePolicy::infinite();
    ControllerParams controller;
    double wheel_radius = 0.0205;  // meters
    double axle_length = 0.053;    // meters
    int collision_passes = 4;      // minimum passes per tick
    bool audit = false;      // track overlap / containment extrema per tick
    int trace_stride = 0;    // 0 = no trace, 1 = every tick, k = every k ticks
};

struct RobotOutcome {
    int id = 0;
    bool mobbed = false;
    std::optional<double> decision_time_s;
};

struct AuditSummary {
    bool audited = false;
    double max_robot_overlap = 0.0;   // meters, post-resolution, any tick
    double max_box_overlap = 0.0;     // meters
    double max_wall_excursion = 0.0;  // how far a disc protruded past a wall
};

struct RunRecord {
    int run_id = 0;                      // assigned by the harness
    int world_id = 0;                    // 1-based world index; 0 standalone
    std::uint64_t world_seed = 0;        // generator seed; 0 standalone
    RangePolicy range_policy = RangePolicy::infinite();
    int group_size = 0;
    RunStatus status = RunStatus::Failed;
    int n_mobbing = 0;
    double participation_pct = 0.0;
    std::vector<RobotOutcome> robots;    // ordered by robot id
    std::optional<double> first_call_time_s;
    AuditSummary audit;
};

struct TraceRow {
    long tick = 0;
    int robot_id = 0;
    Vec2 position;
    double heading = 0.0;
    Mode mode = Mode::Avoiding;
};

struct RunOutput {
    RunRecord record;
    std::vector<Event> events;
    std::vector<TraceRow> trace;
};

struct SimState {
    long tick = 0;
    std::vector<Pose> poses;                    // aligned with world spawns
    std::vector<ControllerState> controllers;   // aligned with world spawns
    RadioBus bus;
};

/// Closed-form differential-drive arc update over one step.
Pose integrate_unicycle(const Pose& pose, const WheelCommand& wheels,
                        double wheel_radius, double axle_length, double dt);

/// Unanimous iff all Mobbing, Failed iff none, Partial otherwise.
RunStatus classify(int n_mobbing, int group_size);

SimState init_state(const WorldSpec& world);

// One simulation tick, fixed phase order: deliver last tick's messages ->
// decide each robot in ascending id order from beginning-of-tick snapshots ->
// integrate kinematics -> resolve collisions (fixed-point passes) -> log
// events at time (tick+1)*dt. Within a tick, replies and switches triggered
// by last tick's traffic are logged before fresh calls.
void step(SimState& state, const WorldSpec& world, const SimConfig& config,
          std::vector<Event>* events, AuditSummary* audit);

// Full run from the spawn poses, all controllers starting in Avoiding.
// Deterministic function of (world, config).
RunOutput run(const WorldSpec& world, const SimConfig& config);

void write_events_jsonl(std::ostream& out, std::span<const Event> events);
void write_trace_csv(std::ostream& out, std::span<const TraceRow> trace);
std::vector<TraceRow> load_trace_csv(std::istream& in);  // throws DataError

}  // namespace mobsim
