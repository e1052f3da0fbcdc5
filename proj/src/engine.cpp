#include "mobsim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <string>

#include "json.hpp"
#include "mobsim/errors.hpp"
#include "mobsim/numfmt.hpp"
#include "mobsim/sensing.hpp"

namespace mobsim {

const char* event_kind_str(EventKind kind) {
    switch (kind) {
        case EventKind::CallSent: return "call_sent";
        case EventKind::AckSent: return "ack_sent";
        case EventKind::MobDecision: return "mob_decision";
    }
    return "?";
}

const char* status_str(RunStatus status) {
    switch (status) {
        case RunStatus::Unanimous: return "unanimous";
        case RunStatus::Partial: return "partial";
        case RunStatus::Failed: return "failed";
    }
    return "?";
}

Pose integrate_unicycle(const Pose& pose, const WheelCommand& wheels,
                        double wheel_radius, double axle_length, double dt) {
    const double v = wheel_radius * (wheels.left + wheels.right) / 2.0;
    const double omega = wheel_radius * (wheels.right - wheels.left) / axle_length;

    Pose next = pose;
    if (std::abs(omega) < 1e-12) {
        next.position += unit_vec(pose.heading) * (v * dt);
        return next;
    }
    // Exact arc: the robot traces a circle of radius v/omega.
    const double h0 = pose.heading;
    const double h1 = h0 + omega * dt;
    const double rho = v / omega;
    next.position.x += rho * (std::sin(h1) - std::sin(h0));
    next.position.y += rho * (std::cos(h0) - std::cos(h1));
    next.heading = wrap_angle(h1);
    return next;
}

RunStatus classify(int n_mobbing, int group_size) {
    if (n_mobbing == group_size) return RunStatus::Unanimous;
    if (n_mobbing == 0) return RunStatus::Failed;
    return RunStatus::Partial;
}

SimState init_state(const WorldSpec& world) {
    SimState state;
    state.poses.reserve(world.spawns.size());
    state.controllers.assign(world.spawns.size(), ControllerState{});
    for (const RobotSpawn& spawn : world.spawns) state.poses.push_back(spawn.pose);
    return state;
}

namespace {

void audit_tick(const SimState& state, const WorldSpec& world, AuditSummary& audit) {
    const std::size_t n = state.poses.size();
    for (std::size_t i = 0; i < n; ++i) {
        const Vec2& p = state.poses[i].position;
        for (std::size_t j = i + 1; j < n; ++j) {
            const double depth = circle_circle_depth(p, kRobotRadius,
                                                     state.poses[j].position, kRobotRadius);
            audit.max_robot_overlap = std::max(audit.max_robot_overlap, depth);
        }
        for (const AxisBox& box : world.boxes) {
            const double depth = circle_box_depth(p, kRobotRadius, box);
            audit.max_box_overlap = std::max(audit.max_box_overlap, depth);
        }
        const double excursion =
            std::max({kRobotRadius - p.x, p.x + kRobotRadius - world.arena_side,
                      kRobotRadius - p.y, p.y + kRobotRadius - world.arena_side, 0.0});
        audit.max_wall_excursion = std::max(audit.max_wall_excursion, excursion);
    }
}

}  // namespace

void step(SimState& state, const WorldSpec& world, const SimConfig& config,
          std::vector<Event>* events, AuditSummary* audit) {
    const std::size_t n = world.spawns.size();
    const double now = static_cast<double>(state.tick + 1) * config.dt;

    // Phase 1: hand out messages emitted last tick, judged against where the
    // receivers are right now.
    std::vector<Receiver> receivers;
    receivers.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        receivers.push_back({world.spawns[i].id, state.poses[i].position});
    const std::vector<std::vector<Message>> inboxes =
        state.bus.deliver(receivers, config.range_policy);

    // Phase 2: every robot senses and decides from the same beginning-of-tick
    // snapshot, in ascending id order.
    const std::vector<Pose> snapshot = state.poses;
    std::vector<WheelCommand> wheels(n);
    std::vector<char> sent_call(n, 0), sent_ack(n, 0), switched(n, 0);

    std::vector<Disc> others;
    others.reserve(n > 0 ? n - 1 : 0);
    for (std::size_t i = 0; i < n; ++i) {
        others.clear();
        for (std::size_t j = 0; j < n; ++j)
            if (j != i) others.push_back({snapshot[j].position, kRobotRadius});

        const SideReading light = light_side_sums(world, snapshot[i]);
        const SideReading prox = proximity_side_sums(world, snapshot[i], others);
        const Mode before = state.controllers[i].mode;
        const Decision d =
            decide(state.controllers[i], light, prox, inboxes[i], config.controller, now);
        state.controllers[i] = d.state;
        wheels[i] = d.wheels;
        sent_call[i] = d.send_call;
        sent_ack[i] = d.send_ack;
        switched[i] = before == Mode::Avoiding && d.state.mode == Mode::Mobbing;

        const int id = world.spawns[i].id;
        if (d.send_ack)
            state.bus.broadcast({MessageKind::Ack, id, snapshot[i].position, state.tick},
                                state.tick);
        if (d.send_call)
            state.bus.broadcast({MessageKind::Call, id, snapshot[i].position, state.tick},
                                state.tick);
    }

    // Phase 3: exact arc update per robot.
    for (std::size_t i = 0; i < n; ++i)
        state.poses[i] = integrate_unicycle(snapshot[i], wheels[i], config.wheel_radius,
                                            config.axle_length, config.dt);

    // Phase 4: fixed-point collision passes; robots push each other apart,
    // boxes and walls are immovable. At least collision_passes run; after
    // that, passes continue until nothing moved (pair resolutions interact in
    // a pile, so a fixed count leaves residual overlap there).
    for (int pass = 0; pass < kMaxCollisionPasses; ++pass) {
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                const PairPush push =
                    resolve_circle_circle(state.poses[i].position, kRobotRadius,
                                          state.poses[j].position, kRobotRadius);
                state.poses[i].position += push.first;
                state.poses[j].position += push.second;
                worst = std::max(worst, push.second.norm());
            }
        for (std::size_t i = 0; i < n; ++i)
            for (const AxisBox& box : world.boxes) {
                const Vec2 push =
                    resolve_circle_box(state.poses[i].position, kRobotRadius, box);
                state.poses[i].position += push;
                worst = std::max(worst, push.norm());
            }
        for (std::size_t i = 0; i < n; ++i) {
            Vec2& p = state.poses[i].position;
            const Vec2 before = p;
            p.x = std::clamp(p.x, kRobotRadius, world.arena_side - kRobotRadius);
            p.y = std::clamp(p.y, kRobotRadius, world.arena_side - kRobotRadius);
            worst = std::max(worst, (p - before).norm());
        }
        if (pass + 1 >= config.collision_passes && worst <= kCollisionCorrectionTol) break;
    }

    if (audit) audit_tick(state, world, *audit);

    // Phase 5: log this tick's traffic and switches. Replies and switches
    // react to last tick's messages, so they are logged ahead of fresh calls.
    if (events) {
        for (std::size_t i = 0; i < n; ++i)
            if (sent_ack[i]) events->push_back({now, world.spawns[i].id, EventKind::AckSent});
        for (std::size_t i = 0; i < n; ++i)
            if (switched[i])
                events->push_back({now, world.spawns[i].id, EventKind::MobDecision});
        for (std::size_t i = 0; i < n; ++i)
            if (sent_call[i]) events->push_back({now, world.spawns[i].id, EventKind::CallSent});
    }

    ++state.tick;
}

namespace {

void append_trace(std::vector<TraceRow>& trace, const SimState& state,
                  const WorldSpec& world) {
    for (std::size_t i = 0; i < world.spawns.size(); ++i)
        trace.push_back({state.tick, world.spawns[i].id, state.poses[i].position,
                         state.poses[i].heading, state.controllers[i].mode});
}

}  // namespace

RunOutput run(const WorldSpec& world, const SimConfig& config) {
    RunOutput out;
    out.record.range_policy = config.range_policy;
    out.record.group_size = static_cast<int>(world.spawns.size());
    out.record.audit.audited = config.audit;

    SimState state = init_state(world);
    const long n_ticks = static_cast<long>(std::floor(config.duration / config.dt + 1e-9));

    if (config.trace_stride > 0) append_trace(out.trace, state, world);
    AuditSummary* audit = config.audit ? &out.record.audit : nullptr;

    for (long t = 0; t < n_ticks; ++t) {
        step(state, world, config, &out.events, audit);
        if (config.trace_stride > 0 &&
            (state.tick % config.trace_stride == 0 || state.tick == n_ticks))
            append_trace(out.trace, state, world);
    }

    int n_mobbing = 0;
    out.record.robots.reserve(world.spawns.size());
    for (std::size_t i = 0; i < world.spawns.size(); ++i) {
        const ControllerState& cs = state.controllers[i];
        const bool mobbed = cs.mode == Mode::Mobbing;
        if (mobbed) ++n_mobbing;
        out.record.robots.push_back({world.spawns[i].id, mobbed, cs.mob_decision_time});
    }
    out.record.n_mobbing = n_mobbing;
    out.record.status = classify(n_mobbing, out.record.group_size);
    out.record.participation_pct =
        out.record.group_size > 0 ? 100.0 * n_mobbing / out.record.group_size : 0.0;

    for (const Event& e : out.events)
        if (e.kind == EventKind::CallSent) {
            out.record.first_call_time_s = e.time_s;
            break;
        }
    return out;
}

void write_events_jsonl(std::ostream& out, std::span<const Event> events) {
    for (const Event& e : events) {
        nlohmann::ordered_json j;
        j["time_s"] = e.time_s;
        j["robot_id"] = e.robot_id;
        j["kind"] = event_kind_str(e.kind);
        if (e.kind == EventKind::CallSent)
            j["payload"] = kCallPayload;
        else if (e.kind == EventKind::AckSent)
            j["payload"] = kAckPayload;
        out << j.dump() << '\n';
    }
}

void write_trace_csv(std::ostream& out, std::span<const TraceRow> trace) {
    out << "tick,robot_id,x,y,heading,mode\n";
    for (const TraceRow& row : trace) {
        out << row.tick << ',' << row.robot_id << ',' << format_fixed(row.position.x, 6)
            << ',' << format_fixed(row.position.y, 6) << ','
            << format_fixed(row.heading, 6) << ','
            << (row.mode == Mode::Mobbing ? "mobbing" : "avoiding") << '\n';
    }
}

std::vector<TraceRow> load_trace_csv(std::istream& in) {
    std::vector<TraceRow> trace;
    std::string line;
    if (!std::getline(in, line)) throw DataError("trace file is empty");
    if (line != "tick,robot_id,x,y,heading,mode")
        throw DataError("trace file has unexpected header: " + line);

    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::istringstream fields(line);
        std::string cell;
        TraceRow row;
        try {
            std::getline(fields, cell, ',');
            row.tick = std::stol(cell);
            std::getline(fields, cell, ',');
            row.robot_id = std::stoi(cell);
            std::getline(fields, cell, ',');
            row.position.x = std::stod(cell);
            std::getline(fields, cell, ',');
            row.position.y = std::stod(cell);
            std::getline(fields, cell, ',');
            row.heading = std::stod(cell);
        } catch (const std::exception&) {
            throw DataError("trace line " + std::to_string(line_no) + " is malformed: " + line);
        }
        if (!std::getline(fields, cell))
            throw DataError("trace line " + std::to_string(line_no) + " is malformed: " + line);
        if (cell == "mobbing")
            row.mode = Mode::Mobbing;
        else if (cell == "avoiding")
            row.mode = Mode::Avoiding;
        else
            throw DataError("trace line " + std::to_string(line_no) + " has unknown mode: " + cell);
        trace.push_back(row);
    }
    return trace;
}

}  // namespace mobsim
