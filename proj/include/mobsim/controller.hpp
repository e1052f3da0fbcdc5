#pragma once

#include <optional>
#include <span>

#include "mobsim/comms.hpp"
#include "mobsim/sensing.hpp"

namespace mobsim {

enum class Mode { Avoiding, Mobbing };

struct ControllerState {
    Mode mode = Mode::Avoiding;
    bool has_called = false;
    std::optional<double> mob_decision_time;  // set exactly at the one-way switch
};

// Gains encode the single behavioral constraint: antipredator turns are
// sharper and faster than obstacle avoidance (k_fear, k_mob > k_obstacle).
// light_threshold puts the head-on detection radius at roughly 0.5 m for the
// default light intensity (see the calibration sweep in the tests).
struct ControllerParams {
    double omega_base = 4.0;        // rad/s, no-stimulus wheel speed
    double omega_max = 6.28;        // rad/s clamp, both signs
    double k_obstacle = 1.5;        // rad/s per unit proximity
    double k_fear = 5.0;            // rad/s per unit normalized light, Avoiding
    double k_mob = 6.0;             // rad/s per unit normalized light, Mobbing
    double light_threshold = 12.0;  // I_th, raw side-sum units
    double light_saturation = 50.0; // I_sat, side-sum normalizer for the motor law
    bool call_once = false;         // emit at most one Call per robot when set
};

struct WheelCommand {
    double left = 0.0;
    double right = 0.0;
};

struct Decision {
    ControllerState state;
    WheelCommand wheels;
    bool send_call = false;
    bool send_ack = false;
};

// One control step. Protocol phase first:
//   1. any Call in the inbox -> reply with an Ack; an Avoiding robot also
//      switches to Mobbing (robots already Mobbing still reply).
//   2. otherwise an Avoiding robot that has called and finds an Ack in the
//      inbox switches to Mobbing.
//   3. an Avoiding robot whose peak light side-sum exceeds light_threshold
//      emits a Call (every qualifying tick unless call_once).
// The Avoiding->Mobbing switch is absorbing; mob_decision_time is set to
// `now` exactly when it happens.
// Motor phase: wheels start at omega_base; proximity on one side slows the
// opposite wheel (gentle turn away); light slows the opposite wheel while
// Avoiding (fast turn away) and speeds it while Mobbing (sharp turn toward).
// Both wheels clamp to [-omega_max, omega_max]. Pure function.
Decision decide(const ControllerState& state, const SideReading& light,
                const SideReading& prox, std::span<const Message> inbox,
                const ControllerParams& params, double now);

}  // namespace mobsim
