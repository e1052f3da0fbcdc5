#include "mobsim/controller.hpp"

#include <algorithm>

namespace mobsim {

Decision decide(const ControllerState& state, const SideReading& light,
                const SideReading& prox, std::span<const Message> inbox,
                const ControllerParams& params, double now) {
    Decision out;
    out.state = state;

    bool saw_call = false, saw_ack = false;
    for (const Message& m : inbox)
        (m.kind == MessageKind::Call ? saw_call : saw_ack) = true;

    auto switch_to_mobbing = [&] {
        out.state.mode = Mode::Mobbing;
        out.state.mob_decision_time = now;
    };

    if (saw_call) {
        out.send_ack = true;
        if (out.state.mode == Mode::Avoiding) switch_to_mobbing();
    } else if (out.state.mode == Mode::Avoiding && out.state.has_called && saw_ack) {
        switch_to_mobbing();
    }

    const double peak = std::max(light.left, light.right);
    if (out.state.mode == Mode::Avoiding && peak > params.light_threshold &&
        !(params.call_once && out.state.has_called)) {
        out.send_call = true;
        out.state.has_called = true;
    }

    const double lam_left = std::min(1.0, light.left / params.light_saturation);
    const double lam_right = std::min(1.0, light.right / params.light_saturation);
    double wl = params.omega_base;
    double wr = params.omega_base;

    // Stimulus on one side drives the opposite wheel (contralateral coupling).
    wr -= params.k_obstacle * prox.left;
    wl -= params.k_obstacle * prox.right;
    if (out.state.mode == Mode::Avoiding) {
        wr -= params.k_fear * lam_left;
        wl -= params.k_fear * lam_right;
    } else {
        wr += params.k_mob * lam_left;
        wl += params.k_mob * lam_right;
    }

    out.wheels.left = std::clamp(wl, -params.omega_max, params.omega_max);
    out.wheels.right = std::clamp(wr, -params.omega_max, params.omega_max);
    return out;
}

}  // namespace mobsim
