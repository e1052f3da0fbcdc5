#pragma once

#include <iosfwd>
#include <span>

#include "mobsim/controller.hpp"
#include "mobsim/engine.hpp"
#include "mobsim/world.hpp"

namespace mobsim {

// Draws the arena with its boxes and light (plus a dashed ring at the light's
// calibrated detection radius when one exists for params.light_threshold),
// one trajectory polyline per robot, and each robot's final pose as a circle
// whose fill encodes its final mode. 1000x1000 SVG units map the arena.
// An empty trace yields just the arena and static objects. Throws DataError
// if the trace mentions a robot id the world does not contain.
void render_svg(std::ostream& out, const WorldSpec& world,
                std::span<const TraceRow> trace, const ControllerParams& params = {});

}  // namespace mobsim
