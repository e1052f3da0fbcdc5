#include "mobsim/render.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "mobsim/errors.hpp"
#include "mobsim/numfmt.hpp"
#include "mobsim/sensing.hpp"

namespace mobsim {

namespace {

constexpr double kViewUnits = 1000.0;

constexpr const char* kTrailColors[] = {
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
};
constexpr const char* kAvoidingFill = "#9ecae1";
constexpr const char* kMobbingFill = "#de2d26";

struct Mapper {
    double scale;
    double side;

    std::string x(double meters) const { return format_fixed(meters * scale, 2); }
    std::string y(double meters) const { return format_fixed((side - meters) * scale, 2); }
    std::string len(double meters) const { return format_fixed(meters * scale, 2); }
};

}  // namespace

void render_svg(std::ostream& out, const WorldSpec& world,
                std::span<const TraceRow> trace, const ControllerParams& params) {
    const Mapper m{kViewUnits / world.arena_side, world.arena_side};

    // Trace rows grouped per robot, preserving tick order; ids must exist.
    std::map<int, std::vector<const TraceRow*>> paths;
    for (const TraceRow& row : trace) {
        bool known = false;
        for (const RobotSpawn& spawn : world.spawns) known = known || spawn.id == row.robot_id;
        if (!known)
            throw DataError("trace references robot id " + std::to_string(row.robot_id) +
                            " not present in the world");
        paths[row.robot_id].push_back(&row);
    }

    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"1000\" height=\"1000\" "
           "viewBox=\"0 0 1000 1000\">\n";
    out << "  <rect x=\"0\" y=\"0\" width=\"1000\" height=\"1000\" fill=\"#ffffff\" "
           "stroke=\"#333333\" stroke-width=\"2\"/>\n";

    for (const AxisBox& box : world.boxes) {
        const Vec2 lo = box.lo();
        out << "  <rect x=\"" << m.x(lo.x) << "\" y=\"" << m.y(lo.y + 2.0 * box.half)
            << "\" width=\"" << m.len(2.0 * box.half) << "\" height=\""
            << m.len(2.0 * box.half) << "\" fill=\"#b08968\" stroke=\"#5e452e\" "
            << "stroke-width=\"1.5\"/>\n";
    }

    const auto ring = detection_radius(world.light.intensity, params.light_threshold);
    if (ring)
        out << "  <circle cx=\"" << m.x(world.light.position.x) << "\" cy=\""
            << m.y(world.light.position.y) << "\" r=\"" << m.len(*ring)
            << "\" fill=\"none\" stroke=\"#e6a817\" stroke-width=\"1.5\" "
            << "stroke-dasharray=\"8 6\"/>\n";
    out << "  <circle cx=\"" << m.x(world.light.position.x) << "\" cy=\""
        << m.y(world.light.position.y) << "\" r=\"10\" fill=\"#f5c518\" "
        << "stroke=\"#8a6d00\" stroke-width=\"1.5\"/>\n";

    int color_index = 0;
    for (const auto& [id, rows] : paths) {
        const char* color = kTrailColors[color_index++ % std::size(kTrailColors)];
        if (rows.size() > 1) {
            out << "  <polyline fill=\"none\" stroke=\"" << color
                << "\" stroke-width=\"1.5\" stroke-opacity=\"0.8\" points=\"";
            for (std::size_t i = 0; i < rows.size(); ++i) {
                if (i) out << ' ';
                out << m.x(rows[i]->position.x) << ',' << m.y(rows[i]->position.y);
            }
            out << "\"/>\n";
        }
        const TraceRow& last = *rows.back();
        const Vec2 nose = last.position + unit_vec(last.heading) * kRobotRadius;
        out << "  <circle cx=\"" << m.x(last.position.x) << "\" cy=\""
            << m.y(last.position.y) << "\" r=\"" << m.len(kRobotRadius) << "\" fill=\""
            << (last.mode == Mode::Mobbing ? kMobbingFill : kAvoidingFill)
            << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        out << "  <line x1=\"" << m.x(last.position.x) << "\" y1=\"" << m.y(last.position.y)
            << "\" x2=\"" << m.x(nose.x) << "\" y2=\"" << m.y(nose.y)
            << "\" stroke=\"#333333\" stroke-width=\"2\"/>\n";
    }

    out << "</svg>\n";
}

}  // namespace mobsim
