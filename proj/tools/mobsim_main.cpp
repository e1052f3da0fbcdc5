#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mobsim/engine.hpp"
#include "mobsim/errors.hpp"
#include "mobsim/harness.hpp"
#include "mobsim/numfmt.hpp"
#include "mobsim/render.hpp"
#include "mobsim/stats.hpp"
#include "mobsim/world.hpp"

namespace fs = std::filesystem;
using namespace mobsim;

namespace {

std::ofstream open_out(const fs::path& path) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open " + path.string() + " for writing");
    return out;
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out = open_out(path);
    out << content;
    if (!out.good()) throw DataError("failed while writing " + path.string());
}

std::string audit_line(const AuditSummary& audit) {
    return "audit: max_robot_overlap=" + format_shortest(audit.max_robot_overlap) +
           " max_box_overlap=" + format_shortest(audit.max_box_overlap) +
           " max_wall_excursion=" + format_shortest(audit.max_wall_excursion);
}

struct GenArgs {
    std::uint64_t seed = 1;
    int robots = 10;
    int boxes = 3;
    std::string out;
};

struct RunArgs {
    std::string world;
    std::string range = "inf";
    int robots = 0;  // 0 = keep the world's full group
    double duration = 60.0;
    double dt = 0.032;
    int trace_stride = 1;
    bool audit = false;
    std::string out;
};

struct SweepArgs {
    std::uint64_t master_seed = kDefaultMasterSeed;
    int worlds = 10;
    int robots = 10;
    int boxes = 3;
    double duration = 60.0;
    double dt = 0.032;
    int jobs = 1;
    bool audit = false;
    std::string out;
};

struct AnalyzeArgs {
    std::string runs;
    std::string response = "participation";
    std::string out;
};

struct RenderArgs {
    std::string trace;
    std::string world;
    std::string out;
};

void do_gen(const GenArgs& args) {
    const WorldSpec world = generate_world(args.seed, args.robots, args.boxes);
    write_file(args.out, world_to_json(world));
    std::cout << "wrote " << args.out << "\n";
}

RangePolicy parse_range_or_throw(const std::string& text) {
    const auto policy = RangePolicy::parse(text);
    if (!policy)
        throw CLI::ValidationError("--range", "expected 'inf', '-1', or a positive "
                                              "distance in meters, got '" + text + "'");
    return *policy;
}

void do_run(const RunArgs& args) {
    const RangePolicy range = parse_range_or_throw(args.range);  // before any I/O
    WorldSpec world = load_world(args.world);
    if (args.robots > 0) world = reduce_to_group(world, args.robots);

    SimConfig config;
    config.dt = args.dt;
    config.duration = args.duration;
    config.range_policy = range;
    config.trace_stride = args.trace_stride;
    config.audit = args.audit;

    RunOutput output = run(world, config);
    output.record.run_id = 1;  // standalone run: ids 1/0/0, see docs/formats.md

    const fs::path dir(args.out);
    fs::create_directories(dir);
    {
        std::ofstream out = open_out(dir / "runs.csv");
        write_runs_csv(out, {&output.record, 1});
    }
    {
        std::ofstream out = open_out(dir / "robots.csv");
        write_robots_csv(out, {&output.record, 1});
    }
    {
        std::ofstream out = open_out(dir / "events.jsonl");
        write_events_jsonl(out, output.events);
    }
    {
        std::ofstream out = open_out(dir / "trace.csv");
        write_trace_csv(out, output.trace);
    }
    std::cout << "status=" << status_str(output.record.status)
              << " participation=" << format_fixed(output.record.participation_pct, 2)
              << " events=" << output.events.size() << "\n";
    if (args.audit) std::cout << audit_line(output.record.audit) << "\n";
    std::cout << "wrote " << (dir / "runs.csv").string() << ", robots.csv, events.jsonl, "
              << "trace.csv\n";
}

void do_sweep(const SweepArgs& args) {
    SweepConfig config;
    config.master_seed = args.master_seed;
    config.n_worlds = args.worlds;
    config.n_robots = args.robots;
    config.n_boxes = args.boxes;
    config.sim.duration = args.duration;
    config.sim.dt = args.dt;
    config.sim.audit = args.audit;
    config.jobs = args.jobs;

    const SweepResult result = sweep(config);

    const fs::path dir(args.out);
    fs::create_directories(dir);
    {
        std::ofstream out = open_out(dir / "runs.csv");
        write_runs_csv(out, result.records);
    }
    {
        std::ofstream out = open_out(dir / "robots.csv");
        write_robots_csv(out, result.records);
    }
    write_file(dir / "summary.txt", summary_text(result));

    if (args.audit) {
        AuditSummary worst;
        for (const RunRecord& r : result.records) {
            worst.max_robot_overlap = std::max(worst.max_robot_overlap, r.audit.max_robot_overlap);
            worst.max_box_overlap = std::max(worst.max_box_overlap, r.audit.max_box_overlap);
            worst.max_wall_excursion =
                std::max(worst.max_wall_excursion, r.audit.max_wall_excursion);
        }
        std::cout << audit_line(worst) << "\n";
    }
    std::cout << "wrote " << result.records.size() << " runs to " << dir.string()
              << " (runs.csv, robots.csv, summary.txt)\n";
}

void do_analyze(const AnalyzeArgs& args) {
    std::ifstream in(args.runs, std::ios::binary);
    if (!in) throw DataError("cannot open " + args.runs);
    const std::vector<RunsRow> rows = load_runs_csv(in);

    const Response response =
        args.response == "unanimous" ? Response::Unanimous : Response::Participation;
    const WithinSubjectsTable table = build_within_table(rows, response);

    AnovaResult anova = rm_anova_2way(table);
    anova.effect_a.name = "range";
    if (anova.has_b) {
        anova.effect_b.name = "group_size";
        anova.interaction.name = "range_x_group_size";
    }

    std::vector<ContrastResult> contrasts;
    if (table.a == 3) {
        const double baseline[] = {2.0, -1.0, -1.0};
        const double mid_low[] = {0.0, 1.0, -1.0};
        ContrastResult c1 = planned_contrast(table, Factor::A, baseline);
        c1.name = "range_baseline_vs_limited";
        c1.p_bonferroni = bonferroni(c1.p, 2);
        ContrastResult c2 = planned_contrast(table, Factor::A, mid_low);
        c2.name = "range_mid_vs_low";
        c2.p_bonferroni = bonferroni(c2.p, 2);
        contrasts.push_back(std::move(c1));
        contrasts.push_back(std::move(c2));
    }

    std::vector<AnovaRow> rows_out;
    rows_out.push_back(to_row(anova.effect_a));
    if (anova.has_b) {
        rows_out.push_back(to_row(anova.effect_b));
        rows_out.push_back(to_row(anova.interaction));
    }
    for (const ContrastResult& c : contrasts) rows_out.push_back(to_row(c));

    const fs::path dir(args.out);
    fs::create_directories(dir);
    {
        std::ofstream out = open_out(dir / "anova.csv");
        write_anova_csv(out, rows_out);
    }
    write_file(dir / "report.txt", format_anova_report(table, anova, contrasts, args.response));
    std::cout << "wrote " << (dir / "anova.csv").string() << " and report.txt\n";
}

void do_render(const RenderArgs& args) {
    const WorldSpec world = load_world(args.world);
    std::ifstream in(args.trace, std::ios::binary);
    if (!in) throw DataError("cannot open " + args.trace);
    const std::vector<TraceRow> trace = load_trace_csv(in);

    std::ofstream out = open_out(args.out);
    render_svg(out, world, trace);
    if (!out.good()) throw DataError("failed while writing " + args.out);
    std::cout << "wrote " << args.out << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"deterministic 2D simulator of cooperative mobbing with "
                 "range-limited calls"};
    app.require_subcommand(1);

    GenArgs gen_args;
    CLI::App* gen = app.add_subcommand("gen", "generate a randomized world file");
    gen->add_option("--seed", gen_args.seed, "world seed")->required();
    gen->add_option("--robots", gen_args.robots, "number of robots")
        ->default_val(10)->check(CLI::PositiveNumber);
    gen->add_option("--boxes", gen_args.boxes, "number of boxes")
        ->default_val(3)->check(CLI::NonNegativeNumber);
    gen->add_option("--out", gen_args.out, "output world JSON path")->required();
    gen->callback([&] { do_gen(gen_args); });

    RunArgs run_args;
    CLI::App* run = app.add_subcommand("run", "simulate one world once");
    run->add_option("--world", run_args.world, "world JSON path")->required();
    run->add_option("--range", run_args.range,
                    "call range: 'inf' (or -1) or meters, e.g. 0.5")
        ->default_val("inf");
    run->add_option("--robots", run_args.robots,
                    "keep only robots #1..#k before running (0 = all)")
        ->default_val(0)->check(CLI::NonNegativeNumber);
    run->add_option("--duration", run_args.duration, "seconds to simulate")
        ->default_val(60.0)->check(CLI::PositiveNumber);
    run->add_option("--dt", run_args.dt, "control step, seconds")
        ->default_val(0.032)->check(CLI::PositiveNumber);
    run->add_option("--trace-stride", run_args.trace_stride,
                    "record every k-th tick in trace.csv (0 disables)")
        ->default_val(1)->check(CLI::NonNegativeNumber);
    run->add_flag("--audit", run_args.audit, "report overlap/containment extrema");
    run->add_option("--out", run_args.out, "output directory")->required();
    run->callback([&] { do_run(run_args); });

    SweepArgs sweep_args;
    CLI::App* sweep = app.add_subcommand(
        "sweep", "run the canonical 6-condition experiment over fresh worlds");
    sweep->add_option("--master-seed", sweep_args.master_seed, "sweep master seed")
        ->default_val(kDefaultMasterSeed);
    sweep->add_option("--worlds", sweep_args.worlds, "number of worlds")
        ->default_val(10)->check(CLI::PositiveNumber);
    sweep->add_option("--robots", sweep_args.robots, "robots per world")
        ->default_val(10)->check(CLI::PositiveNumber);
    sweep->add_option("--boxes", sweep_args.boxes, "boxes per world")
        ->default_val(3)->check(CLI::NonNegativeNumber);
    sweep->add_option("--duration", sweep_args.duration, "seconds per run")
        ->default_val(60.0)->check(CLI::PositiveNumber);
    sweep->add_option("--dt", sweep_args.dt, "control step, seconds")
        ->default_val(0.032)->check(CLI::PositiveNumber);
    sweep->add_option("--jobs", sweep_args.jobs, "worker threads")
        ->default_val(1)->check(CLI::PositiveNumber);
    sweep->add_flag("--audit", sweep_args.audit, "report overlap/containment extrema");
    sweep->add_option("--out", sweep_args.out, "output directory")->required();
    sweep->callback([&] { do_sweep(sweep_args); });

    AnalyzeArgs analyze_args;
    CLI::App* analyze = app.add_subcommand(
        "analyze", "repeated-measures ANOVA + planned contrasts over runs.csv");
    analyze->add_option("--runs", analyze_args.runs, "runs.csv path")->required();
    analyze->add_option("--response", analyze_args.response,
                        "response variable")
        ->default_val("participation")
        ->check(CLI::IsMember({"participation", "unanimous"}));
    analyze->add_option("--out", analyze_args.out, "output directory")->required();
    analyze->callback([&] { do_analyze(analyze_args); });

    RenderArgs render_args;
    CLI::App* render = app.add_subcommand("render", "draw a trace as an SVG");
    render->add_option("--trace", render_args.trace, "trace.csv path")->required();
    render->add_option("--world", render_args.world, "world JSON path")->required();
    render->add_option("--out", render_args.out, "output SVG path")->required();
    render->callback([&] { do_render(render_args); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 1;
    } catch (const PlacementError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const DataError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
