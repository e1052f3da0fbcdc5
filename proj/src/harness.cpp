#include "mobsim/harness.hpp"

#include <atomic>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>

#include "mobsim/errors.hpp"
#include "mobsim/numfmt.hpp"
#include "mobsim/world.hpp"

namespace mobsim {

std::vector<Condition> canonical_conditions() {
    return {
        {RangePolicy::infinite(), 10}, {RangePolicy::infinite(), 3},
        {RangePolicy::meters(0.5), 10}, {RangePolicy::meters(0.5), 3},
        {RangePolicy::meters(0.1), 10}, {RangePolicy::meters(0.1), 3},
    };
}

SweepResult sweep(const SweepConfig& config) {
    SweepResult result;
    result.config = config;
    if (result.config.conditions.empty()) result.config.conditions = canonical_conditions();
    const std::vector<Condition>& conditions = result.config.conditions;

    std::vector<WorldSpec> worlds;
    worlds.reserve(config.n_worlds);
    for (int w = 0; w < config.n_worlds; ++w)
        worlds.push_back(generate_world(config.master_seed + 1 + w, config.n_robots,
                                        config.n_boxes));

    const std::size_t n_tasks = worlds.size() * conditions.size();
    result.records.resize(n_tasks);

    auto execute = [&](std::size_t task) {
        const std::size_t w = task / conditions.size();
        const Condition& cond = conditions[task % conditions.size()];
        SimConfig sim = config.sim;
        sim.range_policy = cond.range;
        sim.trace_stride = 0;
        const WorldSpec world = reduce_to_group(worlds[w], cond.group_size);
        RunRecord record = run(world, sim).record;
        record.run_id = static_cast<int>(task) + 1;
        record.world_id = static_cast<int>(w) + 1;
        record.world_seed = config.master_seed + 1 + w;
        result.records[task] = std::move(record);
    };

    const int jobs = std::max(1, config.jobs);
    if (jobs == 1 || n_tasks <= 1) {
        for (std::size_t task = 0; task < n_tasks; ++task) execute(task);
    } else {
        // Each record lands in its own preassigned slot, so output order is
        // independent of which worker ran which task.
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> workers;
        const int n_workers = std::min<std::size_t>(jobs, n_tasks);
        workers.reserve(n_workers);
        for (int i = 0; i < n_workers; ++i)
            workers.emplace_back([&] {
                for (std::size_t task = next.fetch_add(1); task < n_tasks;
                     task = next.fetch_add(1))
                    execute(task);
            });
        for (std::thread& worker : workers) worker.join();
    }
    return result;
}

GroupStats accumulate_stats(std::span<const RunRecord> records) {
    GroupStats stats;
    stats.n = static_cast<int>(records.size());
    double sum = 0.0;
    for (const RunRecord& r : records) {
        switch (r.status) {
            case RunStatus::Unanimous: ++stats.unanimous; break;
            case RunStatus::Partial: ++stats.partial; break;
            case RunStatus::Failed: ++stats.failed; break;
        }
        sum += r.participation_pct;
    }
    if (stats.n > 0) stats.mean_participation = sum / stats.n;
    if (stats.n > 1) {
        double ss = 0.0;
        for (const RunRecord& r : records) {
            const double d = r.participation_pct - stats.mean_participation;
            ss += d * d;
        }
        stats.sd_participation = std::sqrt(ss / (stats.n - 1));
        stats.has_sd = true;
    }
    return stats;
}

namespace {

std::string pad_left(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : std::string(width - s.size(), ' ') + s;
}

std::string pad_right(const std::string& s, std::size_t width) {
    return s.size() >= width ? s : s + std::string(width - s.size(), ' ');
}

void stats_table(std::ostringstream& out, const std::string& title,
                 const std::vector<std::pair<std::string, GroupStats>>& rows) {
    out << title << "\n";
    out << pad_right("group", 22) << pad_left("runs", 6) << pad_left("unanimous", 11)
        << pad_left("partial", 9) << pad_left("failed", 8) << pad_left("unanimous%", 12)
        << pad_left("mean_part%", 12) << pad_left("sd_part", 9) << "\n";
    for (const auto& [label, s] : rows) {
        const double rate = s.n > 0 ? 100.0 * s.unanimous / s.n : 0.0;
        out << pad_right(label, 22) << pad_left(std::to_string(s.n), 6)
            << pad_left(std::to_string(s.unanimous), 11)
            << pad_left(std::to_string(s.partial), 9)
            << pad_left(std::to_string(s.failed), 8)
            << pad_left(format_fixed(rate, 2), 12)
            << pad_left(format_fixed(s.mean_participation, 2), 12)
            << pad_left(s.has_sd ? format_fixed(s.sd_participation, 2) : "-", 9) << "\n";
    }
    out << "\n";
}

std::vector<RunRecord> select(std::span<const RunRecord> records,
                              bool (*keep)(const RunRecord&, const Condition&),
                              const Condition& key) {
    std::vector<RunRecord> out;
    for (const RunRecord& r : records)
        if (keep(r, key)) out.push_back(r);
    return out;
}

}  // namespace

std::string summary_text(const SweepResult& result) {
    const std::vector<Condition>& conditions = result.config.conditions;
    std::ostringstream out;
    out << "sweep: worlds=" << result.config.n_worlds << " conditions=" << conditions.size()
        << " runs=" << result.records.size() << " master_seed=" << result.config.master_seed
        << " robots=" << result.config.n_robots << " boxes=" << result.config.n_boxes
        << "\n\n";

    std::vector<std::pair<std::string, GroupStats>> rows;
    for (const Condition& cond : conditions) {
        auto keep = [](const RunRecord& r, const Condition& c) {
            return r.range_policy == c.range && r.group_size == c.group_size;
        };
        rows.emplace_back("range=" + cond.range.str() +
                              " group=" + std::to_string(cond.group_size),
                          accumulate_stats(select(result.records, keep, cond)));
    }
    stats_table(out, "per condition", rows);

    rows.clear();
    for (const Condition& cond : conditions) {
        const std::string label = "range=" + cond.range.str();
        bool seen = false;
        for (const auto& row : rows) seen = seen || row.first == label;
        if (seen) continue;
        auto keep = [](const RunRecord& r, const Condition& c) {
            return r.range_policy == c.range;
        };
        rows.emplace_back(label, accumulate_stats(select(result.records, keep, cond)));
    }
    stats_table(out, "per call range (all group sizes)", rows);

    rows.clear();
    for (const Condition& cond : conditions) {
        const std::string label = "group=" + std::to_string(cond.group_size);
        bool seen = false;
        for (const auto& row : rows) seen = seen || row.first == label;
        if (seen) continue;
        auto keep = [](const RunRecord& r, const Condition& c) {
            return r.group_size == c.group_size;
        };
        rows.emplace_back(label, accumulate_stats(select(result.records, keep, cond)));
    }
    stats_table(out, "per group size (all ranges)", rows);

    return out.str();
}

void write_runs_csv(std::ostream& out, std::span<const RunRecord> records) {
    out << "run_id,world_id,world_seed,range_m,group_size,status,n_mobbing,"
           "participation_pct,first_call_t_s\n";
    for (const RunRecord& r : records) {
        out << r.run_id << ',' << r.world_id << ',' << r.world_seed << ','
            << r.range_policy.str() << ',' << r.group_size << ',' << status_str(r.status)
            << ',' << r.n_mobbing << ',' << format_fixed(r.participation_pct, 2) << ',';
        if (r.first_call_time_s) out << format_fixed(*r.first_call_time_s, 6);
        out << '\n';
    }
}

void write_robots_csv(std::ostream& out, std::span<const RunRecord> records) {
    out << "run_id,robot_id,mobbed,decision_t_s\n";
    for (const RunRecord& r : records)
        for (const RobotOutcome& robot : r.robots) {
            out << r.run_id << ',' << robot.id << ',' << (robot.mobbed ? 1 : 0) << ',';
            if (robot.decision_time_s) out << format_fixed(*robot.decision_time_s, 6);
            out << '\n';
        }
}

std::vector<RunsRow> load_runs_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("runs file is empty");
    if (line !=
        "run_id,world_id,world_seed,range_m,group_size,status,n_mobbing,"
        "participation_pct,first_call_t_s")
        throw DataError("runs file has unexpected header: " + line);

    std::vector<RunsRow> rows;
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::string cell;
        std::istringstream fields(line);
        while (std::getline(fields, cell, ',')) cells.push_back(cell);
        if (line.back() == ',') cells.push_back("");  // empty trailing field
        if (cells.size() != 9)
            throw DataError("runs line " + std::to_string(line_no) + " has " +
                            std::to_string(cells.size()) + " fields, expected 9");
        RunsRow row;
        try {
            row.world_id = std::stoi(cells[1]);
            row.range_m = cells[3];
            row.group_size = std::stoi(cells[4]);
            row.status = cells[5];
            row.participation_pct = std::stod(cells[7]);
        } catch (const std::exception&) {
            throw DataError("runs line " + std::to_string(line_no) + " is malformed: " + line);
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<RunsRow> rows_from_records(std::span<const RunRecord> records) {
    std::vector<RunsRow> rows;
    rows.reserve(records.size());
    for (const RunRecord& r : records) {
        // Quantize exactly like runs.csv (2 decimals) so analyzing records
        // in memory agrees bit-for-bit with analyzing a written file.
        const double pct = std::stod(format_fixed(r.participation_pct, 2));
        rows.push_back({r.world_id, r.range_policy.str(), r.group_size, status_str(r.status),
                        pct});
    }
    return rows;
}

namespace {

template <typename T>
int level_index(std::vector<T>& levels, const T& key) {
    for (std::size_t i = 0; i < levels.size(); ++i)
        if (levels[i] == key) return static_cast<int>(i);
    levels.push_back(key);
    return static_cast<int>(levels.size()) - 1;
}

std::string cell_name(int world_id, const std::string& range, int group) {
    return "world " + std::to_string(world_id) + " range " + range + " group " +
           std::to_string(group);
}

}  // namespace

WithinSubjectsTable build_within_table(std::span<const RunsRow> rows, Response response) {
    if (rows.empty()) throw DataError("no runs to analyze");

    std::vector<int> worlds, groups;
    std::vector<std::string> ranges;
    for (const RunsRow& row : rows) {
        level_index(worlds, row.world_id);
        level_index(ranges, row.range_m);
        level_index(groups, row.group_size);
    }

    WithinSubjectsTable table;
    table.n = static_cast<int>(worlds.size());
    table.a = static_cast<int>(ranges.size());
    table.b = static_cast<int>(groups.size());
    for (const std::string& r : ranges) table.a_labels.push_back("range=" + r);
    for (int g : groups) table.b_labels.push_back("group=" + std::to_string(g));

    const double unset = std::numeric_limits<double>::quiet_NaN();
    table.values.assign(static_cast<std::size_t>(table.n) * table.a * table.b, unset);

    for (const RunsRow& row : rows) {
        const int s = level_index(worlds, row.world_id);
        const int i = level_index(ranges, row.range_m);
        const int j = level_index(groups, row.group_size);
        double& cell = table.at(s, i, j);
        if (!std::isnan(cell))
            throw DataError("duplicate cell: " +
                            cell_name(row.world_id, row.range_m, row.group_size));
        cell = response == Response::Participation
                   ? row.participation_pct
                   : (row.status == "unanimous" ? 100.0 : 0.0);
    }

    for (int s = 0; s < table.n; ++s)
        for (int i = 0; i < table.a; ++i)
            for (int j = 0; j < table.b; ++j)
                if (std::isnan(table.at(s, i, j)))
                    throw DataError("missing cell: " +
                                    cell_name(worlds[s], ranges[i], groups[j]));
    return table;
}

}  // namespace mobsim
