#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mobsim/engine.hpp"
#include "mobsim/stats.hpp"

namespace mobsim {

/// Master seed of the canonical sweep; world w uses seed master_seed + w.
inline constexpr std::uint64_t kDefaultMasterSeed = 42;

struct Condition {
    RangePolicy range = RangePolicy::infinite();
    int group_size = 10;
};

/// The six conditions of the canonical sweep: range {infinite, 0.5 m, 0.1 m}
/// crossed with group size {10, 3}, range-major.
std::vector<Condition> canonical_conditions();

struct SweepConfig {
    std::uint64_t master_seed = kDefaultMasterSeed;
    int n_worlds = 10;
    int n_robots = 10;
    int n_boxes = 3;
    SimConfig sim;                      // range_policy overridden per condition
    std::vector<Condition> conditions;  // empty = canonical
    int jobs = 1;
};

struct SweepResult {
    SweepConfig config;
    std::vector<RunRecord> records;  // world-major, then condition order
};

// Generates n_worlds worlds from seeds master_seed+1..master_seed+n_worlds,
// trims each to the condition's group size, and runs every (world, condition)
// pair. Records come back in (world, condition) order with 1-based run ids,
// regardless of how many worker threads executed the runs.
SweepResult sweep(const SweepConfig& config);

struct GroupStats {
    int n = 0;
    int unanimous = 0;
    int partial = 0;
    int failed = 0;
    double mean_participation = 0.0;
    double sd_participation = 0.0;  // sample (n-1); valid only if has_sd
    bool has_sd = false;
};

GroupStats accumulate_stats(std::span<const RunRecord> records);

/// Human-readable condition/marginal tables; byte-stable across reruns.
std::string summary_text(const SweepResult& result);

void write_runs_csv(std::ostream& out, std::span<const RunRecord> records);
void write_robots_csv(std::ostream& out, std::span<const RunRecord> records);

/// One parsed row of runs.csv, as much of it as analysis needs.
struct RunsRow {
    int world_id = 0;
    std::string range_m;  // "inf", "0.5", ...
    int group_size = 0;
    std::string status;
    double participation_pct = 0.0;
};

std::vector<RunsRow> load_runs_csv(std::istream& in);  // throws DataError

std::vector<RunsRow> rows_from_records(std::span<const RunRecord> records);

enum class Response { Participation, Unanimous };

// Reshapes runs rows into a complete worlds x range x group-size table.
// Subjects and factor levels are taken in order of first appearance. Throws
// DataError naming any missing or duplicated (world, range, group) cell.
WithinSubjectsTable build_within_table(std::span<const RunsRow> rows, Response response);

}  // namespace mobsim
