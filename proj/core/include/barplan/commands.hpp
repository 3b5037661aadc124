#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "barplan/plan_io.hpp"

namespace barplan {

// Exit-code contract shared by every subcommand:
//   0 success (plan written / validation clean)
//   1 proven infeasible under the configured budgets, or violations found
//   2 search budget exceeded
//   3 input error (I/O, schema, hash mismatch)
inline constexpr int kExitOk = 0;
inline constexpr int kExitInfeasible = 1;
inline constexpr int kExitTimeout = 2;
inline constexpr int kExitInputError = 3;

struct PlanArgs {
    std::string structure_path;
    std::string robot_path;
    std::string config_path;  // optional
    std::string plan_out;     // optional
    std::string stats_out;    // optional
    std::string scene_out;    // optional JSON-lines capsule/trajectory dump
    // Overrides applied on top of the config file.
    std::optional<std::string> heuristic;
    std::optional<std::string> direction;
    std::optional<std::uint64_t> seed;
    std::optional<double> tolerance;
    std::optional<double> budget_s;
};

int cmd_plan(const PlanArgs& args, std::ostream& out, std::ostream& err);

struct SimulateArgs {
    std::string structure_path;
    std::string plan_path;
    std::string csv_out;  // empty: stdout
};

/// Per-step deformation history CSV: step, element, max_translation_norm,
/// argmax node.
int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err);

struct ValidateArgs {
    std::string structure_path;
    std::string robot_path;
    std::string plan_path;
};

int cmd_validate(const ValidateArgs& args, std::ostream& out, std::ostream& err);

struct StatsArgs {
    std::vector<std::string> stats_paths;
    std::string json_out;  // optional aggregated JSON
};

int cmd_stats(const StatsArgs& args, std::ostream& out, std::ostream& err);

}  // namespace barplan
