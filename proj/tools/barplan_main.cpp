#include <iostream>

#include <CLI11.hpp>

#include "barplan/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Sequence and motion planner for robotic bar-structure construction"};
    app.require_subcommand(1);

    barplan::PlanArgs plan_args;
    std::string heuristic, direction;
    std::uint64_t seed = 0;
    double tolerance = 0, budget = 0;
    CLI::App* plan = app.add_subcommand(
        "plan", "Compute a construction sequence and robot trajectories");
    plan->add_option("--structure", plan_args.structure_path, "Structure file")->required();
    plan->add_option("--robot", plan_args.robot_path, "Robot file")->required();
    plan->add_option("--config", plan_args.config_path, "Config file (JSON)");
    plan->add_option("--out", plan_args.plan_out, "Output plan file");
    plan->add_option("--stats", plan_args.stats_out, "Output stats JSON");
    plan->add_option("--scene", plan_args.scene_out, "Dump world capsules + tool paths (JSONL)");
    auto* h = plan->add_option("--heuristic", heuristic, "stiff-plan | euclidean-dist");
    auto* d = plan->add_option("--direction", direction, "backward | forward");
    auto* s = plan->add_option("--seed", seed, "RNG seed");
    auto* t = plan->add_option("--tolerance", tolerance, "Deformation tolerance (m)");
    auto* b = plan->add_option("--budget", budget, "Search budget (s)");

    barplan::SimulateArgs sim_args;
    CLI::App* simulate =
        app.add_subcommand("simulate", "Per-step FEA deformation history of a plan");
    simulate->add_option("--structure", sim_args.structure_path, "Structure file")->required();
    simulate->add_option("--plan", sim_args.plan_path, "Plan file")->required();
    simulate->add_option("--out", sim_args.csv_out, "Output CSV (default stdout)");

    barplan::ValidateArgs val_args;
    CLI::App* validate = app.add_subcommand("validate", "Replay and re-check a plan");
    validate->add_option("--structure", val_args.structure_path, "Structure file")->required();
    validate->add_option("--robot", val_args.robot_path, "Robot file")->required();
    validate->add_option("--plan", val_args.plan_path, "Plan file")->required();

    barplan::StatsArgs stats_args;
    CLI::App* stats = app.add_subcommand("stats", "Aggregate planner stats files");
    stats->add_option("files", stats_args.stats_paths, "Stats JSON files")->required();
    stats->add_option("--json", stats_args.json_out, "Write aggregated JSON");

    CLI11_PARSE(app, argc, argv);

    if (plan->parsed()) {
        if (*h) plan_args.heuristic = heuristic;
        if (*d) plan_args.direction = direction;
        if (*s) plan_args.seed = seed;
        if (*t) plan_args.tolerance = tolerance;
        if (*b) plan_args.budget_s = budget;
        return barplan::cmd_plan(plan_args, std::cout, std::cerr);
    }
    if (simulate->parsed()) return barplan::cmd_simulate(sim_args, std::cout, std::cerr);
    if (validate->parsed()) return barplan::cmd_validate(val_args, std::cout, std::cerr);
    if (stats->parsed()) return barplan::cmd_stats(stats_args, std::cout, std::cerr);
    return barplan::kExitInputError;
}
