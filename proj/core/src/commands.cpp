#include "barplan/commands.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "barplan/collision.hpp"
#include "barplan/scene.hpp"

namespace barplan {

namespace {

using nlohmann::json;

Config resolve_config(const PlanArgs& args) {
    Config config;
    if (!args.config_path.empty()) config = load_config(args.config_path);
    if (args.heuristic) config.heuristic = *args.heuristic;
    if (args.direction) config.direction = *args.direction;
    if (args.seed) config.seed = *args.seed;
    if (args.tolerance) config.tolerance = *args.tolerance;
    if (args.budget_s) config.budget_s = *args.budget_s;
    if (config.heuristic != "stiff-plan" && config.heuristic != "euclidean-dist")
        throw ValidationError("unknown heuristic: " + config.heuristic);
    if (config.direction != "backward" && config.direction != "forward")
        throw ValidationError("unknown direction: " + config.direction);
    return config;
}

void dump_scene(const std::string& path, const BarStructure& structure, const SceneSpec& scene,
                const RobotModel& robot, const std::optional<ConstructionPlan>& plan) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write file: " + path);
    for (int id : structure.bar_ids) {
        Capsule c = element_capsule(structure, id);
        out << json{{"type", "element"},
                    {"id", id},
                    {"p0", {c.p0.x(), c.p0.y(), c.p0.z()}},
                    {"p1", {c.p1.x(), c.p1.y(), c.p1.z()}},
                    {"radius", c.radius}}
                   .dump()
            << "\n";
    }
    for (const ObstacleSpec& o : scene.obstacles) {
        out << json{{"type", "obstacle"},
                    {"p0", {o.p0.x(), o.p0.y(), o.p0.z()}},
                    {"p1", {o.p1.x(), o.p1.y(), o.p1.z()}},
                    {"radius", o.radius}}
                   .dump()
            << "\n";
    }
    if (plan) {
        for (const ElementStep& step : plan->steps) {
            for (const ActionInstance& action : step.actions) {
                for (const Trajectory& traj : action.trajectories) {
                    json pts = json::array();
                    for (const Configuration& q : traj.waypoints) {
                        Vec3 p = tool_pose(robot, q).position;
                        pts.push_back({p.x(), p.y(), p.z()});
                    }
                    out << json{{"type", "trajectory"},
                                {"kind", to_string(traj.kind)},
                                {"element", step.element_id},
                                {"tool_points", std::move(pts)}}
                               .dump()
                        << "\n";
                }
            }
        }
    }
}

}  // namespace

int cmd_plan(const PlanArgs& args, std::ostream& out, std::ostream& err) {
    BarStructure structure;
    RobotModel robot;
    SceneSpec scene;
    Config config;
    std::uint64_t hash = 0;
    try {
        structure = load_structure(args.structure_path);
        scene = load_scene(args.structure_path);
        robot = load_robot(args.robot_path);
        if (scene.robot_base) robot.base_frame = *scene.robot_base;
        config = resolve_config(args);
        hash = structure_file_hash(args.structure_path);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    }

    StiffnessSolver solver(structure, config.stiffness());
    PlanningContext ctx{structure, robot,          scene,
                        structure.mode,            config.motion(), config.collision(),
                        robot.home,                RngStream(config.seed)};

    auto t0 = std::chrono::steady_clock::now();
    Heuristic heuristic = config.heuristic == "stiff-plan"
                              ? heuristic_stiffplan(structure, solver, config.tolerance)
                              : heuristic_euclidean(structure);
    double heuristic_time =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (heuristic.fallback_used)
        err << "warning: stiff-plan precompute failed, falling back to euclidean-dist\n";

    SearchOptions sopts;
    sopts.tolerance = config.tolerance;
    sopts.budget_s = config.budget_s;
    sopts.heuristic = heuristic.name;

    PlanResult result = config.direction == "backward"
                            ? backward_plan(ctx, solver, heuristic, sopts)
                            : forward_plan(ctx, solver, heuristic, sopts);
    result.stats.heuristic_time_s = heuristic_time;

    int exit_code = kExitInfeasible;
    if (result.stats.result == "plan") {
        ValidationReport report = validate_plan(ctx, solver, config.tolerance, *result.plan);
        if (!report.ok()) {
            err << "internal error: produced plan fails validation:\n";
            for (const Violation& v : report.violations)
                err << "  step " << v.step << " [" << v.code << "] " << v.message << "\n";
            result.stats.result = "invalid-plan";
        } else {
            if (!args.plan_out.empty()) {
                PlanFile file;
                file.structure_hash = hash;
                file.rng_seed = config.seed;
                file.config = config;
                file.plan = *result.plan;
                save_plan(args.plan_out, file);
            }
            exit_code = kExitOk;
        }
    } else if (result.stats.result == "timeout") {
        exit_code = kExitTimeout;
    }

    if (!args.stats_out.empty()) save_stats(args.stats_out, result.stats, args.structure_path);
    if (!args.scene_out.empty())
        dump_scene(args.scene_out, structure, scene, robot,
                   exit_code == kExitOk ? result.plan : std::nullopt);

    out << "result: " << result.stats.result << "\n";
    out << "states expanded: " << result.stats.states_expanded
        << ", dead ends: " << result.stats.dead_ends
        << ", stiffness checks: " << result.stats.stiffness_checks
        << ", geometric checks: " << result.stats.geometric_checks << "\n";
    if (exit_code == kExitOk) {
        out << "sequence:";
        for (int e : result.plan->sequence()) out << " " << e;
        out << "\n";
    } else {
        out << "deepest frontier: " << result.frontier.count() << " of "
            << structure.num_bars() << " elements"
            << (config.direction == "backward" ? " remaining" : " built") << "\n";
        if (result.stats.result == "infeasible")
            out << "note: infeasible under the configured candidate sets and budgets\n";
    }
    return exit_code;
}

int cmd_simulate(const SimulateArgs& args, std::ostream& out, std::ostream& err) {
    try {
        BarStructure structure = load_structure(args.structure_path);
        PlanFile file = load_plan(args.plan_path);
        if (file.structure_hash != structure_file_hash(args.structure_path)) {
            err << "error: plan was produced for a different structure (hash mismatch)\n";
            return kExitInputError;
        }
        StiffnessSolver solver(structure, file.config.stiffness());

        std::ofstream fout;
        std::ostream* csv = &out;
        if (!args.csv_out.empty()) {
            fout.open(args.csv_out);
            if (!fout) throw ParseError("cannot write file: " + args.csv_out);
            csv = &fout;
        }
        (*csv) << "step,element,max_translation_norm,argmax_node\n";
        PartialStructure built = structure.empty_partial();
        int step = 0;
        for (int e : file.plan.sequence()) {
            built.insert(e);
            DeformationResult r = solver.solve(built);
            (*csv) << step << "," << e << "," << std::setprecision(17) << r.max_translation_norm
                   << "," << r.argmax_node << "\n";
            ++step;
        }
        return kExitOk;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    }
}

int cmd_validate(const ValidateArgs& args, std::ostream& out, std::ostream& err) {
    try {
        BarStructure structure = load_structure(args.structure_path);
        SceneSpec scene = load_scene(args.structure_path);
        RobotModel robot = load_robot(args.robot_path);
        if (scene.robot_base) robot.base_frame = *scene.robot_base;
        PlanFile file = load_plan(args.plan_path);
        if (file.structure_hash != structure_file_hash(args.structure_path)) {
            err << "error: plan was produced for a different structure (hash mismatch)\n";
            return kExitInputError;
        }
        StiffnessSolver solver(structure, file.config.stiffness());
        PlanningContext ctx{structure, robot,
                            scene,     structure.mode,
                            file.config.motion(),  file.config.collision(),
                            file.plan.home,        RngStream(file.config.seed)};
        ValidationReport report = validate_plan(ctx, solver, file.config.tolerance, file.plan);
        if (report.ok()) {
            out << "plan valid: " << file.plan.steps.size() << " steps, 0 violations\n";
            return kExitOk;
        }
        for (const Violation& v : report.violations)
            out << "step " << v.step << " [" << v.code << "] " << v.message << "\n";
        out << report.violations.size() << " violation(s)\n";
        return kExitInfeasible;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    }
}

int cmd_stats(const StatsArgs& args, std::ostream& out, std::ostream& err) {
    try {
        if (args.stats_paths.empty()) throw ParseError("no stats files given");
        json rows = json::array();
        out << std::left << std::setw(28) << "label" << std::setw(16) << "heuristic"
            << std::setw(10) << "direction" << std::setw(10) << "result" << std::right
            << std::setw(10) << "expanded" << std::setw(10) << "deadends" << std::setw(12)
            << "stiffness" << std::setw(12) << "geometric" << std::setw(12) << "search_s"
            << "\n";
        for (const std::string& path : args.stats_paths) {
            std::string label;
            SearchStats s = load_stats(path, &label);
            if (label.size() > 26) label = "..." + label.substr(label.size() - 23);
            out << std::left << std::setw(28) << label << std::setw(16) << s.heuristic_name
                << std::setw(10) << s.direction << std::setw(10) << s.result << std::right
                << std::setw(10) << s.states_expanded << std::setw(10) << s.dead_ends
                << std::setw(12) << s.stiffness_checks << std::setw(12) << s.geometric_checks
                << std::setw(12) << std::fixed << std::setprecision(3) << s.search_time_s
                << "\n";
            rows.push_back({{"label", label},
                            {"heuristic", s.heuristic_name},
                            {"direction", s.direction},
                            {"result", s.result},
                            {"states_expanded", s.states_expanded},
                            {"dead_ends", s.dead_ends},
                            {"backtracks", s.backtracks},
                            {"stiffness_checks", s.stiffness_checks},
                            {"geometric_checks", s.geometric_checks},
                            {"search_time_s", s.search_time_s}});
        }
        if (!args.json_out.empty()) {
            std::ofstream jout(args.json_out);
            if (!jout) throw ParseError("cannot write file: " + args.json_out);
            jout << json{{"format_version", 1}, {"rows", rows}}.dump(2) << "\n";
        }
        return kExitOk;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInputError;
    }
}

}  // namespace barplan
