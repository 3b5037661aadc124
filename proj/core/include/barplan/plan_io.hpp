#pragma once

#include <cstdint>
#include <string>

#include "barplan/search.hpp"
#include "barplan/skeleton.hpp"

namespace barplan {

/// Planner configuration with the documented defaults. Serialized into plan
/// files so replays see the exact settings.
struct Config {
    double tolerance = 0.005;         // m, deformation constraint
    double clearance = 0.002;         // m, collision margin
    double contact_tolerance = 1e-3;  // m, by-design contact allowance
    double max_joint_step = 0.02;     // rad
    std::string heuristic = "stiff-plan";
    std::string direction = "backward";
    std::uint64_t seed = 0;
    double budget_s = 900.0;

    int rrt_max_iterations = 3000;
    double rrt_step = 0.15;
    int shortcut_attempts = 100;
    int rgd_attempts = 30;
    double rgd_scale = 0.35;
    int ik_restarts = 20;
    int ik_max_iterations = 120;

    double approach_distance = 0.08;
    double insertion_distance = 0.10;
    double place_retreat_distance = 0.08;
    int insertion_steps = 8;
    double extrude_resolution = 0.005;
    double extrude_cone_half_angle_deg = 30.0;
    int grasp_rotations = 16;
    int insertion_directions = 8;

    double gravity = 9.80665;
    int dense_dof_limit = 600;

    MotionOptions motion() const;
    CollisionOptions collision() const;
    StiffnessOptions stiffness() const;
};

/// Config file (JSON, all keys optional over the defaults).
Config load_config(const std::string& path);
Config config_from_json_text(const std::string& text);
std::string config_to_json_text(const Config& config);

/// Stable content hash of a structure file (canonicalized JSON), used to tie
/// plan files to their structure.
std::uint64_t structure_file_hash(const std::string& path);

struct PlanFile {
    int format_version = 1;
    std::uint64_t structure_hash = 0;
    std::uint64_t rng_seed = 0;
    Config config;
    ConstructionPlan plan;
};

void save_plan(const std::string& path, const PlanFile& file);
PlanFile load_plan(const std::string& path);

void save_stats(const std::string& path, const SearchStats& stats, const std::string& label);
SearchStats load_stats(const std::string& path, std::string* label = nullptr);

}  // namespace barplan
