#pragma once

#include <optional>
#include <string>
#include <vector>

#include "barplan/geometry.hpp"

namespace barplan {

struct ObstacleSpec {
    Vec3 p0{Vec3::Zero()};
    Vec3 p1{Vec3::Zero()};
    double radius = 0.0;
};

/// Workspace description carried by the structure file's optional `scene`
/// object: material-rack pose, static obstacles, robot base override.
struct SceneSpec {
    // Pose of an element frame when resting on the rack (assembly mode).
    std::optional<Pose> rack;
    std::vector<ObstacleSpec> obstacles;
    std::optional<Pose> robot_base;
};

/// Scene section of a structure file (empty defaults when absent).
SceneSpec load_scene(const std::string& path);

}  // namespace barplan
