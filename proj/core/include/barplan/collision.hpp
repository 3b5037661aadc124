#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "barplan/geometry.hpp"
#include "barplan/kinematics.hpp"
#include "barplan/model.hpp"
#include "barplan/scene.hpp"

namespace barplan {

struct Capsule {
    Vec3 p0{Vec3::Zero()};
    Vec3 p1{Vec3::Zero()};
    double radius = 0.0;  // > 0; p0 == p1 degenerates to a sphere
};

/// Signed distance between two capsules: segment-segment distance minus the
/// radii sum. Negative means penetration.
double capsule_distance(const Capsule& a, const Capsule& b);

struct CollisionOptions {
    // Margin added to every radii pair except within the ignore set.
    double clearance = 0.002;
    // Penetration allowed for by-design contacts (touching neighbors,
    // ground-resting elements).
    double contact_tolerance = 1e-3;
    double ground_z = 0.0;
    // Build the uniform-grid broad phase above this capsule count.
    int grid_threshold = 32;
    double grid_cell = 0.25;
};

/// Element being carried: its capsule in the tool frame plus the id used for
/// ignore bookkeeping.
struct HeldElement {
    int element_id = -1;
    Capsule capsule_in_tool;
};

/// Pairs exempted from the clearance margin: the element being placed or
/// extruded plus its by-design touching neighbors. `ground` extends the same
/// policy to the ground plane for elements that rest on it.
struct IgnoreSet {
    std::vector<int> elements;  // ascending ids
    bool ground = false;

    bool contains(int id) const {
        for (int e : elements)
            if (e == id) return true;
        return false;
    }
};

/// Immutable snapshot of the obstacles seen by one planning query: the
/// built elements of a partial structure, static scene capsules, and the
/// ground halfspace. Queries are pure and thread-safe.
class CollisionWorld {
public:
    CollisionWorld(std::vector<std::pair<int, Capsule>> structure_capsules,
                   std::vector<Capsule> static_obstacles, CollisionOptions options = {});

    /// World for a partial structure: one capsule per included bar and per
    /// implied connector, plus scene obstacles.
    static CollisionWorld for_partial(const BarStructure& structure,
                                      const PartialStructure& partial, const SceneSpec& scene,
                                      CollisionOptions options = {});

    bool state_in_collision(const RobotModel& robot, const Configuration& q,
                            const std::optional<HeldElement>& held = std::nullopt,
                            const IgnoreSet& ignore = {}) const;

    struct TrajectoryHit {
        int index = -1;  // into the resampled waypoint list
        Configuration state;
    };

    /// Checks every waypoint after resampling at max_joint_step resolution.
    /// Returns the first colliding waypoint, or nullopt if free.
    std::optional<TrajectoryHit> trajectory_in_collision(
        const RobotModel& robot, const std::vector<Configuration>& waypoints,
        const std::optional<HeldElement>& held = std::nullopt, const IgnoreSet& ignore = {},
        double max_joint_step = 0.02) const;

    /// Free-standing capsule vs world (structure + obstacles + ground).
    /// Used for grasp/goal prefiltering. Respects ignore and clearance the
    /// same way held-element checks do.
    bool capsule_in_collision(const Capsule& c, const IgnoreSet& ignore = {}) const;

    /// Structure element ids whose capsules lie within `tol` of `c`
    /// (touching neighbors for ignore-set construction).
    std::vector<int> touching_elements(const Capsule& c, double tol) const;

    const CollisionOptions& options() const { return options_; }
    const std::vector<std::pair<int, Capsule>>& structure_capsules() const {
        return structure_;
    }
    const std::vector<Capsule>& static_obstacles() const { return obstacles_; }

private:
    std::vector<std::pair<int, Capsule>> structure_;
    std::vector<Capsule> obstacles_;
    CollisionOptions options_;

    // Uniform-grid broad phase over structure capsules (built above
    // grid_threshold). Cells map to capsule indices.
    struct Grid;
    std::shared_ptr<const Grid> grid_;

    template <typename Fn>
    void for_structure_candidates(const Capsule& query, Fn&& fn) const;
};

/// Capsule for a structure element in its design pose.
Capsule element_capsule(const BarStructure& structure, int element_id);

/// Insert interpolated configurations so consecutive waypoints differ by at
/// most max_joint_step per joint. Original waypoints are preserved.
std::vector<Configuration> resample_trajectory(const std::vector<Configuration>& waypoints,
                                               double max_joint_step);

}  // namespace barplan
