#pragma once

#include <optional>
#include <vector>

#include "barplan/collision.hpp"
#include "barplan/geometry.hpp"
#include "barplan/kinematics.hpp"
#include "barplan/model.hpp"
#include "barplan/rng.hpp"

namespace barplan {

enum class TrajectoryKind {
    Transit,
    Transfer,
    Extrude,
    PickApproach,
    PickRetreat,
    PlaceApproach,
    PlaceRetreat,
};

std::string to_string(TrajectoryKind kind);
TrajectoryKind trajectory_kind_from_string(const std::string& s);

/// Rigid tool<->element attachment: the element's pose expressed in the tool
/// frame. Constant while the element is held.
struct Attachment {
    int element_id = -1;
    Pose grasp;  // element frame in tool frame
};

struct Trajectory {
    std::vector<Configuration> waypoints;
    TrajectoryKind kind = TrajectoryKind::Transit;
    std::optional<Attachment> attachment;
};

/// Candidate grasp: tool tip at the element midpoint, tool axis
/// perpendicular to the bar axis (by generation rule).
struct GraspCandidate {
    int element_id = -1;
    Pose grasp;               // element frame in tool frame (same as Attachment)
    Vec3 approach_direction;  // tool travel direction during approach, element frame
};

struct MotionOptions {
    double max_joint_step = 0.02;  // rad, collision-check resolution
    double jump_factor = 5.0;      // cartesian discontinuity guard, x max_joint_step

    // RRT-Connect. Budgets are iteration counts so results are reproducible.
    int rrt_max_iterations = 3000;
    double rrt_step = 0.15;
    int shortcut_attempts = 100;

    // Randomized-gradient-descent repair for cartesian chaining.
    int rgd_attempts = 30;
    double rgd_scale = 0.35;  // rad, seed perturbation

    double approach_distance = 0.08;       // m, pick approach/retreat
    double insertion_distance = 0.10;      // m, place standoff offset
    double place_retreat_distance = 0.08;  // m
    int insertion_steps = 8;

    double extrude_resolution = 0.005;  // m along the element
    double extrude_cone_half_angle = 30.0 * std::numbers::pi / 180.0;

    int grasp_rotations = 16;      // x2 sides = 32 candidates
    int insertion_directions = 8;  // in the plane perpendicular to the bar
    std::vector<double> insertion_rotations = {0.0, 15.0 * std::numbers::pi / 180.0,
                                               -15.0 * std::numbers::pi / 180.0,
                                               30.0 * std::numbers::pi / 180.0,
                                               -30.0 * std::numbers::pi / 180.0};

    IkOptions ik;
};

/// Canonical element frame: origin at the midpoint, +Z along the bar axis
/// (end_a -> end_b), X/Y fixed deterministically.
Pose element_design_pose(const BarStructure& structure, int element_id);

/// Element capsule in its own frame (symmetric about +Z).
Capsule element_local_capsule(const BarStructure& structure, int element_id);

HeldElement make_held_element(const BarStructure& structure, const Attachment& attachment);

/// Midpoint grasps: grasp_rotations azimuths about the bar axis x 2 tool-roll
/// sides, in fixed order.
std::vector<GraspCandidate> grasp_candidates(const BarStructure& structure, int element_id,
                                             const MotionOptions& opts);

/// RRT-Connect with shortcut smoothing. Waypoints are within max_joint_step
/// after resampling and collision-free for the given attachment/ignore.
std::optional<Trajectory> plan_joint_motion(const CollisionWorld& world, const RobotModel& robot,
                                            const BarStructure& structure,
                                            const Configuration& q_start,
                                            const Configuration& q_goal, RngStream& rng,
                                            TrajectoryKind kind, const MotionOptions& opts,
                                            const std::optional<Attachment>& attachment = {},
                                            const IgnoreSet& ignore = {});

struct CartesianResult {
    std::optional<Trajectory> trajectory;
    int failed_index = -1;  // pose index where chaining failed
};

/// Per-pose IK chained from the previous waypoint, with randomized repair
/// when the chained solution collides or jumps. When `start_configuration`
/// is given it becomes the first waypoint verbatim (boundary continuity
/// across sub-primitives).
CartesianResult plan_cartesian_segment(const CollisionWorld& world, const RobotModel& robot,
                                       const BarStructure& structure,
                                       const std::vector<Pose>& tool_poses,
                                       const Configuration& seed, RngStream& rng,
                                       TrajectoryKind kind, const MotionOptions& opts,
                                       const std::optional<Attachment>& attachment = {},
                                       const IgnoreSet& ignore = {},
                                       const std::optional<Configuration>& start_configuration = {});

/// Extrusion pass over one element: tool tip follows the element segment
/// from its anchored node to its free node with a constant orientation
/// chosen from a cone about world-up. Both endpoint orderings are tried when
/// both ends anchor.
std::optional<Trajectory> plan_extrude(const CollisionWorld& world, const RobotModel& robot,
                                       const BarStructure& structure, int element_id,
                                       const PartialStructure& partial, RngStream& rng,
                                       const MotionOptions& opts,
                                       const Configuration& seed);

struct PickPlan {
    Trajectory approach;  // no attachment
    Trajectory retreat;   // carries the attachment
};

std::optional<PickPlan> plan_pick(const CollisionWorld& world, const RobotModel& robot,
                                  const BarStructure& structure, int element_id,
                                  const Pose& rack_pose, const GraspCandidate& grasp,
                                  RngStream& rng, const MotionOptions& opts,
                                  const Configuration& seed);

struct PlacePlan {
    Trajectory approach;  // attachment active, insertion screw motion
    Trajectory retreat;   // after detachment, pure translation
    int insertion_direction = -1;
    double insertion_rotation = 0.0;
};

std::optional<PlacePlan> plan_place(const CollisionWorld& world, const RobotModel& robot,
                                    const BarStructure& structure, int element_id,
                                    const GraspCandidate& grasp, RngStream& rng,
                                    const MotionOptions& opts, const Configuration& seed);

/// Ignore set for constructing `element_id` on this world: the element
/// itself, every already-built element its design capsule touches, and the
/// ground when it rests there.
IgnoreSet construction_ignore(const CollisionWorld& world, const BarStructure& structure,
                              int element_id);

}  // namespace barplan
