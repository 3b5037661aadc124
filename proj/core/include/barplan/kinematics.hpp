#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "barplan/geometry.hpp"
#include "barplan/rng.hpp"

namespace barplan {

/// Joint angles in radians, length = robot joint count.
using Configuration = Eigen::VectorXd;

struct RobotJoint {
    Pose origin;            // parent link frame -> joint frame
    Vec3 axis{Vec3::UnitZ()};  // unit, in joint frame; revolute
    double lo = 0.0;
    double hi = 0.0;
};

struct LinkCapsule {
    Vec3 p0{Vec3::Zero()};
    Vec3 p1{Vec3::Zero()};
    double radius = 0.0;
};

/// Serial kinematic chain with per-link collision capsules. Immutable and
/// shareable once loaded.
struct RobotModel {
    Pose base_frame;
    std::vector<RobotJoint> joints;
    // Per joint: capsules of the link it moves, in that link's frame.
    std::vector<std::vector<LinkCapsule>> link_capsules;
    Pose tool_frame;  // last link frame -> tool tip frame
    Configuration home;

    int dof() const { return static_cast<int>(joints.size()); }

    bool within_limits(const Configuration& q) const {
        for (int i = 0; i < dof(); ++i)
            if (q(i) < joints[i].lo || q(i) > joints[i].hi) return false;
        return true;
    }
};

/// Load and validate a robot file (JSON, see docs/formats.md).
RobotModel load_robot(const std::string& path);

struct FkResult {
    Pose tool;
    std::vector<Pose> link_poses;  // world pose of each link frame
};

FkResult forward_kinematics(const RobotModel& robot, const Configuration& q);

/// Tool pose only (avoids the per-link vector).
Pose tool_pose(const RobotModel& robot, const Configuration& q);

/// Direction the tool points, in world coordinates (tool frame +Z).
Vec3 tool_axis(const RobotModel& robot, const Configuration& q);

/// Geometric Jacobian of the tool point: rows [v; omega], one column per
/// joint.
Eigen::MatrixXd tool_jacobian(const RobotModel& robot, const Configuration& q);

struct IkOptions {
    int max_iterations = 120;
    int restarts = 20;
    double position_tol = 1e-4;       // m
    double orientation_tol = 1e-3;    // rad (full-pose IK)
    double axis_tol = 2.0 * std::numbers::pi / 180.0;  // rad (partial-constraint IK)
    double damping = 0.08;
};

/// Damped-least-squares IK from `seed`, with random restarts inside joint
/// limits. Returned configurations always satisfy limits; candidates that
/// converge outside them are rejected, not clamped.
std::optional<Configuration> inverse_kinematics(const RobotModel& robot, const Pose& target,
                                                const Configuration& seed, RngStream& rng,
                                                const IkOptions& opts = {});

/// Position-exact IK with the tool axis constrained to `free_axis` within
/// axis_tol; rotation about that axis left free.
std::optional<Configuration> ik_on_partial_constraint(const RobotModel& robot,
                                                      const Vec3& target_position,
                                                      const Vec3& free_axis,
                                                      const Configuration& seed, RngStream& rng,
                                                      const IkOptions& opts = {});

}  // namespace barplan
