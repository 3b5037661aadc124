#include "barplan/motion.hpp"

#include <algorithm>
#include <cmath>

namespace barplan {

std::string to_string(TrajectoryKind kind) {
    switch (kind) {
        case TrajectoryKind::Transit: return "transit";
        case TrajectoryKind::Transfer: return "transfer";
        case TrajectoryKind::Extrude: return "extrude";
        case TrajectoryKind::PickApproach: return "pick-approach";
        case TrajectoryKind::PickRetreat: return "pick-retreat";
        case TrajectoryKind::PlaceApproach: return "place-approach";
        case TrajectoryKind::PlaceRetreat: return "place-retreat";
    }
    return "?";
}

TrajectoryKind trajectory_kind_from_string(const std::string& s) {
    if (s == "transit") return TrajectoryKind::Transit;
    if (s == "transfer") return TrajectoryKind::Transfer;
    if (s == "extrude") return TrajectoryKind::Extrude;
    if (s == "pick-approach") return TrajectoryKind::PickApproach;
    if (s == "pick-retreat") return TrajectoryKind::PickRetreat;
    if (s == "place-approach") return TrajectoryKind::PlaceApproach;
    if (s == "place-retreat") return TrajectoryKind::PlaceRetreat;
    throw ParseError("unknown trajectory kind: " + s);
}

Pose element_design_pose(const BarStructure& structure, int element_id) {
    Vec3 z = structure.element_direction(element_id);
    Vec3 x = any_perpendicular(z);
    Vec3 y = z.cross(x);
    Eigen::Matrix3d r;
    r.col(0) = x;
    r.col(1) = y;
    r.col(2) = z;
    return Pose{structure.element_midpoint(element_id), Quat(r).normalized()};
}

Capsule element_local_capsule(const BarStructure& structure, int element_id) {
    double half = 0.5 * structure.element_length(element_id);
    return Capsule{Vec3(0, 0, -half), Vec3(0, 0, half), structure.elements[element_id].radius};
}

HeldElement make_held_element(const BarStructure& structure, const Attachment& attachment) {
    Capsule local = element_local_capsule(structure, attachment.element_id);
    HeldElement held;
    held.element_id = attachment.element_id;
    held.capsule_in_tool =
        Capsule{attachment.grasp.apply(local.p0), attachment.grasp.apply(local.p1), local.radius};
    return held;
}

std::vector<GraspCandidate> grasp_candidates(const BarStructure& structure, int element_id,
                                             const MotionOptions& opts) {
    std::vector<GraspCandidate> out;
    out.reserve(2 * opts.grasp_rotations);
    for (int k = 0; k < opts.grasp_rotations; ++k) {
        double phi = 2.0 * std::numbers::pi * k / opts.grasp_rotations;
        Vec3 n(std::cos(phi), std::sin(phi), 0.0);  // tool pointing axis, element frame
        for (int side = 0; side < 2; ++side) {
            double s = side == 0 ? 1.0 : -1.0;
            Vec3 zt = n;
            Vec3 xt(0.0, 0.0, s);
            Vec3 yt = zt.cross(xt);
            Eigen::Matrix3d r;  // tool axes in element coordinates
            r.col(0) = xt;
            r.col(1) = yt;
            r.col(2) = zt;
            Pose tool_in_element{Vec3::Zero(), Quat(r).normalized()};
            GraspCandidate g;
            g.element_id = element_id;
            g.grasp = tool_in_element.inverse();
            g.approach_direction = n;
            out.push_back(g);
        }
    }
    return out;
}

IgnoreSet construction_ignore(const CollisionWorld& world, const BarStructure& structure,
                              int element_id) {
    IgnoreSet ignore;
    Capsule goal = element_capsule(structure, element_id);
    double tol = world.options().contact_tolerance;
    ignore.elements = world.touching_elements(goal, tol);
    if (!ignore.contains(element_id)) {
        ignore.elements.push_back(element_id);
        std::sort(ignore.elements.begin(), ignore.elements.end());
    }
    ignore.ground =
        std::min(goal.p0.z(), goal.p1.z()) - goal.radius - world.options().ground_z <= tol;
    return ignore;
}

namespace {

bool state_free(const CollisionWorld& world, const RobotModel& robot, const Configuration& q,
                const std::optional<HeldElement>& held, const IgnoreSet& ignore) {
    return robot.within_limits(q) && !world.state_in_collision(robot, q, held, ignore);
}

// Interior of the straight joint-space segment (endpoints assumed checked).
bool edge_free(const CollisionWorld& world, const RobotModel& robot, const Configuration& a,
               const Configuration& b, const std::optional<HeldElement>& held,
               const IgnoreSet& ignore, double max_joint_step) {
    double d = (b - a).cwiseAbs().maxCoeff();
    int steps = std::max(1, static_cast<int>(std::ceil(d / max_joint_step)));
    for (int k = 1; k < steps; ++k) {
        Configuration q = a + (b - a) * (static_cast<double>(k) / steps);
        if (world.state_in_collision(robot, q, held, ignore)) return false;
    }
    return true;
}

struct Tree {
    std::vector<Configuration> nodes;
    std::vector<int> parent;

    int add(const Configuration& q, int par) {
        nodes.push_back(q);
        parent.push_back(par);
        return static_cast<int>(nodes.size()) - 1;
    }

    int nearest(const Configuration& q) const {
        int best = 0;
        double best_d = (nodes[0] - q).squaredNorm();
        for (int i = 1; i < static_cast<int>(nodes.size()); ++i) {
            double d = (nodes[i] - q).squaredNorm();
            if (d < best_d) {
                best_d = d;
                best = i;
            }
        }
        return best;
    }

    std::vector<Configuration> path_to_root(int idx) const {
        std::vector<Configuration> out;
        for (int i = idx; i >= 0; i = parent[i]) out.push_back(nodes[i]);
        return out;  // leaf..root
    }
};

enum class ExtendStatus { Trapped, Advanced, Reached };

}  // namespace

std::optional<Trajectory> plan_joint_motion(const CollisionWorld& world, const RobotModel& robot,
                                            const BarStructure& structure,
                                            const Configuration& q_start,
                                            const Configuration& q_goal, RngStream& rng,
                                            TrajectoryKind kind, const MotionOptions& opts,
                                            const std::optional<Attachment>& attachment,
                                            const IgnoreSet& ignore) {
    std::optional<HeldElement> held;
    if (attachment) held = make_held_element(structure, *attachment);

    if (!state_free(world, robot, q_start, held, ignore) ||
        !state_free(world, robot, q_goal, held, ignore))
        return std::nullopt;

    Trajectory traj;
    traj.kind = kind;
    traj.attachment = attachment;

    if ((q_goal - q_start).cwiseAbs().maxCoeff() < 1e-12) {
        traj.waypoints = {q_start};
        return traj;
    }

    auto segment_free = [&](const Configuration& a, const Configuration& b) {
        return edge_free(world, robot, a, b, held, ignore, opts.max_joint_step);
    };

    std::vector<Configuration> path;
    if (segment_free(q_start, q_goal)) {
        path = {q_start, q_goal};
    } else {
        Tree start_tree, goal_tree;
        start_tree.add(q_start, -1);
        goal_tree.add(q_goal, -1);
        Tree* ta = &start_tree;
        Tree* tb = &goal_tree;
        bool swapped = false;
        bool connected = false;
        int join_a = -1, join_b = -1;  // node in ta / tb at the junction

        auto extend = [&](Tree& tree, const Configuration& target, int& new_idx) {
            int near = tree.nearest(target);
            Configuration from = tree.nodes[near];
            Vec3::Scalar d = (target - from).norm();
            Configuration to = d <= opts.rrt_step
                                   ? target
                                   : Configuration(from + (target - from) * (opts.rrt_step / d));
            if (!state_free(world, robot, to, held, ignore) || !segment_free(from, to))
                return ExtendStatus::Trapped;
            new_idx = tree.add(to, near);
            return (to - target).cwiseAbs().maxCoeff() < 1e-12 ? ExtendStatus::Reached
                                                               : ExtendStatus::Advanced;
        };

        for (int it = 0; it < opts.rrt_max_iterations && !connected; ++it) {
            Configuration q_rand(robot.dof());
            for (int i = 0; i < robot.dof(); ++i)
                q_rand(i) = rng.uniform(robot.joints[i].lo, robot.joints[i].hi);

            int a_idx = -1;
            if (extend(*ta, q_rand, a_idx) != ExtendStatus::Trapped) {
                // CONNECT: drive the other tree all the way to the new node.
                const Configuration& target = ta->nodes[a_idx];
                ExtendStatus st;
                int b_idx = -1;
                do {
                    st = extend(*tb, target, b_idx);
                } while (st == ExtendStatus::Advanced);
                if (st == ExtendStatus::Reached) {
                    connected = true;
                    join_a = a_idx;
                    join_b = b_idx;
                }
            }
            if (!connected) {
                std::swap(ta, tb);
                swapped = !swapped;
            }
        }
        if (!connected) return std::nullopt;

        // ta holds the junction node index join_a; map back to start/goal trees.
        Tree* t_start = swapped ? tb : ta;
        Tree* t_goal = swapped ? ta : tb;
        int idx_start = swapped ? join_b : join_a;
        int idx_goal = swapped ? join_a : join_b;

        std::vector<Configuration> head = t_start->path_to_root(idx_start);
        std::reverse(head.begin(), head.end());  // start .. junction
        std::vector<Configuration> tail = t_goal->path_to_root(idx_goal);  // junction .. goal
        path = std::move(head);
        // Both trees contain the junction configuration; skip the duplicate.
        for (std::size_t i = 1; i < tail.size(); ++i) path.push_back(tail[i]);
    }

    // Shortcut smoothing: random pairwise cuts.
    for (int attempt = 0; attempt < opts.shortcut_attempts && path.size() > 2; ++attempt) {
        std::size_t i = rng.below(path.size() - 1);
        std::size_t j = i + 1 + rng.below(path.size() - i - 1);
        if (j - i < 2) continue;
        if (segment_free(path[i], path[j]))
            path.erase(path.begin() + i + 1, path.begin() + j);
    }

    traj.waypoints = std::move(path);
    return traj;
}

CartesianResult plan_cartesian_segment(const CollisionWorld& world, const RobotModel& robot,
                                       const BarStructure& structure,
                                       const std::vector<Pose>& tool_poses,
                                       const Configuration& seed, RngStream& rng,
                                       TrajectoryKind kind, const MotionOptions& opts,
                                       const std::optional<Attachment>& attachment,
                                       const IgnoreSet& ignore,
                                       const std::optional<Configuration>& start_configuration) {
    CartesianResult result;
    if (tool_poses.empty()) return result;

    std::optional<HeldElement> held;
    if (attachment) held = make_held_element(structure, *attachment);

    const double jump_limit = opts.jump_factor * opts.max_joint_step;
    IkOptions chained_ik = opts.ik;
    chained_ik.restarts = 0;  // rgd repair provides the randomization

    std::vector<Configuration> wps;
    wps.reserve(tool_poses.size());

    for (int k = 0; k < static_cast<int>(tool_poses.size()); ++k) {
        if (k == 0 && start_configuration) {
            if (!state_free(world, robot, *start_configuration, held, ignore)) {
                result.failed_index = 0;
                return result;
            }
            wps.push_back(*start_configuration);
            continue;
        }
        const Configuration& prev = k == 0 ? seed : wps.back();

        auto acceptable = [&](const Configuration& q) {
            if (!state_free(world, robot, q, held, ignore)) return false;
            if (k == 0) return true;
            if ((q - wps.back()).cwiseAbs().maxCoeff() > jump_limit) return false;
            return edge_free(world, robot, wps.back(), q, held, ignore, opts.max_joint_step);
        };

        std::optional<Configuration> q;
        if (k == 0) {
            // Free choice of the first waypoint: full restarts allowed.
            IkOptions first_ik = opts.ik;
            auto cand = inverse_kinematics(robot, tool_poses[0], prev, rng, first_ik);
            if (cand && acceptable(*cand)) q = cand;
        } else {
            auto cand = inverse_kinematics(robot, tool_poses[k], prev, rng, chained_ik);
            if (cand && acceptable(*cand)) q = cand;
        }
        // Randomized gradient descent repair: perturb the seed, retry.
        for (int attempt = 0; !q && attempt < opts.rgd_attempts; ++attempt) {
            Configuration pseed = prev;
            for (int i = 0; i < robot.dof(); ++i)
                pseed(i) += rng.uniform(-opts.rgd_scale, opts.rgd_scale);
            auto cand = inverse_kinematics(robot, tool_poses[k], pseed, rng, chained_ik);
            if (cand && acceptable(*cand)) q = cand;
        }
        if (!q) {
            result.failed_index = k;
            return result;
        }
        wps.push_back(*q);
    }

    Trajectory traj;
    traj.kind = kind;
    traj.attachment = attachment;
    traj.waypoints = std::move(wps);
    result.trajectory = std::move(traj);
    return result;
}

namespace {

// Straight tool-space line, constant orientation.
std::vector<Pose> line_poses(const Pose& from, const Vec3& to_position, double step) {
    std::vector<Pose> out;
    double d = (to_position - from.position).norm();
    int n = std::max(1, static_cast<int>(std::ceil(d / step)));
    for (int i = 0; i <= n; ++i) {
        Pose p = from;
        p.position = from.position + (to_position - from.position) * (static_cast<double>(i) / n);
        out.push_back(p);
    }
    return out;
}

}  // namespace

std::optional<Trajectory> plan_extrude(const CollisionWorld& world, const RobotModel& robot,
                                       const BarStructure& structure, int element_id,
                                       const PartialStructure& partial, RngStream& rng,
                                       const MotionOptions& opts, const Configuration& seed) {
    const BarElement& e = structure.elements[element_id];

    auto anchored = [&](int node_id) {
        if (structure.nodes[node_id].grounded) return true;
        for (int nb : structure.adjacency[element_id]) {
            if (!partial.contains(nb)) continue;
            const BarElement& o = structure.elements[nb];
            if (o.end_a == node_id || o.end_b == node_id) return true;
        }
        return false;
    };

    std::vector<std::pair<int, int>> orders;  // (start node, end node)
    bool a_anchored = anchored(e.end_a);
    bool b_anchored = anchored(e.end_b);
    if (a_anchored) orders.emplace_back(e.end_a, e.end_b);
    if (b_anchored) orders.emplace_back(e.end_b, e.end_a);
    if (orders.empty()) return std::nullopt;

    IgnoreSet ignore = construction_ignore(world, structure, element_id);

    // Constant-orientation candidates: nozzle barrel within the cone about
    // world-up; tilt 0 first, then rings, 4 spins each. The first
    // orientation that carries the whole segment wins.
    std::vector<Quat> orientations;
    std::vector<double> tilts = {0.0, opts.extrude_cone_half_angle / 2.0,
                                 opts.extrude_cone_half_angle};
    for (double tilt : tilts) {
        int azimuths = tilt == 0.0 ? 1 : 8;
        for (int a = 0; a < azimuths; ++a) {
            double az = 2.0 * std::numbers::pi * a / azimuths;
            Vec3 barrel(std::sin(tilt) * std::cos(az), std::sin(tilt) * std::sin(az),
                        std::cos(tilt));
            Vec3 pointing = -barrel;
            for (int spin_i = 0; spin_i < 4; ++spin_i) {
                double spin = std::numbers::pi / 2.0 * spin_i;
                Vec3 x0 = any_perpendicular(pointing);
                Vec3 x = Eigen::AngleAxisd(spin, pointing) * x0;
                Vec3 y = pointing.cross(x);
                Eigen::Matrix3d r;
                r.col(0) = x;
                r.col(1) = y;
                r.col(2) = pointing;
                orientations.emplace_back(Quat(r).normalized());
            }
        }
    }

    for (const auto& [start_node, end_node] : orders) {
        const Vec3 p0 = structure.position(start_node);
        const Vec3 p1 = structure.position(end_node);
        const double len = (p1 - p0).norm();
        const int n = std::max(1, static_cast<int>(std::ceil(len / opts.extrude_resolution)));
        for (const Quat& orientation : orientations) {
            std::vector<Pose> poses;
            poses.reserve(n + 1);
            for (int i = 0; i <= n; ++i)
                poses.push_back(Pose{p0 + (p1 - p0) * (static_cast<double>(i) / n), orientation});
            CartesianResult res = plan_cartesian_segment(world, robot, structure, poses, seed,
                                                         rng, TrajectoryKind::Extrude, opts,
                                                         std::nullopt, ignore);
            if (res.trajectory) return res.trajectory;
        }
    }
    return std::nullopt;
}

std::optional<PickPlan> plan_pick(const CollisionWorld& world, const RobotModel& robot,
                                  const BarStructure& structure, int element_id,
                                  const Pose& rack_pose, const GraspCandidate& grasp,
                                  RngStream& rng, const MotionOptions& opts,
                                  const Configuration& seed) {
    // Tool pose at the grasp, with the element resting at the rack.
    Pose tool_at_grasp = rack_pose * grasp.grasp.inverse();
    Vec3 approach_world = rack_pose.rotate(grasp.approach_direction);

    Pose standoff = tool_at_grasp;
    standoff.position -= approach_world * opts.approach_distance;

    std::vector<Pose> approach_poses = line_poses(standoff, tool_at_grasp.position, 0.01);
    CartesianResult approach =
        plan_cartesian_segment(world, robot, structure, approach_poses, seed, rng,
                               TrajectoryKind::PickApproach, opts);
    if (!approach.trajectory) return std::nullopt;

    Attachment attachment{element_id, grasp.grasp};
    std::vector<Pose> retreat_poses = line_poses(tool_at_grasp, standoff.position, 0.01);
    CartesianResult retreat = plan_cartesian_segment(
        world, robot, structure, retreat_poses, approach.trajectory->waypoints.back(), rng,
        TrajectoryKind::PickRetreat, opts, attachment, {},
        approach.trajectory->waypoints.back());
    if (!retreat.trajectory) return std::nullopt;

    PickPlan plan;
    plan.approach = std::move(*approach.trajectory);
    plan.retreat = std::move(*retreat.trajectory);
    return plan;
}

std::optional<PlacePlan> plan_place(const CollisionWorld& world, const RobotModel& robot,
                                    const BarStructure& structure, int element_id,
                                    const GraspCandidate& grasp, RngStream& rng,
                                    const MotionOptions& opts, const Configuration& seed) {
    const Pose goal = element_design_pose(structure, element_id);
    const Vec3 bar_axis = goal.rotate(Vec3::UnitZ());
    const Attachment attachment{element_id, grasp.grasp};
    IgnoreSet ignore = construction_ignore(world, structure, element_id);

    const Vec3 e1 = any_perpendicular(bar_axis);
    const Vec3 e2 = bar_axis.cross(e1);

    std::optional<Trajectory> approach;
    int used_direction = -1;
    double used_rotation = 0.0;

    for (double rot : opts.insertion_rotations) {
        for (int k = 0; k < opts.insertion_directions && !approach; ++k) {
            double az = 2.0 * std::numbers::pi * k / opts.insertion_directions;
            Vec3 dir = std::cos(az) * e1 + std::sin(az) * e2;

            std::vector<Pose> tool_poses;
            tool_poses.reserve(opts.insertion_steps + 1);
            for (int i = 0; i <= opts.insertion_steps; ++i) {
                double t = 1.0 - static_cast<double>(i) / opts.insertion_steps;
                Quat spin(Eigen::AngleAxisd(rot * t, bar_axis));
                Pose element_pose;
                element_pose.orientation = (spin * goal.orientation).normalized();
                element_pose.position =
                    goal.position + spin * (dir * (opts.insertion_distance * t));
                tool_poses.push_back(element_pose * grasp.grasp.inverse());
            }

            CartesianResult res = plan_cartesian_segment(world, robot, structure, tool_poses,
                                                         seed, rng, TrajectoryKind::PlaceApproach,
                                                         opts, attachment, ignore);
            if (res.trajectory) {
                approach = std::move(res.trajectory);
                used_direction = k;
                used_rotation = rot;
            }
        }
        if (approach) break;
    }
    if (!approach) return std::nullopt;

    // Retreat happens after detachment: the element is now part of the
    // world. Rebuild the snapshot with it included.
    std::vector<std::pair<int, Capsule>> caps = world.structure_capsules();
    caps.emplace_back(element_id, element_capsule(structure, element_id));
    CollisionWorld world_after(std::move(caps), world.static_obstacles(), world.options());

    Pose tool_at_goal = goal * grasp.grasp.inverse();
    Vec3 retreat_dir = -goal.rotate(grasp.approach_direction);
    Vec3 retreat_target = tool_at_goal.position + retreat_dir * opts.place_retreat_distance;
    std::vector<Pose> retreat_poses = line_poses(tool_at_goal, retreat_target, 0.01);

    CartesianResult retreat = plan_cartesian_segment(
        world_after, robot, structure, retreat_poses, approach->waypoints.back(), rng,
        TrajectoryKind::PlaceRetreat, opts, std::nullopt, ignore, approach->waypoints.back());
    if (!retreat.trajectory) return std::nullopt;

    // The retreat must actually clear contact: its end state is checked
    // against the placed element with no exemptions.
    if (world_after.state_in_collision(robot, retreat.trajectory->waypoints.back()))
        return std::nullopt;

    PlacePlan plan;
    plan.approach = std::move(*approach);
    plan.retreat = std::move(*retreat.trajectory);
    plan.insertion_direction = used_direction;
    plan.insertion_rotation = used_rotation;
    return plan;
}

}  // namespace barplan
