#include "barplan/kinematics.hpp"

#include <cmath>

namespace barplan {

FkResult forward_kinematics(const RobotModel& robot, const Configuration& q) {
    if (q.size() != robot.dof())
        throw std::invalid_argument("configuration length does not match joint count");
    FkResult out;
    out.link_poses.resize(robot.dof());
    Pose t = robot.base_frame;
    for (int i = 0; i < robot.dof(); ++i) {
        const RobotJoint& j = robot.joints[i];
        t = t * j.origin * Pose::from_axis_angle(j.axis, q(i));
        out.link_poses[i] = t;
    }
    out.tool = t * robot.tool_frame;
    return out;
}

Pose tool_pose(const RobotModel& robot, const Configuration& q) {
    return forward_kinematics(robot, q).tool;
}

Vec3 tool_axis(const RobotModel& robot, const Configuration& q) {
    return tool_pose(robot, q).rotate(Vec3::UnitZ());
}

Eigen::MatrixXd tool_jacobian(const RobotModel& robot, const Configuration& q) {
    FkResult fk = forward_kinematics(robot, q);
    const Vec3 p = fk.tool.position;
    Eigen::MatrixXd jac(6, robot.dof());
    Pose t = robot.base_frame;
    for (int i = 0; i < robot.dof(); ++i) {
        const RobotJoint& j = robot.joints[i];
        Pose joint_frame = t * j.origin;  // joint axis passes through this origin
        Vec3 z = joint_frame.rotate(j.axis);
        Vec3 r = p - joint_frame.position;
        jac.block<3, 1>(0, i) = z.cross(r);
        jac.block<3, 1>(3, i) = z;
        t = joint_frame * Pose::from_axis_angle(j.axis, q(i));
    }
    return jac;
}

namespace {

Configuration random_configuration(const RobotModel& robot, RngStream& rng) {
    Configuration q(robot.dof());
    for (int i = 0; i < robot.dof(); ++i)
        q(i) = rng.uniform(robot.joints[i].lo, robot.joints[i].hi);
    return q;
}

void clamp_to_limits(const RobotModel& robot, Configuration& q) {
    for (int i = 0; i < robot.dof(); ++i)
        q(i) = std::clamp(q(i), robot.joints[i].lo, robot.joints[i].hi);
}

// One damped-least-squares descent. error_fn returns the task error at q
// (empty optional means "converged"). Iterates are projected into limits;
// the final answer is only accepted if converged inside them.
template <typename ErrorFn>
std::optional<Configuration> dls_descend(const RobotModel& robot, Configuration q,
                                         const IkOptions& opts, ErrorFn&& error_fn) {
    clamp_to_limits(robot, q);
    for (int it = 0; it < opts.max_iterations; ++it) {
        auto [err, done] = error_fn(q);
        if (done) return q;
        Eigen::MatrixXd jac = tool_jacobian(robot, q);
        Eigen::MatrixXd jjt = jac * jac.transpose();
        jjt.diagonal().array() += opts.damping * opts.damping;
        Configuration dq = jac.transpose() * jjt.ldlt().solve(err);
        // Cap the step to keep the linearization honest.
        double m = dq.cwiseAbs().maxCoeff();
        if (m > 0.5) dq *= 0.5 / m;
        q += dq;
        clamp_to_limits(robot, q);
    }
    return std::nullopt;
}

}  // namespace

std::optional<Configuration> inverse_kinematics(const RobotModel& robot, const Pose& target,
                                                const Configuration& seed, RngStream& rng,
                                                const IkOptions& opts) {
    auto error_fn = [&](const Configuration& q) {
        Pose tp = tool_pose(robot, q);
        Vec3 ep = target.position - tp.position;
        Vec3 eo = orientation_error(tp.orientation, target.orientation);
        Eigen::Matrix<double, 6, 1> err;
        err << ep, eo;
        bool done = ep.norm() <= opts.position_tol && eo.norm() <= opts.orientation_tol;
        return std::make_pair(Eigen::VectorXd(err), done);
    };
    Configuration start = seed;
    for (int r = 0; r <= opts.restarts; ++r) {
        auto q = dls_descend(robot, start, opts, error_fn);
        if (q && robot.within_limits(*q)) return q;
        start = random_configuration(robot, rng);
    }
    return std::nullopt;
}

std::optional<Configuration> ik_on_partial_constraint(const RobotModel& robot,
                                                      const Vec3& target_position,
                                                      const Vec3& free_axis,
                                                      const Configuration& seed, RngStream& rng,
                                                      const IkOptions& opts) {
    const Vec3 axis = free_axis.normalized();
    auto error_fn = [&](const Configuration& q) {
        Pose tp = tool_pose(robot, q);
        Vec3 ep = target_position - tp.position;
        Vec3 a = tp.rotate(Vec3::UnitZ());
        // Rotation that carries the current tool axis onto the target axis;
        // no component about the axis itself, so spin stays free.
        Vec3 cr = a.cross(axis);
        double s = cr.norm();
        double c = std::clamp(a.dot(axis), -1.0, 1.0);
        double ang = std::atan2(s, c);
        Vec3 eo = s > 1e-12 ? Vec3(cr / s * ang) : Vec3(Vec3::Zero());
        if (s <= 1e-12 && c < 0) eo = any_perpendicular(axis) * std::numbers::pi;
        Eigen::Matrix<double, 6, 1> err;
        err << ep, eo;
        bool done = ep.norm() <= opts.position_tol && ang <= opts.axis_tol;
        return std::make_pair(Eigen::VectorXd(err), done);
    };
    Configuration start = seed;
    for (int r = 0; r <= opts.restarts; ++r) {
        auto q = dls_descend(robot, start, opts, error_fn);
        if (q && robot.within_limits(*q)) return q;
        start = random_configuration(robot, rng);
    }
    return std::nullopt;
}

}  // namespace barplan
