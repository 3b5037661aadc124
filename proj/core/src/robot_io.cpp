#include <fstream>

#include <json.hpp>

#include "barplan/kinematics.hpp"
#include "barplan/model.hpp"

namespace barplan {

namespace {

using nlohmann::json;

Vec3 parse_vec3(const json& j) {
    if (!j.is_array() || j.size() != 3) throw ParseError("expected [x, y, z] triple");
    return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

Pose parse_pose(const json& j) {
    Pose p;
    if (j.contains("position")) p.position = parse_vec3(j.at("position"));
    if (j.contains("orientation")) {
        const json& q = j.at("orientation");
        if (!q.is_array() || q.size() != 4) throw ParseError("orientation must be [w, x, y, z]");
        p.orientation = Quat(q[0].get<double>(), q[1].get<double>(), q[2].get<double>(),
                             q[3].get<double>());
        p.orientation.normalize();
    }
    return p;
}

LinkCapsule parse_capsule(const json& j) {
    LinkCapsule c;
    c.p0 = parse_vec3(j.at("p0"));
    c.p1 = parse_vec3(j.at("p1"));
    c.radius = j.at("radius").get<double>();
    if (c.radius <= 0) throw ValidationError("capsule radius must be positive");
    return c;
}

}  // namespace

RobotModel load_robot(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }

    RobotModel robot;
    try {
        int version = j.at("format_version").get<int>();
        if (version != 1)
            throw ParseError(path + ": unsupported format_version " + std::to_string(version));
        if (j.contains("base_frame")) robot.base_frame = parse_pose(j.at("base_frame"));
        if (j.contains("tool_frame")) robot.tool_frame = parse_pose(j.at("tool_frame"));

        for (const json& jj : j.at("joints")) {
            RobotJoint joint;
            joint.axis = parse_vec3(jj.at("axis")).normalized();
            if (jj.contains("origin")) joint.origin = parse_pose(jj.at("origin"));
            const json& lim = jj.at("limits");
            if (!lim.is_array() || lim.size() != 2) throw ParseError("limits must be [lo, hi]");
            joint.lo = lim[0].get<double>();
            joint.hi = lim[1].get<double>();
            if (!(joint.lo < joint.hi))
                throw ValidationError(path + ": joint limits must satisfy lo < hi");
            std::string type = jj.value("type", std::string("revolute"));
            if (type != "revolute")
                throw ValidationError(path + ": unsupported joint type " + type);
            robot.joints.push_back(joint);

            std::vector<LinkCapsule> caps;
            if (jj.contains("capsules"))
                for (const json& jc : jj.at("capsules")) caps.push_back(parse_capsule(jc));
            robot.link_capsules.push_back(std::move(caps));
        }
        if (robot.joints.empty()) throw ValidationError(path + ": robot has no joints");

        // Tool capsules are given in the tool frame; rebase them onto the
        // last link so collision checking needs only link poses.
        if (j.contains("tool_capsules")) {
            for (const json& jc : j.at("tool_capsules")) {
                LinkCapsule c = parse_capsule(jc);
                c.p0 = robot.tool_frame.apply(c.p0);
                c.p1 = robot.tool_frame.apply(c.p1);
                robot.link_capsules.back().push_back(c);
            }
        }

        robot.home = Configuration::Zero(robot.dof());
        if (j.contains("home")) {
            const json& jh = j.at("home");
            if (static_cast<int>(jh.size()) != robot.dof())
                throw ValidationError(path + ": home length does not match joint count");
            for (int i = 0; i < robot.dof(); ++i) robot.home(i) = jh[i].get<double>();
        }
        if (!robot.within_limits(robot.home))
            throw ValidationError(path + ": home configuration violates joint limits");
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    return robot;
}

}  // namespace barplan
