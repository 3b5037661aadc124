#include <fstream>
#include <map>

#include <json.hpp>

#include "barplan/model.hpp"
#include "barplan/scene.hpp"

namespace barplan {

namespace {

using nlohmann::json;

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file: " + path);
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
}

Vec3 parse_vec3(const json& j) {
    if (!j.is_array() || j.size() != 3) throw ParseError("expected [x, y, z] triple");
    return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

ElementKind parse_kind(const std::string& s) {
    if (s == "extruded-bar") return ElementKind::ExtrudedBar;
    if (s == "assembled-bar") return ElementKind::AssembledBar;
    if (s == "connector") return ElementKind::Connector;
    throw ParseError("unknown element kind: " + s);
}

Pose parse_pose(const json& j) {
    Pose p;
    p.position = parse_vec3(j.at("position"));
    if (j.contains("orientation")) {
        const json& q = j.at("orientation");
        if (!q.is_array() || q.size() != 4) throw ParseError("orientation must be [w, x, y, z]");
        p.orientation = Quat(q[0].get<double>(), q[1].get<double>(), q[2].get<double>(),
                             q[3].get<double>());
        p.orientation.normalize();
    }
    return p;
}

}  // namespace

BarStructure load_structure(const std::string& path) {
    json j = read_json_file(path);
    BarStructure s;
    try {
        int version = j.at("format_version").get<int>();
        if (version != 1)
            throw ParseError(path + ": unsupported format_version " + std::to_string(version));
        s.mode = mode_from_string(j.at("mode").get<std::string>());
        s.ground_epsilon = j.value("ground_epsilon", 1e-6);

        std::map<std::string, int> material_index;
        if (j.contains("materials")) {
            for (const auto& [name, jm] : j.at("materials").items()) {
                Material m;
                m.name = name;
                m.youngs_modulus = jm.at("youngs_modulus").get<double>();
                m.shear_modulus = jm.at("shear_modulus").get<double>();
                m.density = jm.at("density").get<double>();
                if (jm.contains("cross_section")) {
                    const json& cs = jm.at("cross_section");
                    CrossSection sec;
                    sec.area = cs.at("area").get<double>();
                    sec.iy = cs.at("iy").get<double>();
                    sec.iz = cs.at("iz").get<double>();
                    sec.j = cs.at("j").get<double>();
                    m.section = sec;
                }
                material_index[name] = static_cast<int>(s.materials.size());
                s.materials.push_back(std::move(m));
            }
        }
        if (s.materials.empty()) {
            // PVC-like fallback; configuration, not ground truth.
            Material m;
            m.name = "default";
            m.youngs_modulus = 3.0e9;
            m.shear_modulus = 1.1e9;
            m.density = 1400.0;
            material_index[m.name] = 0;
            s.materials.push_back(std::move(m));
        }

        s.nodes.resize(j.at("nodes").size());
        for (const json& jn : j.at("nodes")) {
            Node n;
            n.id = jn.at("id").get<int>();
            n.position = parse_vec3(jn.at("xyz"));
            if (jn.contains("grounded"))
                n.grounded = jn.at("grounded").get<bool>();
            else
                n.grounded = n.position.z() <= s.ground_epsilon;
            if (n.id < 0 || n.id >= static_cast<int>(s.nodes.size()))
                throw ParseError("node id out of range: " + std::to_string(n.id));
            s.nodes[n.id] = n;
        }

        s.elements.resize(j.at("elements").size());
        for (const json& je : j.at("elements")) {
            BarElement e;
            e.id = je.at("id").get<int>();
            const json& ends = je.at("ends");
            if (!ends.is_array() || ends.size() != 2) throw ParseError("ends must be [a, b]");
            e.end_a = ends[0].get<int>();
            e.end_b = ends[1].get<int>();
            e.radius = je.at("radius").get<double>();
            if (je.contains("kind"))
                e.kind = parse_kind(je.at("kind").get<std::string>());
            else
                e.kind = s.mode == ConstructionMode::Extrusion ? ElementKind::ExtrudedBar
                                                               : ElementKind::AssembledBar;
            std::string ref = je.value("material_ref", std::string());
            if (ref.empty()) {
                e.material = 0;
            } else {
                auto it = material_index.find(ref);
                if (it == material_index.end())
                    throw ParseError("unknown material_ref: " + ref);
                e.material = it->second;
            }
            if (e.kind == ElementKind::Connector) {
                const json& par = je.at("parents");
                if (!par.is_array() || par.size() != 2)
                    throw ParseError("connector parents must be [bar_a, bar_b]");
                e.parents = {par[0].get<int>(), par[1].get<int>()};
            }
            if (e.id < 0 || e.id >= static_cast<int>(s.elements.size()))
                throw ParseError("element id out of range: " + std::to_string(e.id));
            s.elements[e.id] = e;
        }
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    return finalize_structure(std::move(s));
}

SceneSpec load_scene(const std::string& path) {
    json j = read_json_file(path);
    SceneSpec scene;
    if (!j.contains("scene")) return scene;
    try {
        const json& js = j.at("scene");
        if (js.contains("rack")) scene.rack = parse_pose(js.at("rack"));
        if (js.contains("robot_base")) scene.robot_base = parse_pose(js.at("robot_base"));
        if (js.contains("obstacles")) {
            for (const json& jo : js.at("obstacles")) {
                ObstacleSpec o;
                o.p0 = parse_vec3(jo.at("p0"));
                o.p1 = parse_vec3(jo.at("p1"));
                o.radius = jo.at("radius").get<double>();
                scene.obstacles.push_back(o);
            }
        }
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    return scene;
}

}  // namespace barplan
