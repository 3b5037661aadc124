#include "barplan/plan_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

namespace barplan {

namespace {

using nlohmann::json;

json pose_to_json(const Pose& p) {
    return json{{"position", {p.position.x(), p.position.y(), p.position.z()}},
                {"orientation",
                 {p.orientation.w(), p.orientation.x(), p.orientation.y(), p.orientation.z()}}};
}

Pose pose_from_json(const json& j) {
    Pose p;
    const json& pos = j.at("position");
    p.position = Vec3(pos[0].get<double>(), pos[1].get<double>(), pos[2].get<double>());
    const json& q = j.at("orientation");
    p.orientation = Quat(q[0].get<double>(), q[1].get<double>(), q[2].get<double>(),
                         q[3].get<double>());
    return p;
}

json configuration_to_json(const Configuration& q) {
    json a = json::array();
    for (int i = 0; i < q.size(); ++i) a.push_back(q(i));
    return a;
}

Configuration configuration_from_json(const json& j) {
    Configuration q(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) q(i) = j[i].get<double>();
    return q;
}

json trajectory_to_json(const Trajectory& t) {
    json j;
    j["kind"] = to_string(t.kind);
    json wps = json::array();
    for (const Configuration& q : t.waypoints) wps.push_back(configuration_to_json(q));
    j["waypoints"] = std::move(wps);
    if (t.attachment) {
        j["attachment"] = json{{"element", t.attachment->element_id},
                               {"grasp", pose_to_json(t.attachment->grasp)}};
    }
    return j;
}

Trajectory trajectory_from_json(const json& j) {
    Trajectory t;
    t.kind = trajectory_kind_from_string(j.at("kind").get<std::string>());
    for (const json& w : j.at("waypoints")) t.waypoints.push_back(configuration_from_json(w));
    if (j.contains("attachment")) {
        Attachment a;
        a.element_id = j.at("attachment").at("element").get<int>();
        a.grasp = pose_from_json(j.at("attachment").at("grasp"));
        t.attachment = a;
    }
    return t;
}

}  // namespace

MotionOptions Config::motion() const {
    MotionOptions m;
    m.max_joint_step = max_joint_step;
    m.rrt_max_iterations = rrt_max_iterations;
    m.rrt_step = rrt_step;
    m.shortcut_attempts = shortcut_attempts;
    m.rgd_attempts = rgd_attempts;
    m.rgd_scale = rgd_scale;
    m.approach_distance = approach_distance;
    m.insertion_distance = insertion_distance;
    m.place_retreat_distance = place_retreat_distance;
    m.insertion_steps = insertion_steps;
    m.extrude_resolution = extrude_resolution;
    m.extrude_cone_half_angle = extrude_cone_half_angle_deg * std::numbers::pi / 180.0;
    m.grasp_rotations = grasp_rotations;
    m.insertion_directions = insertion_directions;
    m.ik.restarts = ik_restarts;
    m.ik.max_iterations = ik_max_iterations;
    return m;
}

CollisionOptions Config::collision() const {
    CollisionOptions c;
    c.clearance = clearance;
    c.contact_tolerance = contact_tolerance;
    return c;
}

StiffnessOptions Config::stiffness() const {
    StiffnessOptions s;
    s.gravity = gravity;
    s.dense_dof_limit = dense_dof_limit;
    return s;
}

namespace {

json config_to_json(const Config& c) {
    return json{{"tolerance", c.tolerance},
                {"clearance", c.clearance},
                {"contact_tolerance", c.contact_tolerance},
                {"max_joint_step", c.max_joint_step},
                {"heuristic", c.heuristic},
                {"direction", c.direction},
                {"seed", c.seed},
                {"budget_s", c.budget_s},
                {"rrt_max_iterations", c.rrt_max_iterations},
                {"rrt_step", c.rrt_step},
                {"shortcut_attempts", c.shortcut_attempts},
                {"rgd_attempts", c.rgd_attempts},
                {"rgd_scale", c.rgd_scale},
                {"ik_restarts", c.ik_restarts},
                {"ik_max_iterations", c.ik_max_iterations},
                {"approach_distance", c.approach_distance},
                {"insertion_distance", c.insertion_distance},
                {"place_retreat_distance", c.place_retreat_distance},
                {"insertion_steps", c.insertion_steps},
                {"extrude_resolution", c.extrude_resolution},
                {"extrude_cone_half_angle_deg", c.extrude_cone_half_angle_deg},
                {"grasp_rotations", c.grasp_rotations},
                {"insertion_directions", c.insertion_directions},
                {"gravity", c.gravity},
                {"dense_dof_limit", c.dense_dof_limit}};
}

Config config_from_json(const json& j) {
    Config c;
    c.tolerance = j.value("tolerance", c.tolerance);
    c.clearance = j.value("clearance", c.clearance);
    c.contact_tolerance = j.value("contact_tolerance", c.contact_tolerance);
    c.max_joint_step = j.value("max_joint_step", c.max_joint_step);
    c.heuristic = j.value("heuristic", c.heuristic);
    c.direction = j.value("direction", c.direction);
    c.seed = j.value("seed", c.seed);
    c.budget_s = j.value("budget_s", c.budget_s);
    c.rrt_max_iterations = j.value("rrt_max_iterations", c.rrt_max_iterations);
    c.rrt_step = j.value("rrt_step", c.rrt_step);
    c.shortcut_attempts = j.value("shortcut_attempts", c.shortcut_attempts);
    c.rgd_attempts = j.value("rgd_attempts", c.rgd_attempts);
    c.rgd_scale = j.value("rgd_scale", c.rgd_scale);
    c.ik_restarts = j.value("ik_restarts", c.ik_restarts);
    c.ik_max_iterations = j.value("ik_max_iterations", c.ik_max_iterations);
    c.approach_distance = j.value("approach_distance", c.approach_distance);
    c.insertion_distance = j.value("insertion_distance", c.insertion_distance);
    c.place_retreat_distance = j.value("place_retreat_distance", c.place_retreat_distance);
    c.insertion_steps = j.value("insertion_steps", c.insertion_steps);
    c.extrude_resolution = j.value("extrude_resolution", c.extrude_resolution);
    c.extrude_cone_half_angle_deg =
        j.value("extrude_cone_half_angle_deg", c.extrude_cone_half_angle_deg);
    c.grasp_rotations = j.value("grasp_rotations", c.grasp_rotations);
    c.insertion_directions = j.value("insertion_directions", c.insertion_directions);
    c.gravity = j.value("gravity", c.gravity);
    c.dense_dof_limit = j.value("dense_dof_limit", c.dense_dof_limit);

    if (c.tolerance <= 0 || c.clearance < 0 || c.max_joint_step <= 0 || c.budget_s <= 0)
        throw ValidationError("config values must be positive");
    if (c.heuristic != "stiff-plan" && c.heuristic != "euclidean-dist")
        throw ValidationError("unknown heuristic: " + c.heuristic);
    if (c.direction != "backward" && c.direction != "forward")
        throw ValidationError("unknown direction: " + c.direction);
    return c;
}

}  // namespace

Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file: " + path);
    try {
        return config_from_json(json::parse(in));
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
}

Config config_from_json_text(const std::string& text) {
    try {
        return config_from_json(json::parse(text));
    } catch (const json::exception& e) {
        throw ParseError(std::string("config: ") + e.what());
    }
}

std::string config_to_json_text(const Config& config) { return config_to_json(config).dump(2); }

std::uint64_t structure_file_hash(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    std::string canon = j.dump();  // keys sorted by nlohmann's object map
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : canon) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

void save_plan(const std::string& path, const PlanFile& file) {
    json j;
    j["format_version"] = file.format_version;
    j["structure_hash"] = file.structure_hash;
    j["rng_seed"] = file.rng_seed;
    j["mode"] = to_string(file.plan.mode);
    j["config"] = json::parse(config_to_json_text(file.config));
    j["home"] = configuration_to_json(file.plan.home);
    j["sequence"] = file.plan.sequence();
    json steps = json::array();
    for (const ElementStep& step : file.plan.steps) {
        json js;
        js["element"] = step.element_id;
        json actions = json::array();
        for (const ActionInstance& a : step.actions) {
            json ja;
            ja["kind"] = to_string(a.kind);
            ja["element"] = a.element_id;
            json trajs = json::array();
            for (const Trajectory& t : a.trajectories) trajs.push_back(trajectory_to_json(t));
            ja["trajectories"] = std::move(trajs);
            actions.push_back(std::move(ja));
        }
        js["actions"] = std::move(actions);
        steps.push_back(std::move(js));
    }
    j["steps"] = std::move(steps);
    j["final_transit"] = trajectory_to_json(file.plan.final_transit);

    std::ofstream out(path);
    if (!out) throw ParseError("cannot write file: " + path);
    out << j.dump(1) << "\n";
}

PlanFile load_plan(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file: " + path);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    PlanFile file;
    try {
        file.format_version = j.at("format_version").get<int>();
        if (file.format_version != 1)
            throw ParseError(path + ": unsupported format_version");
        file.structure_hash = j.at("structure_hash").get<std::uint64_t>();
        file.rng_seed = j.at("rng_seed").get<std::uint64_t>();
        file.config = config_from_json_text(j.at("config").dump());
        file.plan.mode = mode_from_string(j.at("mode").get<std::string>());
        file.plan.home = configuration_from_json(j.at("home"));
        for (const json& js : j.at("steps")) {
            ElementStep step;
            step.element_id = js.at("element").get<int>();
            for (const json& ja : js.at("actions")) {
                ActionInstance a;
                a.kind = action_kind_from_string(ja.at("kind").get<std::string>());
                a.element_id = ja.at("element").get<int>();
                for (const json& jt : ja.at("trajectories"))
                    a.trajectories.push_back(trajectory_from_json(jt));
                step.actions.push_back(std::move(a));
            }
            file.plan.steps.push_back(std::move(step));
        }
        file.plan.final_transit = trajectory_from_json(j.at("final_transit"));
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    return file;
}

void save_stats(const std::string& path, const SearchStats& stats, const std::string& label) {
    json j;
    j["format_version"] = 1;
    j["label"] = label;
    j["heuristic"] = stats.heuristic_name;
    j["direction"] = stats.direction;
    j["result"] = stats.result;
    j["states_expanded"] = stats.states_expanded;
    j["stiffness_checks"] = stats.stiffness_checks;
    j["geometric_checks"] = stats.geometric_checks;
    j["dead_ends"] = stats.dead_ends;
    j["backtracks"] = stats.backtracks;
    j["heuristic_time_s"] = stats.heuristic_time_s;
    j["search_time_s"] = stats.search_time_s;
    j["splice_time_s"] = stats.splice_time_s;
    std::ofstream out(path);
    if (!out) throw ParseError("cannot write file: " + path);
    out << j.dump(2) << "\n";
}

SearchStats load_stats(const std::string& path, std::string* label) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open file: " + path);
    json j;
    try {
        j = json::parse(in);
        if (j.at("format_version").get<int>() != 1)
            throw ParseError(path + ": unsupported format_version");
        SearchStats s;
        if (label) *label = j.value("label", std::string());
        s.heuristic_name = j.at("heuristic").get<std::string>();
        s.direction = j.at("direction").get<std::string>();
        s.result = j.at("result").get<std::string>();
        s.states_expanded = j.at("states_expanded").get<std::int64_t>();
        s.stiffness_checks = j.at("stiffness_checks").get<std::int64_t>();
        s.geometric_checks = j.at("geometric_checks").get<std::int64_t>();
        s.dead_ends = j.at("dead_ends").get<std::int64_t>();
        s.backtracks = j.at("backtracks").get<std::int64_t>();
        s.heuristic_time_s = j.at("heuristic_time_s").get<double>();
        s.search_time_s = j.at("search_time_s").get<double>();
        s.splice_time_s = j.at("splice_time_s").get<double>();
        return s;
    } catch (const json::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
}

}  // namespace barplan
