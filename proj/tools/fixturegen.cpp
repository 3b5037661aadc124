// Generates the bundled fixture files (structures + robot). Run with the
// output directory as the only argument; the repository ships the outputs
// under fixtures/.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>

#include <json.hpp>

#include "barplan/model.hpp"

using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

struct Builder {
    json nodes = json::array();
    json elements = json::array();
    double default_radius = 0.013;

    int node(double x, double y, double z, std::optional<bool> grounded = std::nullopt) {
        int id = static_cast<int>(nodes.size());
        json n{{"id", id}, {"xyz", {x, y, z}}};
        if (grounded) n["grounded"] = *grounded;
        nodes.push_back(std::move(n));
        return id;
    }

    int bar(int a, int b, const std::string& kind, double radius = -1.0,
            const std::string& material = "pvc") {
        int id = static_cast<int>(elements.size());
        elements.push_back(json{{"id", id},
                                {"ends", {a, b}},
                                {"radius", radius > 0 ? radius : default_radius},
                                {"kind", kind},
                                {"material_ref", material}});
        return id;
    }

    int connector(int a, int b, int parent_a, int parent_b, double radius,
                  const std::string& material = "pvc") {
        int id = static_cast<int>(elements.size());
        elements.push_back(json{{"id", id},
                                {"ends", {a, b}},
                                {"radius", radius},
                                {"kind", "connector"},
                                {"material_ref", material},
                                {"parents", {parent_a, parent_b}}});
        return id;
    }

    json finish(const std::string& mode, json materials, json scene = {}) const {
        json j;
        j["format_version"] = 1;
        j["mode"] = mode;
        j["nodes"] = nodes;
        j["elements"] = elements;
        j["materials"] = std::move(materials);
        if (!scene.is_null() && !scene.empty()) j["scene"] = std::move(scene);
        return j;
    }
};

// Hollow 26 mm PVC pipe (2.9 mm wall).
json pvc_pipe() {
    return json{{"pvc",
                 {{"youngs_modulus", 3.0e9},
                  {"shear_modulus", 1.1e9},
                  {"density", 1400.0},
                  {"cross_section",
                   {{"area", 2.1045e-4}, {"iy", 1.4259e-8}, {"iz", 1.4259e-8}, {"j", 2.8518e-8}}}}}};
}

// Extruded solid plastic; section derived from the element radius.
json printed_plastic() {
    return json{{"pvc",
                 {{"youngs_modulus", 2.2e9}, {"shear_modulus", 0.8e9}, {"density", 1250.0}}}};
}

json rack_scene(double x, double y, double z) {
    // Element frame on the rack: bar axis horizontal (rotated from +z to +x).
    return json{{"rack",
                 {{"position", {x, y, z}},
                  {"orientation", {std::cos(kPi / 4.0), 0.0, std::sin(kPi / 4.0), 0.0}}}}};
}

void write(const std::filesystem::path& dir, const std::string& name, const json& j) {
    std::ofstream out(dir / name);
    out << j.dump(2) << "\n";
    std::cout << "wrote " << (dir / name).string() << "\n";
}

json make_stack2() {
    Builder b;
    b.default_radius = 0.004;
    int n0 = b.node(0.55, 0.0, 0.0);
    int n1 = b.node(0.55, 0.0, 0.35);
    int n2 = b.node(0.55, 0.0, 0.70);
    b.bar(n0, n1, "extruded-bar");
    b.bar(n1, n2, "extruded-bar");
    return b.finish("extrusion", printed_plastic());
}

json make_floating() {
    Builder b;
    b.default_radius = 0.004;
    int n0 = b.node(0.55, 0.0, 0.2);
    int n1 = b.node(0.55, 0.0, 0.5);
    b.bar(n0, n1, "extruded-bar");
    return b.finish("extrusion", printed_plastic());
}

json make_triangle() {
    Builder b;
    b.default_radius = 0.004;
    int g1 = b.node(0.50, -0.15, 0.0);
    int g2 = b.node(0.50, 0.15, 0.0);
    int apex = b.node(0.50, 0.0, 0.26);
    b.bar(g1, g2, "extruded-bar");
    b.bar(g1, apex, "extruded-bar");
    b.bar(g2, apex, "extruded-bar");
    return b.finish("extrusion", printed_plastic());
}

json make_tetrahedron() {
    Builder b;
    int g1 = b.node(0.48, -0.17, 0.0);
    int g2 = b.node(0.48, 0.17, 0.0);
    int g3 = b.node(0.74, 0.0, 0.0);
    int apex = b.node(0.57, 0.0, 0.28);
    b.bar(g1, g2, "assembled-bar");
    b.bar(g1, g3, "assembled-bar");
    b.bar(g2, g3, "assembled-bar");
    b.bar(g1, apex, "assembled-bar");
    b.bar(g2, apex, "assembled-bar");
    b.bar(g3, apex, "assembled-bar");
    return b.finish("assembly", pvc_pipe(), rack_scene(-0.05, -0.5, 0.18));
}

// Tent over an inner bar: forward bottom-up construction closes the roof
// before the inner bar ranks, then dead-ends; backward peels the roof first.
json make_shell() {
    Builder b;
    b.default_radius = 0.008;
    const double cx = 0.60;
    const double col_top = 0.30;
    const double apex_z = 0.58;
    const double bar_z = 0.44;  // equal to the rafter midpoint height

    // Columns (ids 0-3).
    int ct[4];
    int k = 0;
    for (double sx : {-1.0, 1.0})
        for (double sy : {-1.0, 1.0}) {
            int base = b.node(cx + 0.20 * sx, 0.20 * sy, 0.0);
            ct[k] = b.node(cx + 0.20 * sx, 0.20 * sy, col_top);
            b.bar(base, ct[k], "extruded-bar");
            ++k;
        }
    // Posts (ids 4-5).
    int pt[2];
    for (int i = 0; i < 2; ++i) {
        double sx = i == 0 ? -1.0 : 1.0;
        int base = b.node(cx + 0.10 * sx, 0.0, 0.0);
        pt[i] = b.node(cx + 0.10 * sx, 0.0, bar_z);
        b.bar(base, pt[i], "extruded-bar");
    }
    // Rafters (ids 6-9): column tops to the apex pair above the posts.
    int ap[2];
    ap[0] = b.node(cx - 0.10, 0.0, apex_z);
    ap[1] = b.node(cx + 0.10, 0.0, apex_z);
    b.bar(ct[0], ap[0], "extruded-bar", 0.016);
    b.bar(ct[1], ap[0], "extruded-bar", 0.016);
    b.bar(ct[2], ap[1], "extruded-bar", 0.016);
    b.bar(ct[3], ap[1], "extruded-bar", 0.016);
    // Ridge (id 10).
    b.bar(ap[0], ap[1], "extruded-bar", 0.016);
    // Inner bar (id 11): same heuristic rank as the rafters, higher id.
    b.bar(pt[0], pt[1], "extruded-bar");
    return b.finish("extrusion", printed_plastic());
}

// Double-tangent pocket: a goal bar resting tangent on two crossing chords,
// caged by parallel blocker bars so that every straight insertion collides
// and only a screw candidate enters. Used by plan_place tests; not meant to
// be planned from scratch.
json make_pocket() {
    Builder b;
    const double gx = 0.55;          // goal bar center x
    const double chord_z = 0.2774;   // support chord axis height
    const double gz = chord_z + 0.026;  // goal axis: tangent on the chords
    const double br = 0.008;         // blocker radius

    // Two support chords along x on short legs, split at the crossing nodes.
    int chord_mid[2];
    for (int i = 0; i < 2; ++i) {
        double y = i == 0 ? -0.10 : 0.10;
        int lb0 = b.node(0.45, y, 0.0);
        int lt0 = b.node(0.45, y, chord_z);
        int lb1 = b.node(0.65, y, 0.0);
        int lt1 = b.node(0.65, y, chord_z);
        chord_mid[i] = b.node(gx, y, chord_z);
        b.bar(lb0, lt0, "assembled-bar");
        b.bar(lb1, lt1, "assembled-bar");
        b.bar(lt0, chord_mid[i], "assembled-bar");
        b.bar(chord_mid[i], lt1, "assembled-bar");
    }

    // Blockers parallel to the goal bar, each on two end posts.
    auto blocker = [&](double x, double z) {
        int p0b = b.node(x, -0.16, 0.0);
        int p0t = b.node(x, -0.16, z);
        int p1b = b.node(x, 0.16, 0.0);
        int p1t = b.node(x, 0.16, z);
        b.bar(p0b, p0t, "assembled-bar", br);
        b.bar(p1b, p1t, "assembled-bar", br);
        b.bar(p0t, p1t, "assembled-bar", br);
    };
    blocker(gx - 0.014, gz + 0.0526);  // over the goal, slightly left
    blocker(gx + 0.045, gz + 0.0536);  // upper right lane
    blocker(gx - 0.038, gz + 0.0346);  // upper left lane
    blocker(gx + 0.031, gz + 0.0060);  // right lane
    blocker(gx - 0.031, gz + 0.0060);  // left lane

    // The goal bar, spanning exactly between the chord crossings, joined by
    // connectors at both tangent contacts.
    int ga = b.node(gx, -0.10, gz);
    int gb = b.node(gx, 0.10, gz);
    int goal = b.bar(ga, gb, "assembled-bar");
    b.connector(ga, chord_mid[0], goal, 2, 0.010);
    b.connector(gb, chord_mid[1], goal, 6, 0.010);

    return b.finish("assembly", pvc_pipe(), rack_scene(-0.05, -0.5, 0.18));
}

// Trussed ladder arch spanning along y, built from both supports.
json make_arch() {
    Builder b;
    const double cx = 0.55;
    const double half_span = 0.55;
    const double rise = 0.33;
    const int segments = 9;  // 10 nodes per rail

    // Circular arc through (+-half_span, 0) and (0, rise).
    const double radius = (half_span * half_span + rise * rise) / (2.0 * rise);
    const double zc = rise - radius;
    const double theta_max = std::asin(half_span / radius);

    int rail[2][segments + 1];
    for (int r = 0; r < 2; ++r) {
        double x = cx + (r == 0 ? -0.06 : 0.06);
        for (int i = 0; i <= segments; ++i) {
            double t = -theta_max + 2.0 * theta_max * i / segments;
            double y = radius * std::sin(t);
            double z = zc + radius * std::cos(t);
            rail[r][i] = b.node(x, y, std::max(0.0, z));
        }
    }
    // Rails (2 x 9 = 18).
    for (int r = 0; r < 2; ++r)
        for (int i = 0; i < segments; ++i) b.bar(rail[r][i], rail[r][i + 1], "assembled-bar");
    // Rungs (10).
    for (int i = 0; i <= segments; ++i) b.bar(rail[0][i], rail[1][i], "assembled-bar");
    // Diagonals (9), alternating.
    for (int i = 0; i < segments; ++i) {
        if (i % 2 == 0)
            b.bar(rail[0][i], rail[1][i + 1], "assembled-bar");
        else
            b.bar(rail[1][i], rail[0][i + 1], "assembled-bar");
    }
    // Two extra crown braces -> 39 elements.
    b.bar(rail[1][3], rail[0][4], "assembled-bar");
    b.bar(rail[0][5], rail[1][6], "assembled-bar");

    return b.finish("assembly", pvc_pipe(), rack_scene(-0.10, -0.50, 0.18));
}

// Diagrid dome ("vault"): 4 node rings + apex, ring beams on the upper
// rings. scale = 1 gives the assembly footprint; the extrusion variant is
// half scale with thin printed bars.
json make_vault(bool extrusion) {
    Builder b;
    const double s = extrusion ? 0.5 : 1.0;
    const double cx = extrusion ? 0.50 : 0.55;
    b.default_radius = extrusion ? 0.004 : 0.013;
    const std::string kind = extrusion ? "extruded-bar" : "assembled-bar";

    const double ring_r[4] = {0.40 * s, 0.33 * s, 0.24 * s, 0.13 * s};
    const double ring_z[4] = {0.0, 0.15 * s, 0.27 * s, 0.36 * s};
    const int n = 8;

    int ring[4][n];
    for (int k = 0; k < 4; ++k) {
        double offset = k * kPi / n;  // alternate rings twist half a bay
        for (int i = 0; i < n; ++i) {
            double a = 2.0 * kPi * i / n + offset;
            ring[k][i] = b.node(cx + ring_r[k] * std::cos(a), ring_r[k] * std::sin(a),
                                ring_z[k]);
        }
    }
    int apex = b.node(cx, 0.0, 0.42 * s);

    // Diagonal bands (16 per band).
    for (int k = 0; k < 3; ++k)
        for (int i = 0; i < n; ++i) {
            b.bar(ring[k][i], ring[k + 1][i], kind);
            b.bar(ring[k][(i + 1) % n], ring[k + 1][i], kind);
        }
    // Ring beams on rings 2 and 3 (16).
    for (int k = 2; k < 4; ++k)
        for (int i = 0; i < n; ++i) b.bar(ring[k][i], ring[k][(i + 1) % n], kind);
    // Apex fan (8).
    for (int i = 0; i < n; ++i) b.bar(ring[3][i], apex, kind);

    json scene = extrusion ? json{} : rack_scene(-0.15, -0.50, 0.18);
    return b.finish(extrusion ? "extrusion" : "assembly",
                    extrusion ? printed_plastic() : pvc_pipe(), scene);
}

json make_robot() {
    json j;
    j["format_version"] = 1;
    j["base_frame"] = {{"position", {0.0, 0.0, 0.0}}};
    j["tool_frame"] = {{"position", {0.0, 0.0, 0.14}}};
    j["home"] = {0.0, 0.5, 0.9, 0.0, 0.6, 0.0};
    auto joint = [](std::initializer_list<double> axis, std::initializer_list<double> origin,
                    double lo, double hi, json capsules) {
        return json{{"axis", axis},
                    {"origin", {{"position", origin}}},
                    {"limits", {lo, hi}},
                    {"capsules", std::move(capsules)}};
    };
    j["joints"] = json::array({
        joint({0, 0, 1}, {0, 0, 0.16}, -2.97, 2.97,
              json::array({{{"p0", {0, 0, 0.02}}, {"p1", {0, 0, 0.12}}, {"radius", 0.07}}})),
        joint({0, 1, 0}, {0, 0, 0.14}, -2.0, 2.0,
              json::array({{{"p0", {0, 0, 0.05}}, {"p1", {0, 0, 0.37}}, {"radius", 0.06}}})),
        joint({0, 1, 0}, {0, 0, 0.42}, -2.6, 2.6,
              json::array({{{"p0", {0, 0, 0.05}}, {"p1", {0, 0, 0.35}}, {"radius", 0.05}}})),
        joint({0, 0, 1}, {0, 0, 0.40}, -2.97, 2.97,
              json::array({{{"p0", {0, 0, 0.01}}, {"p1", {0, 0, 0.10}}, {"radius", 0.045}}})),
        joint({0, 1, 0}, {0, 0, 0.11}, -2.1, 2.1,
              json::array({{{"p0", {0, 0, 0.0}}, {"p1", {0, 0, 0.06}}, {"radius", 0.04}}})),
        joint({0, 0, 1}, {0, 0, 0.07}, -2.97, 2.97, json::array()),
    });
    // Nozzle/gripper barrel, in the tool frame; stops short of the tip so
    // work contact at the tip stays clear.
    j["tool_capsules"] =
        json::array({{{"p0", {0, 0, -0.115}}, {"p1", {0, 0, -0.035}}, {"radius", 0.025}}});
    return j;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc != 2) {
        std::cerr << "usage: fixturegen <output-dir>\n";
        return 1;
    }
    std::filesystem::path dir(argv[1]);
    std::filesystem::create_directories(dir);

    write(dir, "robot_arm6.json", make_robot());
    write(dir, "stack2.json", make_stack2());
    write(dir, "floating.json", make_floating());
    write(dir, "triangle.json", make_triangle());
    write(dir, "tetrahedron.json", make_tetrahedron());
    write(dir, "shell.json", make_shell());
    write(dir, "pocket.json", make_pocket());
    write(dir, "arch.json", make_arch());
    write(dir, "vault_assembly.json", make_vault(false));
    write(dir, "vault_extrusion.json", make_vault(true));

    // Everything except `floating` (a deliberate validation-error fixture)
    // must load cleanly.
    for (const char* name :
         {"stack2.json", "triangle.json", "tetrahedron.json", "shell.json", "pocket.json",
          "arch.json", "vault_assembly.json", "vault_extrusion.json"}) {
        barplan::BarStructure s = barplan::load_structure((dir / name).string());
        std::cout << name << ": " << s.num_bars() << " bars, " << s.num_elements()
                  << " elements, " << s.nodes.size() << " nodes\n";
    }
    return 0;
}
