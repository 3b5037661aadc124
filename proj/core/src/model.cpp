#include "barplan/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

namespace barplan {

CrossSection BarStructure::section_of(int id) const {
    const Material& m = material_of(id);
    if (m.section) return *m.section;
    double r = elements[id].radius;
    double r2 = r * r;
    CrossSection s;
    s.area = std::numbers::pi * r2;
    s.iy = std::numbers::pi * r2 * r2 / 4.0;
    s.iz = s.iy;
    s.j = 2.0 * s.iy;
    return s;
}

std::vector<int> BarStructure::analysis_elements(const PartialStructure& partial) const {
    std::vector<int> out;
    out.reserve(partial.count() + 8);
    for (int id = 0; id < num_elements(); ++id) {
        const BarElement& e = elements[id];
        if (e.kind == ElementKind::Connector) {
            if (partial.contains(e.parents[0]) && partial.contains(e.parents[1]))
                out.push_back(id);
        } else if (partial.contains(id)) {
            out.push_back(id);
        }
    }
    return out;
}

std::string to_string(ConstructionMode mode) {
    return mode == ConstructionMode::Extrusion ? "extrusion" : "assembly";
}

ConstructionMode mode_from_string(const std::string& s) {
    if (s == "extrusion") return ConstructionMode::Extrusion;
    if (s == "assembly") return ConstructionMode::Assembly;
    throw ParseError("unknown mode: " + s);
}

BarStructure finalize_structure(BarStructure s) {
    const int nn = static_cast<int>(s.nodes.size());
    const int ne = static_cast<int>(s.elements.size());
    if (nn == 0 || ne == 0) throw ValidationError("structure has no nodes or no elements");

    for (int i = 0; i < nn; ++i)
        if (s.nodes[i].id != i)
            throw ValidationError("node ids must be dense 0..num_nodes-1");
    for (int i = 0; i < ne; ++i)
        if (s.elements[i].id != i)
            throw ValidationError("element ids must be dense 0..num_elements-1");

    bool any_grounded = false;
    for (const Node& n : s.nodes) any_grounded = any_grounded || n.grounded;
    if (!any_grounded) throw ValidationError("no grounded node");

    for (const BarElement& e : s.elements) {
        if (e.end_a < 0 || e.end_a >= nn || e.end_b < 0 || e.end_b >= nn)
            throw ValidationError("element " + std::to_string(e.id) + " references missing node");
        if (e.end_a == e.end_b)
            throw ValidationError("element " + std::to_string(e.id) + " has identical ends");
        if (s.element_length(e.id) <= 0.0)
            throw ValidationError("element " + std::to_string(e.id) + " has zero length");
        if (e.radius <= 0.0)
            throw ValidationError("element " + std::to_string(e.id) + " has non-positive radius");
        if (e.material < 0 || e.material >= static_cast<int>(s.materials.size()))
            throw ValidationError("element " + std::to_string(e.id) + " references missing material");
        if (e.kind == ElementKind::Connector) {
            if (s.mode != ConstructionMode::Assembly)
                throw ValidationError("connector elements are only valid in assembly mode");
            for (int p : e.parents) {
                if (p < 0 || p >= ne || s.elements[p].kind == ElementKind::Connector)
                    throw ValidationError("connector " + std::to_string(e.id) +
                                          " must reference two bar parents");
            }
        }
    }
    for (const Material& m : s.materials) {
        if (m.youngs_modulus <= 0 || m.shear_modulus <= 0 || m.density <= 0)
            throw ValidationError("material " + m.name + " has non-positive properties");
        if (m.section && (m.section->area <= 0 || m.section->iy <= 0 || m.section->iz <= 0 ||
                          m.section->j <= 0))
            throw ValidationError("material " + m.name + " has non-positive section values");
    }

    s.bar_ids.clear();
    for (const BarElement& e : s.elements)
        if (e.kind != ElementKind::Connector) s.bar_ids.push_back(e.id);

    // Adjacency between bars: shared node, or a connector joining them.
    std::vector<std::set<int>> adj(ne);
    std::vector<std::vector<int>> node_bars(nn);
    for (int b : s.bar_ids) {
        node_bars[s.elements[b].end_a].push_back(b);
        node_bars[s.elements[b].end_b].push_back(b);
    }
    for (const auto& bars : node_bars)
        for (std::size_t i = 0; i < bars.size(); ++i)
            for (std::size_t k = i + 1; k < bars.size(); ++k) {
                adj[bars[i]].insert(bars[k]);
                adj[bars[k]].insert(bars[i]);
            }
    s.bar_connectors.assign(ne, {});
    for (const BarElement& e : s.elements) {
        if (e.kind != ElementKind::Connector) continue;
        adj[e.parents[0]].insert(e.parents[1]);
        adj[e.parents[1]].insert(e.parents[0]);
        s.bar_connectors[e.parents[0]].push_back(e.id);
        s.bar_connectors[e.parents[1]].push_back(e.id);
    }
    s.adjacency.assign(ne, {});
    for (int id = 0; id < ne; ++id)
        s.adjacency[id] = std::vector<int>(adj[id].begin(), adj[id].end());

    if (!grounded_connected(s, s.full_partial()))
        throw ValidationError("design is not a single grounded-connected component");

    return s;
}

bool grounded_connected(const BarStructure& structure, const PartialStructure& partial) {
    if (partial.empty()) return true;
    std::vector<int> stack;
    std::vector<char> seen(structure.num_elements(), 0);
    int members = 0;
    for (int b : structure.bar_ids) {
        if (!partial.contains(b)) continue;
        ++members;
        if (structure.touches_ground(b) && !seen[b]) {
            seen[b] = 1;
            stack.push_back(b);
        }
    }
    int reached = static_cast<int>(stack.size());
    while (!stack.empty()) {
        int b = stack.back();
        stack.pop_back();
        for (int nb : structure.adjacency[b]) {
            if (!partial.contains(nb) || seen[nb]) continue;
            seen[nb] = 1;
            ++reached;
            stack.push_back(nb);
        }
    }
    return reached == members;
}

std::vector<int> removal_candidates(const BarStructure& structure,
                                    const PartialStructure& partial) {
    std::vector<int> out;
    for (int b : structure.bar_ids) {
        if (!partial.contains(b)) continue;
        if (grounded_connected(structure, partial.without(b))) out.push_back(b);
    }
    return out;
}

}  // namespace barplan
