#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "barplan/geometry.hpp"

namespace barplan {

enum class ConstructionMode { Extrusion, Assembly };

enum class ElementKind { ExtrudedBar, AssembledBar, Connector };

struct Node {
    int id = -1;
    Vec3 position{Vec3::Zero()};
    bool grounded = false;
};

struct CrossSection {
    double area = 0.0;  // m^2
    double iy = 0.0;    // m^4
    double iz = 0.0;    // m^4
    double j = 0.0;     // m^4 (torsion constant)
};

struct Material {
    std::string name;
    double youngs_modulus = 0.0;  // Pa
    double shear_modulus = 0.0;   // Pa
    double density = 0.0;         // kg/m^3
    // When absent, a solid circular section is derived from the element radius.
    std::optional<CrossSection> section;
};

struct BarElement {
    int id = -1;
    int end_a = -1;
    int end_b = -1;
    double radius = 0.0;  // m
    ElementKind kind = ElementKind::AssembledBar;
    int material = -1;  // index into BarStructure::materials
    // Connectors only: ids of the two bars this connector joins.
    std::array<int, 2> parents{-1, -1};
};

/// Subset of the bar elements of one BarStructure, as a fixed-size bit set
/// indexed by element id. Connectors are never members; they are implied by
/// the presence of both parent bars. Value type, cheap to copy.
class PartialStructure {
public:
    PartialStructure() = default;
    explicit PartialStructure(int num_elements)
        : size_(num_elements), bits_((num_elements + 63) / 64, 0), count_(0) {}

    bool contains(int id) const { return (bits_[id >> 6] >> (id & 63)) & 1ULL; }

    void insert(int id) {
        std::uint64_t& w = bits_[id >> 6];
        std::uint64_t m = 1ULL << (id & 63);
        if (!(w & m)) {
            w |= m;
            ++count_;
        }
    }

    void erase(int id) {
        std::uint64_t& w = bits_[id >> 6];
        std::uint64_t m = 1ULL << (id & 63);
        if (w & m) {
            w &= ~m;
            --count_;
        }
    }

    int count() const { return count_; }
    bool empty() const { return count_ == 0; }
    int capacity() const { return size_; }

    /// Members in ascending id order.
    std::vector<int> ids() const {
        std::vector<int> out;
        out.reserve(count_);
        for (int i = 0; i < size_; ++i)
            if (contains(i)) out.push_back(i);
        return out;
    }

    PartialStructure with(int id) const {
        PartialStructure p = *this;
        p.insert(id);
        return p;
    }

    PartialStructure without(int id) const {
        PartialStructure p = *this;
        p.erase(id);
        return p;
    }

    bool operator==(const PartialStructure& o) const { return bits_ == o.bits_; }

    std::uint64_t hash() const {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (std::uint64_t w : bits_) {
            h ^= w;
            h *= 0x100000001b3ULL;
        }
        return h;
    }

private:
    int size_ = 0;
    std::vector<std::uint64_t> bits_;
    int count_ = 0;
};

struct PartialStructureHash {
    std::size_t operator()(const PartialStructure& p) const { return p.hash(); }
};

/// Immutable bar-structure design: nodes, elements, materials, adjacency.
/// Built by load_structure() / StructureBuilder and safe to share across
/// threads afterwards.
struct BarStructure {
    ConstructionMode mode = ConstructionMode::Extrusion;
    double ground_epsilon = 1e-6;
    std::vector<Node> nodes;
    std::vector<BarElement> elements;  // bars and connectors, dense ids
    std::vector<Material> materials;

    // Bar ids (excludes connectors), ascending.
    std::vector<int> bar_ids;
    // Per bar id: neighbor bar ids (shared node or connector link), ascending.
    std::vector<std::vector<int>> adjacency;
    // Per bar id: connector element ids attached to it.
    std::vector<std::vector<int>> bar_connectors;

    int num_elements() const { return static_cast<int>(elements.size()); }
    int num_bars() const { return static_cast<int>(bar_ids.size()); }

    bool is_bar(int id) const { return elements[id].kind != ElementKind::Connector; }

    const Vec3& position(int node_id) const { return nodes[node_id].position; }

    double element_length(int id) const {
        const BarElement& e = elements[id];
        return (position(e.end_b) - position(e.end_a)).norm();
    }

    Vec3 element_midpoint(int id) const {
        const BarElement& e = elements[id];
        return 0.5 * (position(e.end_a) + position(e.end_b));
    }

    Vec3 element_direction(int id) const {
        const BarElement& e = elements[id];
        return (position(e.end_b) - position(e.end_a)).normalized();
    }

    /// Effective cross section: material override or solid circle from radius.
    CrossSection section_of(int id) const;

    const Material& material_of(int id) const { return materials[elements[id].material]; }

    /// True if the element touches at least one grounded node.
    bool touches_ground(int id) const {
        const BarElement& e = elements[id];
        return nodes[e.end_a].grounded || nodes[e.end_b].grounded;
    }

    PartialStructure empty_partial() const { return PartialStructure(num_elements()); }

    /// All bars included (connectors stay implicit).
    PartialStructure full_partial() const {
        PartialStructure p(num_elements());
        for (int b : bar_ids) p.insert(b);
        return p;
    }

    /// Element ids to analyze for a partial: its bars plus every connector
    /// whose two parent bars are both included.
    std::vector<int> analysis_elements(const PartialStructure& partial) const;
};

/// Validation failure on an otherwise well-formed file (disconnected design,
/// zero-length element, no grounded node, bad references).
class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed file content (JSON syntax, missing/ill-typed fields).
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Validates invariants and computes adjacency/grounding. Throws
/// ValidationError. Used by load_structure and by in-memory builders.
BarStructure finalize_structure(BarStructure s);

/// Load and validate a structure file (JSON, see docs/formats.md).
/// Throws ParseError / ValidationError.
BarStructure load_structure(const std::string& path);

std::string to_string(ConstructionMode mode);
ConstructionMode mode_from_string(const std::string& s);

/// True iff every bar in `partial` reaches a grounded node through bars in
/// `partial` (adjacency = shared node or connector link). Empty partial is
/// grounded-connected.
bool grounded_connected(const BarStructure& structure, const PartialStructure& partial);

/// Bars e in `partial` with grounded_connected(partial - {e}), ascending id.
std::vector<int> removal_candidates(const BarStructure& structure,
                                    const PartialStructure& partial);

}  // namespace barplan
