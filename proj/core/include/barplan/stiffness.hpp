#pragma once

#include <array>
#include <cstdint>
#include <mutex>
#include <optional>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "barplan/model.hpp"

namespace barplan {

/// FEA solve failed (under-constrained or numerically singular system).
/// Reaching this from planner code means a connectivity precondition was
/// violated upstream.
class SingularSystemError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Generic 3D frame problem with per-DOF supports. assemble() derives one
/// from a structure + partial (grounded node = all 6 DOFs fixed); tests use
/// it directly for textbook support conditions (pins, rollers).
struct FrameNode {
    Vec3 position{Vec3::Zero()};
    std::array<bool, 6> fixed{};  // ux uy uz rx ry rz
};

struct FrameElement {
    int node_a = -1;
    int node_b = -1;
    double youngs_modulus = 0.0;
    double shear_modulus = 0.0;
    double density = 0.0;
    CrossSection section;
};

struct FrameProblem {
    std::vector<FrameNode> nodes;
    std::vector<FrameElement> elements;
    double gravity = 9.80665;  // m/s^2, applied along -z as self-weight
    bool self_weight = true;
};

/// Assembled frame: per-element 12x12 local stiffness + rotation, global
/// load vector from self-weight, fixed-DOF mask. DOF order per node:
/// [ux uy uz rx ry rz].
struct FrameModel {
    struct ElementMatrices {
        int a = -1, b = -1;  // model node indices
        Eigen::Matrix<double, 12, 12> k_local;
        Eigen::Matrix<double, 12, 12> transform;  // u_local = transform * u_global
    };
    std::vector<Vec3> positions;
    std::vector<int> node_ids;  // model node -> caller node id
    std::vector<ElementMatrices> elements;
    Eigen::VectorXd load;       // 6 * num_nodes
    std::vector<bool> fixed;    // 6 * num_nodes
    double total_vertical_load = 0.0;  // sum of applied z-forces, for bookkeeping

    int num_nodes() const { return static_cast<int>(positions.size()); }
    int free_dof_count() const;
};

struct DeformationResult {
    // Per model node: [ux uy uz rx ry rz]. Rotations retained but unused by
    // the stiffness constraint.
    std::vector<Eigen::Matrix<double, 6, 1>> displacements;
    std::vector<int> node_ids;
    double max_translation_norm = 0.0;
    int argmax_node = -1;  // caller node id
};

struct StiffnessCheck {
    bool ok = false;
    double max_translation_norm = 0.0;
    int argmax_node = -1;
    bool solver_failed = false;  // FEA singular: treated as constraint violation
};

struct StiffnessOptions {
    double gravity = 9.80665;
    // Dense symmetric factorization up to this many free DOFs, sparse above.
    int dense_dof_limit = 600;
    // Connector section override; default is the first parent bar's section.
    std::optional<CrossSection> connector_section;
};

/// Build element matrices and self-weight loads for a generic frame problem.
FrameModel build_frame_model(const FrameProblem& problem);

/// Direct symmetric solve of K_ff u_f = f_f; fixed DOFs stay zero.
/// Throws SingularSystemError when the free-free block is not SPD or the
/// residual check fails.
DeformationResult solve_frame(const FrameModel& model, int dense_dof_limit = 600);

/// Stiffness constraint evaluation over partial structures, with a memo
/// cache keyed by partial bit set (the search revisits partials). Pure given
/// its inputs; the cache is mutex-guarded, and correctness does not depend
/// on cache hits.
class StiffnessSolver {
public:
    explicit StiffnessSolver(const BarStructure& structure, StiffnessOptions options = {});

    /// Frame model over only the nodes touched by included elements
    /// (bars + implied connectors). Preconditions: partial non-empty and
    /// grounded-connected.
    FrameModel assemble(const PartialStructure& partial) const;

    DeformationResult solve(const PartialStructure& partial) const;

    /// ok iff max translational deflection <= tolerance. Memoized.
    /// An empty partial is trivially ok (nothing loaded).
    StiffnessCheck check(const PartialStructure& partial, double tolerance) const;

    const BarStructure& structure() const { return structure_; }
    const StiffnessOptions& options() const { return options_; }

    /// Number of FEA solves performed (excludes memo hits).
    std::int64_t solve_count() const;
    std::int64_t check_count() const;
    void reset_counters();

private:
    const BarStructure& structure_;
    StiffnessOptions options_;

    struct CacheEntry {
        double max_translation_norm;
        int argmax_node;
        bool solver_failed;
    };
    mutable std::mutex mutex_;
    mutable std::unordered_map<PartialStructure, CacheEntry, PartialStructureHash> cache_;
    mutable std::int64_t solves_ = 0;
    mutable std::int64_t checks_ = 0;
};

struct GreedySequenceResult {
    std::vector<int> sequence;          // complete when success
    bool success = false;
    PartialStructure deepest_partial;   // on failure: largest built set reached
};

/// Forward greedy construction sequence under the stiffness constraint only
/// (no robot). At each step picks the candidate minimizing the resulting max
/// deflection (id tie-break), backtracking on dead ends.
GreedySequenceResult greedy_stiffness_sequence(const StiffnessSolver& solver, double tolerance);

}  // namespace barplan
