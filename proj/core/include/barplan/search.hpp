#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "barplan/skeleton.hpp"
#include "barplan/stiffness.hpp"

namespace barplan {

/// Per-element priority values. Lower h is removed earlier by the backward
/// search.
struct Heuristic {
    std::string name;            // "euclidean-dist" | "stiff-plan"
    std::vector<double> values;  // indexed by element id (bars only meaningful)
    bool fallback_used = false;  // stiff-plan precompute failed, euclidean used
    std::vector<int> precomputed_sequence;  // stiff-plan: the greedy sequence S
};

/// h(e) = -(midpoint distance to the ground plane): elements farther from
/// the ground sort earlier for removal.
Heuristic heuristic_euclidean(const BarStructure& structure);

/// h(S[i]) = -i over the greedy stiffness-only forward sequence S, so the
/// element built last is removed first. Falls back to euclidean when the
/// greedy search fails.
Heuristic heuristic_stiffplan(const BarStructure& structure, const StiffnessSolver& solver,
                              double tolerance);

struct SearchStats {
    std::int64_t states_expanded = 0;
    std::int64_t stiffness_checks = 0;
    std::int64_t geometric_checks = 0;
    std::int64_t dead_ends = 0;
    std::int64_t backtracks = 0;
    double heuristic_time_s = 0.0;
    double search_time_s = 0.0;
    double splice_time_s = 0.0;
    std::string heuristic_name;
    std::string direction;  // "backward" | "forward"
    std::string result;     // "plan" | "infeasible" | "timeout" | "splice-failure"
};

struct PlanResult {
    std::optional<ConstructionPlan> plan;
    SearchStats stats;
    // On failure: the most advanced frontier reached (backward: fewest
    // remaining elements; forward: most built).
    PartialStructure frontier;
};

struct SearchOptions {
    double tolerance = 0.005;    // m, stiffness constraint
    double budget_s = 600.0;     // wall-clock search budget
    std::string heuristic = "stiff-plan";
};

/// Backward state-space search: starts from the complete structure, removes
/// elements best-first on (|P|, h(e), id) ascending, admitting a successor
/// only if the shrunk partial passes the stiffness check and the removed
/// element is constructible on it. Visited partials are never re-expanded.
/// On reaching the empty structure the removal order is reversed, spliced
/// and returned.
PlanResult backward_plan(const PlanningContext& ctx, const StiffnessSolver& solver,
                         const Heuristic& heuristic, const SearchOptions& opts);

/// Forward best-first twin of backward_plan (adds elements, prefers low
/// h-rank construction first). Same constraint checks; used for the
/// dead-end comparison and by `stats`.
PlanResult forward_plan(const PlanningContext& ctx, const StiffnessSolver& solver,
                        const Heuristic& heuristic, const SearchOptions& opts);

struct BruteForceResult {
    bool feasible = false;
    std::vector<std::vector<int>> sequences;  // all valid, or just the first
};

/// Exhaustive forward enumeration with the identical stiffness + geometric
/// checks. Guarded to structures of at most 8 bars.
BruteForceResult forward_bruteforce(const PlanningContext& ctx, const StiffnessSolver& solver,
                                    double tolerance, bool first_only = true);

struct Violation {
    int step = -1;  // -1: plan-level, steps.size(): final transit
    std::string code;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

/// Forward replay of a plan: monotonic growth, stiffness at every prefix,
/// collision re-check of every trajectory against the evolving world,
/// attachment bookkeeping, boundary continuity, skeleton pattern.
ValidationReport validate_plan(const PlanningContext& ctx, const StiffnessSolver& solver,
                               double tolerance, const ConstructionPlan& plan);

}  // namespace barplan
