#include "barplan/search.hpp"

#include <algorithm>
#include <chrono>
#include <queue>
#include <unordered_set>

namespace barplan {

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct PartialSetHash {
    std::size_t operator()(const PartialStructure& p) const { return p.hash(); }
};

// Queue entries ordered ascending on (|P|, h, element id, sequence number).
struct QueueEntry {
    int remaining;  // |P| of the state
    double h;
    int element;
    std::int64_t seq;
    int node;

    bool operator>(const QueueEntry& o) const {
        if (remaining != o.remaining) return remaining > o.remaining;
        if (h != o.h) return h > o.h;
        if (element != o.element) return element > o.element;
        return seq > o.seq;
    }
};

}  // namespace

Heuristic heuristic_euclidean(const BarStructure& structure) {
    Heuristic h;
    h.name = "euclidean-dist";
    h.values.assign(structure.num_elements(), 0.0);
    for (int b : structure.bar_ids)
        h.values[b] = -std::abs(structure.element_midpoint(b).z());
    return h;
}

Heuristic heuristic_stiffplan(const BarStructure& structure, const StiffnessSolver& solver,
                              double tolerance) {
    GreedySequenceResult greedy = greedy_stiffness_sequence(solver, tolerance);
    if (!greedy.success) {
        Heuristic h = heuristic_euclidean(structure);
        h.fallback_used = true;
        return h;
    }
    Heuristic h;
    h.name = "stiff-plan";
    h.values.assign(structure.num_elements(), 0.0);
    for (int i = 0; i < static_cast<int>(greedy.sequence.size()); ++i)
        h.values[greedy.sequence[i]] = -static_cast<double>(i);
    h.precomputed_sequence = greedy.sequence;
    return h;
}

namespace {

struct SearchNode {
    PartialStructure partial;
    int parent = -1;
    int removed_element = -1;
    ElementStep step;  // construction of removed_element on this->partial
    int depth = 0;
};

PlanResult run_best_first(const PlanningContext& ctx, const StiffnessSolver& solver,
                          const Heuristic& heuristic, const SearchOptions& opts, bool backward) {
    const BarStructure& s = ctx.structure;
    auto t0 = std::chrono::steady_clock::now();

    PlanResult result;
    result.stats.heuristic_name = heuristic.name;
    result.stats.direction = backward ? "backward" : "forward";
    result.frontier = backward ? s.full_partial() : s.empty_partial();

    const PartialStructure start = backward ? s.full_partial() : s.empty_partial();
    const int total = s.num_bars();

    // The complete structure must satisfy the constraint at all.
    StiffnessCheck full_check = solver.check(s.full_partial(), opts.tolerance);
    ++result.stats.stiffness_checks;
    if (!full_check.ok) {
        result.stats.result = "infeasible";
        result.stats.search_time_s = seconds_since(t0);
        return result;
    }

    std::vector<SearchNode> nodes;
    nodes.push_back({start, -1, -1, {}, 0});

    std::priority_queue<QueueEntry, std::vector<QueueEntry>, std::greater<QueueEntry>> queue;
    queue.push({backward ? start.count() : total - start.count(), 0.0, -1, 0, 0});
    std::int64_t seq = 1;

    std::unordered_set<PartialStructure, PartialSetHash> visited;
    visited.insert(start);

    int goal_node = -1;
    int prev_depth = -1;
    bool timed_out = false;

    while (!queue.empty()) {
        if (seconds_since(t0) > opts.budget_s) {
            timed_out = true;
            break;
        }
        QueueEntry entry = queue.top();
        queue.pop();
        const SearchNode node = nodes[entry.node];  // copy: nodes may reallocate

        ++result.stats.states_expanded;
        if (prev_depth >= 0 && node.depth <= prev_depth) ++result.stats.backtracks;
        prev_depth = node.depth;

        bool frontier_better = backward ? node.partial.count() < result.frontier.count()
                                        : node.partial.count() > result.frontier.count();
        if (frontier_better) result.frontier = node.partial;

        // Candidate transitions, ascending (h, id).
        std::vector<int> candidates;
        if (backward) {
            candidates = removal_candidates(s, node.partial);
        } else {
            for (int b : s.bar_ids) {
                if (node.partial.contains(b)) continue;
                bool attachable = s.touches_ground(b);
                for (int nb : s.adjacency[b]) {
                    if (attachable) break;
                    if (node.partial.contains(nb)) attachable = true;
                }
                if (attachable) candidates.push_back(b);
            }
        }
        std::sort(candidates.begin(), candidates.end(), [&](int a, int b) {
            double ha = heuristic.values[a], hb = heuristic.values[b];
            // Backward removes low-h first; forward constructs high-h first
            // (the element that would be removed last).
            if (ha != hb) return backward ? ha < hb : ha > hb;
            return a < b;
        });

        int admitted = 0;
        for (int e : candidates) {
            // Backward: successor |P| shrinks and e must be constructible on
            // it. Forward: successor grows by e, constructed on the current
            // partial.
            PartialStructure succ = backward ? node.partial.without(e) : node.partial.with(e);
            if (visited.count(succ)) continue;
            // The successor is the new standing partial either way; e is
            // constructed on the smaller of the two (stiffness first, it is
            // the cheaper check).
            const PartialStructure& base = backward ? succ : node.partial;

            ++result.stats.stiffness_checks;
            if (!solver.check(succ, opts.tolerance).ok) continue;

            ++result.stats.geometric_checks;
            std::optional<ElementStep> step = evaluate_element(ctx, base, e, ctx.home);
            if (!step) continue;

            visited.insert(succ);
            nodes.push_back({succ, entry.node, e, std::move(*step), node.depth + 1});
            int idx = static_cast<int>(nodes.size()) - 1;
            double h = backward ? heuristic.values[e] : -heuristic.values[e];
            int key_count = backward ? succ.count() : total - succ.count();
            queue.push({key_count, h, e, seq++, idx});
            ++admitted;

            bool done = backward ? succ.empty() : succ.count() == total;
            if (done) {
                goal_node = idx;
                break;
            }
        }
        if (goal_node >= 0) break;
        if (admitted == 0) ++result.stats.dead_ends;
    }

    result.stats.search_time_s = seconds_since(t0);
    if (goal_node < 0) {
        result.stats.result = timed_out ? "timeout" : "infeasible";
        return result;
    }
    result.frontier = backward ? s.empty_partial() : s.full_partial();

    // Removal order root->goal; construction order is its reverse (backward)
    // or itself (forward).
    std::vector<ElementStep> steps;
    for (int i = goal_node; nodes[i].parent >= 0; i = nodes[i].parent)
        steps.push_back(std::move(nodes[i].step));
    if (!backward) std::reverse(steps.begin(), steps.end());

    auto t1 = std::chrono::steady_clock::now();
    try {
        result.plan = splice(ctx, std::move(steps), ctx.home);
        result.stats.result = "plan";
    } catch (const SpliceError&) {
        result.stats.result = "splice-failure";
    }
    result.stats.splice_time_s = seconds_since(t1);
    return result;
}

}  // namespace

PlanResult backward_plan(const PlanningContext& ctx, const StiffnessSolver& solver,
                         const Heuristic& heuristic, const SearchOptions& opts) {
    return run_best_first(ctx, solver, heuristic, opts, true);
}

PlanResult forward_plan(const PlanningContext& ctx, const StiffnessSolver& solver,
                        const Heuristic& heuristic, const SearchOptions& opts) {
    return run_best_first(ctx, solver, heuristic, opts, false);
}

BruteForceResult forward_bruteforce(const PlanningContext& ctx, const StiffnessSolver& solver,
                                    double tolerance, bool first_only) {
    const BarStructure& s = ctx.structure;
    if (s.num_bars() > 8)
        throw std::invalid_argument("forward_bruteforce is guarded to <= 8 bars");

    BruteForceResult result;
    std::unordered_set<PartialStructure, PartialSetHash> dead;
    std::vector<int> order;

    // DFS over forward sequences with the same checks as the planner.
    // Returns true when a sequence exists below `built`.
    auto rec = [&](auto&& self, const PartialStructure& built) -> bool {
        if (built.count() == s.num_bars()) {
            result.feasible = true;
            result.sequences.push_back(order);
            return true;
        }
        if (dead.count(built)) return false;
        bool found = false;
        for (int e : s.bar_ids) {
            if (built.contains(e)) continue;
            bool attachable = s.touches_ground(e);
            for (int nb : s.adjacency[e]) {
                if (attachable) break;
                if (built.contains(nb)) attachable = true;
            }
            if (!attachable) continue;
            PartialStructure next = built.with(e);
            if (!solver.check(next, tolerance).ok) continue;
            if (!evaluate_element(ctx, built, e, ctx.home)) continue;
            order.push_back(e);
            found = self(self, next) || found;
            order.pop_back();
            if (found && first_only) return true;
        }
        if (!found) dead.insert(built);
        return found;
    };
    rec(rec, s.empty_partial());
    return result;
}

namespace {

void add_violation(ValidationReport& report, int step, std::string code, std::string message) {
    report.violations.push_back({step, std::move(code), std::move(message)});
}

bool same_configuration(const Configuration& a, const Configuration& b) {
    return a.size() == b.size() && (a - b).cwiseAbs().maxCoeff() <= 1e-12;
}

}  // namespace

ValidationReport validate_plan(const PlanningContext& ctx, const StiffnessSolver& solver,
                               double tolerance, const ConstructionPlan& plan) {
    ValidationReport report;
    const BarStructure& s = ctx.structure;

    if (plan.mode != ctx.mode)
        add_violation(report, -1, "mode-mismatch", "plan mode differs from requested mode");

    // Monotonic growth covering all bars exactly once.
    {
        PartialStructure seen = s.empty_partial();
        for (int i = 0; i < static_cast<int>(plan.steps.size()); ++i) {
            int e = plan.steps[i].element_id;
            if (e < 0 || e >= s.num_elements() || !s.is_bar(e)) {
                add_violation(report, i, "bad-element", "step references a non-bar element");
                continue;
            }
            if (seen.contains(e))
                add_violation(report, i, "duplicate-element",
                              "element " + std::to_string(e) + " constructed twice");
            seen.insert(e);
        }
        if (seen.count() != s.num_bars())
            add_violation(report, -1, "incomplete", "plan does not construct every element");
    }

    const PlanSkeleton skeleton{plan.mode};
    const std::vector<ActionKind> pattern = skeleton.iteration_templates();

    PartialStructure built = s.empty_partial();
    Configuration q_prev = plan.home;

    for (int i = 0; i < static_cast<int>(plan.steps.size()); ++i) {
        const ElementStep& step = plan.steps[i];
        const int e = step.element_id;

        // Skeleton pattern.
        if (step.actions.size() != pattern.size()) {
            add_violation(report, i, "skeleton", "action count does not match plan skeleton");
            continue;
        }
        for (std::size_t k = 0; k < pattern.size(); ++k)
            if (step.actions[k].kind != pattern[k])
                add_violation(report, i, "skeleton", "action kind deviates from plan skeleton");

        // Connectivity and stiffness of the grown prefix.
        if (!grounded_connected(s, built.with(e)))
            add_violation(report, i, "connectivity",
                          "element " + std::to_string(e) + " is not grounded-connected");
        StiffnessCheck sc = solver.check(built.with(e), tolerance);
        if (!sc.ok)
            add_violation(report, i, "stiffness",
                          "prefix deflection " + std::to_string(sc.max_translation_norm) +
                              " exceeds tolerance");

        // Collision replay against the evolving world.
        CollisionWorld world = CollisionWorld::for_partial(s, built, ctx.scene, ctx.collision);
        IgnoreSet construct_ignore = construction_ignore(world, s, e);

        CollisionWorld world_after =
            CollisionWorld::for_partial(s, built.with(e), ctx.scene, ctx.collision);

        Configuration boundary = q_prev;
        for (const ActionInstance& action : step.actions) {
            for (const Trajectory& traj : action.trajectories) {
                if (traj.waypoints.empty()) {
                    add_violation(report, i, "empty-trajectory",
                                  to_string(traj.kind) + " has no waypoints");
                    continue;
                }
                if (!same_configuration(traj.waypoints.front(), boundary))
                    add_violation(report, i, "continuity",
                                  to_string(traj.kind) + " does not start at previous boundary");
                boundary = traj.waypoints.back();

                // Attachment bookkeeping.
                const bool carries = traj.attachment.has_value();
                const bool should_carry = traj.kind == TrajectoryKind::PickRetreat ||
                                          traj.kind == TrajectoryKind::Transfer ||
                                          traj.kind == TrajectoryKind::PlaceApproach;
                if (carries != should_carry)
                    add_violation(report, i, "attachment",
                                  to_string(traj.kind) + (carries ? " carries an attachment"
                                                                  : " is missing its attachment"));
                if (carries && traj.attachment->element_id != e)
                    add_violation(report, i, "attachment",
                                  "attachment references a different element");

                std::optional<HeldElement> held;
                if (carries) held = make_held_element(s, *traj.attachment);

                IgnoreSet ignore;
                const CollisionWorld* check_world = &world;
                switch (traj.kind) {
                    case TrajectoryKind::Extrude:
                    case TrajectoryKind::PlaceApproach:
                        ignore = construct_ignore;
                        break;
                    case TrajectoryKind::Transit:
                        if (plan.mode == ConstructionMode::Extrusion) ignore = construct_ignore;
                        break;
                    case TrajectoryKind::PlaceRetreat:
                        ignore = construct_ignore;
                        check_world = &world_after;
                        break;
                    default:
                        break;
                }
                auto hit = check_world->trajectory_in_collision(ctx.robot, traj.waypoints, held,
                                                                ignore, ctx.motion.max_joint_step);
                if (hit)
                    add_violation(report, i, "collision",
                                  to_string(traj.kind) + " collides at resampled waypoint " +
                                      std::to_string(hit->index));

                if (traj.kind == TrajectoryKind::PlaceRetreat &&
                    world_after.state_in_collision(ctx.robot, traj.waypoints.back()))
                    add_violation(report, i, "retreat-contact",
                                  "place-retreat does not clear the placed element");
            }
        }
        built.insert(e);
        q_prev = boundary;
    }

    // Final transit home over the completed structure.
    const int final_index = static_cast<int>(plan.steps.size());
    if (plan.final_transit.waypoints.empty()) {
        add_violation(report, final_index, "skeleton", "missing final transit");
    } else {
        if (!same_configuration(plan.final_transit.waypoints.front(), q_prev))
            add_violation(report, final_index, "continuity",
                          "final transit does not start at the last exit");
        if (!same_configuration(plan.final_transit.waypoints.back(), plan.home))
            add_violation(report, final_index, "continuity", "final transit does not end at home");
        if (plan.final_transit.attachment)
            add_violation(report, final_index, "attachment", "final transit carries an attachment");
        CollisionWorld world = CollisionWorld::for_partial(s, built, ctx.scene, ctx.collision);
        auto hit = world.trajectory_in_collision(ctx.robot, plan.final_transit.waypoints,
                                                 std::nullopt, {}, ctx.motion.max_joint_step);
        if (hit)
            add_violation(report, final_index, "collision",
                          "final transit collides at resampled waypoint " +
                              std::to_string(hit->index));
    }
    return report;
}

}  // namespace barplan
