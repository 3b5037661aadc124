#pragma once

#include <optional>
#include <vector>

#include "barplan/motion.hpp"
#include "barplan/scene.hpp"
#include "barplan/stiffness.hpp"

namespace barplan {

enum class ActionKind { Transit, Pick, Transfer, Place, Extrude };

std::string to_string(ActionKind kind);
ActionKind action_kind_from_string(const std::string& s);

/// One bound action template: its kind, the element it serves, and the
/// trajectories realizing it (pick and place carry approach + retreat).
struct ActionInstance {
    ActionKind kind = ActionKind::Transit;
    int element_id = -1;
    std::vector<Trajectory> trajectories;
};

/// Fixed per-iteration template sequence for a construction mode.
struct PlanSkeleton {
    ConstructionMode mode = ConstructionMode::Extrusion;

    std::vector<ActionKind> iteration_templates() const {
        if (mode == ConstructionMode::Extrusion)
            return {ActionKind::Transit, ActionKind::Extrude};
        return {ActionKind::Transit, ActionKind::Pick, ActionKind::Transfer, ActionKind::Place};
    }
};

/// All actions constructing one element, in skeleton order. Adjacent
/// trajectories share boundary configurations exactly.
struct ElementStep {
    int element_id = -1;
    std::vector<ActionInstance> actions;

    const Configuration& entry() const { return actions.front().trajectories.front().waypoints.front(); }
    const Configuration& exit() const { return actions.back().trajectories.back().waypoints.back(); }
};

struct ConstructionPlan {
    ConstructionMode mode = ConstructionMode::Extrusion;
    Configuration home;
    std::vector<ElementStep> steps;
    Trajectory final_transit;

    std::vector<int> sequence() const {
        std::vector<int> out;
        out.reserve(steps.size());
        for (const ElementStep& s : steps) out.push_back(s.element_id);
        return out;
    }
};

/// Everything evaluate_element and splice need besides the search state.
/// base_rng is a seed root: each (partial, element) evaluation derives its
/// own stream from it, so verdicts are pure functions of (partial, element)
/// and independent of evaluation order.
struct PlanningContext {
    const BarStructure& structure;
    const RobotModel& robot;
    SceneSpec scene;
    ConstructionMode mode = ConstructionMode::Extrusion;
    MotionOptions motion;
    CollisionOptions collision;
    Configuration home;
    RngStream base_rng{0};

    /// Rack pose for assembly picks: scene override or a default in front of
    /// the robot base, bar axis horizontal.
    Pose rack_pose() const;
};

/// Geometric constructability of `element` on `partial` (element not yet a
/// member): plans the full per-iteration action sequence from q_entry.
/// Direction-oblivious; both the backward search and forward validation use
/// it. Returns nullopt when every candidate (grasp, direction, orientation)
/// is exhausted.
std::optional<ElementStep> evaluate_element(const PlanningContext& ctx,
                                            const PartialStructure& partial, int element_id,
                                            const Configuration& q_entry);

class SpliceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Assemble ordered per-element steps into a complete plan: re-plans
/// inter-step transits where entry configurations mismatch (search evaluates
/// with q_entry = home as a relaxation) and appends the final transit home.
/// Throws SpliceError on ordering violations or bridging-transit failure.
ConstructionPlan splice(const PlanningContext& ctx, std::vector<ElementStep> steps,
                        const Configuration& q_home);

}  // namespace barplan
