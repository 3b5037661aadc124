#include "barplan/skeleton.hpp"

#include <algorithm>

namespace barplan {

std::string to_string(ActionKind kind) {
    switch (kind) {
        case ActionKind::Transit: return "transit";
        case ActionKind::Pick: return "pick";
        case ActionKind::Transfer: return "transfer";
        case ActionKind::Place: return "place";
        case ActionKind::Extrude: return "extrude";
    }
    return "?";
}

ActionKind action_kind_from_string(const std::string& s) {
    if (s == "transit") return ActionKind::Transit;
    if (s == "pick") return ActionKind::Pick;
    if (s == "transfer") return ActionKind::Transfer;
    if (s == "place") return ActionKind::Place;
    if (s == "extrude") return ActionKind::Extrude;
    throw ParseError("unknown action kind: " + s);
}

Pose PlanningContext::rack_pose() const {
    if (scene.rack) return *scene.rack;
    Pose local;
    local.position = Vec3(0.45, -0.45, 0.15);
    local.orientation = Quat(Eigen::AngleAxisd(std::numbers::pi / 2.0, Vec3::UnitY()));
    return robot.base_frame * local;
}

namespace {

std::optional<ElementStep> evaluate_extrusion(const PlanningContext& ctx,
                                              const CollisionWorld& world,
                                              const PartialStructure& partial, int element_id,
                                              const Configuration& q_entry, RngStream rng) {
    RngStream extrude_rng = rng.split(1);
    std::optional<Trajectory> extrude = plan_extrude(world, ctx.robot, ctx.structure, element_id,
                                                     partial, extrude_rng, ctx.motion, q_entry);
    if (!extrude) return std::nullopt;

    // The extrude start pose touches the anchor node, so the transit into it
    // shares the construction contact exemptions.
    IgnoreSet ignore = construction_ignore(world, ctx.structure, element_id);
    RngStream transit_rng = rng.split(2);
    std::optional<Trajectory> transit =
        plan_joint_motion(world, ctx.robot, ctx.structure, q_entry, extrude->waypoints.front(),
                          transit_rng, TrajectoryKind::Transit, ctx.motion, std::nullopt, ignore);
    if (!transit) return std::nullopt;

    ElementStep step;
    step.element_id = element_id;
    step.actions.push_back({ActionKind::Transit, element_id, {std::move(*transit)}});
    step.actions.push_back({ActionKind::Extrude, element_id, {std::move(*extrude)}});
    return step;
}

std::optional<ElementStep> evaluate_assembly(const PlanningContext& ctx,
                                             const CollisionWorld& world,
                                             const PartialStructure& partial, int element_id,
                                             const Configuration& q_entry, RngStream rng) {
    const Pose rack = ctx.rack_pose();
    std::vector<GraspCandidate> grasps = grasp_candidates(ctx.structure, element_id, ctx.motion);

    for (int gi = 0; gi < static_cast<int>(grasps.size()); ++gi) {
        const GraspCandidate& grasp = grasps[gi];
        RngStream grasp_rng = rng.split(static_cast<std::uint64_t>(gi) + 16);

        RngStream pick_rng = grasp_rng.split(1);
        auto pick = plan_pick(world, ctx.robot, ctx.structure, element_id, rack, grasp, pick_rng,
                              ctx.motion, q_entry);
        if (!pick) continue;

        RngStream place_rng = grasp_rng.split(2);
        auto place = plan_place(world, ctx.robot, ctx.structure, element_id, grasp, place_rng,
                                ctx.motion, pick->retreat.waypoints.back());
        if (!place) continue;

        Attachment attachment{element_id, grasp.grasp};
        RngStream transfer_rng = grasp_rng.split(3);
        auto transfer = plan_joint_motion(world, ctx.robot, ctx.structure,
                                          pick->retreat.waypoints.back(),
                                          place->approach.waypoints.front(), transfer_rng,
                                          TrajectoryKind::Transfer, ctx.motion, attachment);
        if (!transfer) continue;

        RngStream transit_rng = grasp_rng.split(4);
        auto transit = plan_joint_motion(world, ctx.robot, ctx.structure, q_entry,
                                         pick->approach.waypoints.front(), transit_rng,
                                         TrajectoryKind::Transit, ctx.motion);
        if (!transit) continue;

        ElementStep step;
        step.element_id = element_id;
        step.actions.push_back({ActionKind::Transit, element_id, {std::move(*transit)}});
        step.actions.push_back(
            {ActionKind::Pick, element_id, {std::move(pick->approach), std::move(pick->retreat)}});
        step.actions.push_back({ActionKind::Transfer, element_id, {std::move(*transfer)}});
        step.actions.push_back({ActionKind::Place, element_id,
                                {std::move(place->approach), std::move(place->retreat)}});
        return step;
    }
    return std::nullopt;
}

}  // namespace

std::optional<ElementStep> evaluate_element(const PlanningContext& ctx,
                                            const PartialStructure& partial, int element_id,
                                            const Configuration& q_entry) {
    CollisionWorld world =
        CollisionWorld::for_partial(ctx.structure, partial, ctx.scene, ctx.collision);
    RngStream rng = ctx.base_rng.split2(partial.hash(), static_cast<std::uint64_t>(element_id));
    if (ctx.mode == ConstructionMode::Extrusion)
        return evaluate_extrusion(ctx, world, partial, element_id, q_entry, rng);
    return evaluate_assembly(ctx, world, partial, element_id, q_entry, rng);
}

ConstructionPlan splice(const PlanningContext& ctx, std::vector<ElementStep> steps,
                        const Configuration& q_home) {
    ConstructionPlan plan;
    plan.mode = ctx.mode;
    plan.home = q_home;

    PartialStructure built = ctx.structure.empty_partial();
    Configuration q_prev = q_home;

    for (std::size_t i = 0; i < steps.size(); ++i) {
        ElementStep& step = steps[i];
        if (built.contains(step.element_id))
            throw SpliceError("element repeated in step order");
        if (!grounded_connected(ctx.structure, built.with(step.element_id)))
            throw SpliceError("steps are not a valid construction order at element " +
                              std::to_string(step.element_id));

        if ((step.entry() - q_prev).cwiseAbs().maxCoeff() > 1e-12) {
            // Entry mismatch (search relaxes transits to start from home):
            // bridge with a transit planned in the true current world.
            CollisionWorld world =
                CollisionWorld::for_partial(ctx.structure, built, ctx.scene, ctx.collision);
            IgnoreSet ignore;
            if (ctx.mode == ConstructionMode::Extrusion)
                ignore = construction_ignore(world, ctx.structure, step.element_id);
            const Configuration goal = step.actions[1].trajectories.front().waypoints.front();
            RngStream rng = ctx.base_rng.split2(0x5e11ce5ULL + i, built.hash());
            auto bridge = plan_joint_motion(world, ctx.robot, ctx.structure, q_prev, goal, rng,
                                            TrajectoryKind::Transit, ctx.motion, std::nullopt,
                                            ignore);
            if (!bridge)
                throw SpliceError("bridging transit failed before element " +
                                  std::to_string(step.element_id));
            step.actions[0].trajectories = {std::move(*bridge)};
        }

        q_prev = step.exit();
        built.insert(step.element_id);
        plan.steps.push_back(std::move(step));
    }

    CollisionWorld world =
        CollisionWorld::for_partial(ctx.structure, built, ctx.scene, ctx.collision);
    RngStream rng = ctx.base_rng.split(0x40e11ULL);
    auto back_home = plan_joint_motion(world, ctx.robot, ctx.structure, q_prev, q_home, rng,
                                       TrajectoryKind::Transit, ctx.motion);
    if (!back_home) throw SpliceError("final transit home failed");
    plan.final_transit = std::move(*back_home);
    return plan;
}

}  // namespace barplan
