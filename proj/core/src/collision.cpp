#include "barplan/collision.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace barplan {

namespace {

// Closest points between segments p1+s*d1 (s in [0,1]) and p2+t*d2
// (Ericson, Real-Time Collision Detection, 5.1.9).
double segment_segment_distance(const Vec3& p1, const Vec3& q1, const Vec3& p2, const Vec3& q2) {
    const Vec3 d1 = q1 - p1;
    const Vec3 d2 = q2 - p2;
    const Vec3 r = p1 - p2;
    const double a = d1.squaredNorm();
    const double e = d2.squaredNorm();
    const double f = d2.dot(r);
    double s, t;
    constexpr double kEps = 1e-12;

    if (a <= kEps && e <= kEps) {
        return r.norm();
    }
    if (a <= kEps) {
        s = 0.0;
        t = std::clamp(f / e, 0.0, 1.0);
    } else {
        const double c = d1.dot(r);
        if (e <= kEps) {
            t = 0.0;
            s = std::clamp(-c / a, 0.0, 1.0);
        } else {
            const double b = d1.dot(d2);
            const double denom = a * e - b * b;
            s = denom > kEps ? std::clamp((b * f - c * e) / denom, 0.0, 1.0) : 0.0;
            t = (b * s + f) / e;
            if (t < 0.0) {
                t = 0.0;
                s = std::clamp(-c / a, 0.0, 1.0);
            } else if (t > 1.0) {
                t = 1.0;
                s = std::clamp((b - c) / a, 0.0, 1.0);
            }
        }
    }
    const Vec3 c1 = p1 + d1 * s;
    const Vec3 c2 = p2 + d2 * t;
    return (c1 - c2).norm();
}

struct Aabb {
    Vec3 lo, hi;
};

Aabb capsule_aabb(const Capsule& c, double inflate) {
    Aabb box;
    box.lo = c.p0.cwiseMin(c.p1).array() - (c.radius + inflate);
    box.hi = c.p0.cwiseMax(c.p1).array() + (c.radius + inflate);
    return box;
}

bool aabb_overlap(const Aabb& a, const Aabb& b) {
    return (a.lo.array() <= b.hi.array()).all() && (b.lo.array() <= a.hi.array()).all();
}

}  // namespace

double capsule_distance(const Capsule& a, const Capsule& b) {
    return segment_segment_distance(a.p0, a.p1, b.p0, b.p1) - (a.radius + b.radius);
}

struct CollisionWorld::Grid {
    double cell = 0.25;
    std::unordered_map<std::int64_t, std::vector<int>> cells;

    static std::int64_t key(int x, int y, int z) {
        // 21 bits per axis, offset to stay positive.
        const std::int64_t off = 1 << 20;
        return (((std::int64_t)(x + off)) << 42) | (((std::int64_t)(y + off)) << 21) |
               (std::int64_t)(z + off);
    }

    void insert(const Aabb& box, int index) {
        int x0 = (int)std::floor(box.lo.x() / cell), x1 = (int)std::floor(box.hi.x() / cell);
        int y0 = (int)std::floor(box.lo.y() / cell), y1 = (int)std::floor(box.hi.y() / cell);
        int z0 = (int)std::floor(box.lo.z() / cell), z1 = (int)std::floor(box.hi.z() / cell);
        for (int x = x0; x <= x1; ++x)
            for (int y = y0; y <= y1; ++y)
                for (int z = z0; z <= z1; ++z) cells[key(x, y, z)].push_back(index);
    }

    template <typename Fn>
    void visit(const Aabb& box, Fn&& fn) const {
        int x0 = (int)std::floor(box.lo.x() / cell), x1 = (int)std::floor(box.hi.x() / cell);
        int y0 = (int)std::floor(box.lo.y() / cell), y1 = (int)std::floor(box.hi.y() / cell);
        int z0 = (int)std::floor(box.lo.z() / cell), z1 = (int)std::floor(box.hi.z() / cell);
        for (int x = x0; x <= x1; ++x)
            for (int y = y0; y <= y1; ++y)
                for (int z = z0; z <= z1; ++z) {
                    auto it = cells.find(key(x, y, z));
                    if (it == cells.end()) continue;
                    for (int idx : it->second) fn(idx);
                }
    }
};

CollisionWorld::CollisionWorld(std::vector<std::pair<int, Capsule>> structure_capsules,
                               std::vector<Capsule> static_obstacles, CollisionOptions options)
    : structure_(std::move(structure_capsules)),
      obstacles_(std::move(static_obstacles)),
      options_(options) {
    if (static_cast<int>(structure_.size()) > options_.grid_threshold) {
        auto grid = std::make_shared<Grid>();
        grid->cell = options_.grid_cell;
        for (int i = 0; i < static_cast<int>(structure_.size()); ++i)
            grid->insert(capsule_aabb(structure_[i].second, options_.clearance), i);
        grid_ = std::move(grid);
    }
}

Capsule element_capsule(const BarStructure& structure, int element_id) {
    const BarElement& e = structure.elements[element_id];
    return Capsule{structure.position(e.end_a), structure.position(e.end_b), e.radius};
}

CollisionWorld CollisionWorld::for_partial(const BarStructure& structure,
                                           const PartialStructure& partial,
                                           const SceneSpec& scene, CollisionOptions options) {
    std::vector<std::pair<int, Capsule>> caps;
    for (int id : structure.analysis_elements(partial))
        caps.emplace_back(id, element_capsule(structure, id));
    std::vector<Capsule> obstacles;
    for (const ObstacleSpec& o : scene.obstacles)
        obstacles.push_back(Capsule{o.p0, o.p1, o.radius});
    return CollisionWorld(std::move(caps), std::move(obstacles), options);
}

template <typename Fn>
void CollisionWorld::for_structure_candidates(const Capsule& query, Fn&& fn) const {
    if (!grid_) {
        for (int i = 0; i < static_cast<int>(structure_.size()); ++i) fn(i);
        return;
    }
    Aabb box = capsule_aabb(query, options_.clearance);
    // Visit marks: grid cells can repeat an index; dedupe with a stamp.
    thread_local std::vector<int> stamps;
    thread_local int stamp = 0;
    if (stamps.size() < structure_.size()) stamps.assign(structure_.size(), 0);
    ++stamp;
    grid_->visit(box, [&](int idx) {
        if (stamps[idx] == stamp) return;
        stamps[idx] = stamp;
        fn(idx);
    });
}

bool CollisionWorld::capsule_in_collision(const Capsule& c, const IgnoreSet& ignore) const {
    const double clearance = options_.clearance;
    bool hit = false;
    for_structure_candidates(c, [&](int i) {
        if (hit) return;
        const auto& [id, sc] = structure_[i];
        if (ignore.contains(id)) {
            if (capsule_distance(c, sc) < -options_.contact_tolerance) hit = true;
        } else if (capsule_distance(c, sc) < clearance) {
            hit = true;
        }
    });
    if (hit) return true;
    for (const Capsule& ob : obstacles_)
        if (capsule_distance(c, ob) < clearance) return true;
    double ground_gap = std::min(c.p0.z(), c.p1.z()) - c.radius - options_.ground_z;
    if (ignore.ground) {
        if (ground_gap < -options_.contact_tolerance) return true;
    } else if (ground_gap < clearance) {
        return true;
    }
    return false;
}

bool CollisionWorld::state_in_collision(const RobotModel& robot, const Configuration& q,
                                        const std::optional<HeldElement>& held,
                                        const IgnoreSet& ignore) const {
    FkResult fk = forward_kinematics(robot, q);
    const int nl = robot.dof();
    std::vector<std::vector<Capsule>> links(nl);
    for (int i = 0; i < nl; ++i) {
        links[i].reserve(robot.link_capsules[i].size());
        for (const LinkCapsule& lc : robot.link_capsules[i])
            links[i].push_back(
                Capsule{fk.link_poses[i].apply(lc.p0), fk.link_poses[i].apply(lc.p1), lc.radius});
    }
    const double clearance = options_.clearance;

    // Self collision, non-adjacent links only.
    for (int i = 0; i < nl; ++i)
        for (int j = i + 2; j < nl; ++j)
            for (const Capsule& a : links[i])
                for (const Capsule& b : links[j])
                    if (capsule_distance(a, b) < clearance) return true;

    // Links vs structure, ground, obstacles.
    for (int i = 0; i < nl; ++i) {
        for (const Capsule& a : links[i]) {
            bool hit = false;
            for_structure_candidates(a, [&](int si) {
                if (hit) return;
                const auto& [id, sc] = structure_[si];
                if (ignore.contains(id)) return;
                if (capsule_distance(a, sc) < clearance) hit = true;
            });
            if (hit) return true;
            for (const Capsule& ob : obstacles_)
                if (capsule_distance(a, ob) < clearance) return true;
            if (std::min(a.p0.z(), a.p1.z()) - a.radius - options_.ground_z < clearance)
                return true;
        }
    }

    if (held) {
        Capsule hc{fk.tool.apply(held->capsule_in_tool.p0), fk.tool.apply(held->capsule_in_tool.p1),
                   held->capsule_in_tool.radius};
        if (capsule_in_collision(hc, ignore)) return true;
        // Held vs robot, excluding the holding link.
        for (int i = 0; i + 1 < nl; ++i)
            for (const Capsule& a : links[i])
                if (capsule_distance(a, hc) < clearance) return true;
    }
    return false;
}

std::vector<Configuration> resample_trajectory(const std::vector<Configuration>& waypoints,
                                               double max_joint_step) {
    std::vector<Configuration> out;
    if (waypoints.empty()) return out;
    out.push_back(waypoints.front());
    for (std::size_t i = 1; i < waypoints.size(); ++i) {
        const Configuration& a = waypoints[i - 1];
        const Configuration& b = waypoints[i];
        double d = (b - a).cwiseAbs().maxCoeff();
        int steps = std::max(1, static_cast<int>(std::ceil(d / max_joint_step)));
        for (int k = 1; k <= steps; ++k)
            out.push_back(a + (b - a) * (static_cast<double>(k) / steps));
    }
    return out;
}

std::optional<CollisionWorld::TrajectoryHit> CollisionWorld::trajectory_in_collision(
    const RobotModel& robot, const std::vector<Configuration>& waypoints,
    const std::optional<HeldElement>& held, const IgnoreSet& ignore,
    double max_joint_step) const {
    std::vector<Configuration> dense = resample_trajectory(waypoints, max_joint_step);
    for (int i = 0; i < static_cast<int>(dense.size()); ++i) {
        if (state_in_collision(robot, dense[i], held, ignore))
            return TrajectoryHit{i, dense[i]};
    }
    return std::nullopt;
}

std::vector<int> CollisionWorld::touching_elements(const Capsule& c, double tol) const {
    std::vector<int> out;
    for_structure_candidates(c, [&](int i) {
        const auto& [id, sc] = structure_[i];
        if (capsule_distance(c, sc) <= tol) out.push_back(id);
    });
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace barplan
