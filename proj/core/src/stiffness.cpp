#include "barplan/stiffness.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include <Eigen/Sparse>

namespace barplan {

namespace {

// Local axes for an element: x along the axis, y/z picked via a reference
// vector (global z unless the element is near-vertical).
Eigen::Matrix3d local_axes(const Vec3& pa, const Vec3& pb) {
    Vec3 x = (pb - pa).normalized();
    Vec3 ref = std::abs(x.dot(Vec3::UnitZ())) < 0.999 ? Vec3::UnitZ() : Vec3::UnitX();
    Vec3 y = ref.cross(x).normalized();
    Vec3 z = x.cross(y);
    Eigen::Matrix3d r;
    r.row(0) = x;
    r.row(1) = y;
    r.row(2) = z;
    return r;  // maps global -> local
}

Eigen::Matrix<double, 12, 12> euler_bernoulli_local(const FrameElement& e, double length) {
    const double L = length;
    const double A = e.section.area;
    const double E = e.youngs_modulus;
    const double G = e.shear_modulus;
    const double Iy = e.section.iy;
    const double Iz = e.section.iz;
    const double J = e.section.j;

    Eigen::Matrix<double, 12, 12> k = Eigen::Matrix<double, 12, 12>::Zero();
    const double ax = E * A / L;
    const double tor = G * J / L;
    const double cz1 = 12.0 * E * Iz / (L * L * L);
    const double cz2 = 6.0 * E * Iz / (L * L);
    const double cz3 = 4.0 * E * Iz / L;
    const double cz4 = 2.0 * E * Iz / L;
    const double cy1 = 12.0 * E * Iy / (L * L * L);
    const double cy2 = 6.0 * E * Iy / (L * L);
    const double cy3 = 4.0 * E * Iy / L;
    const double cy4 = 2.0 * E * Iy / L;

    // axial
    k(0, 0) = ax;  k(0, 6) = -ax;  k(6, 6) = ax;
    // torsion
    k(3, 3) = tor; k(3, 9) = -tor; k(9, 9) = tor;
    // bending in local xy-plane (v, theta_z)
    k(1, 1) = cz1;  k(1, 5) = cz2;   k(1, 7) = -cz1;  k(1, 11) = cz2;
    k(5, 5) = cz3;  k(5, 7) = -cz2;  k(5, 11) = cz4;
    k(7, 7) = cz1;  k(7, 11) = -cz2;
    k(11, 11) = cz3;
    // bending in local xz-plane (w, theta_y)
    k(2, 2) = cy1;  k(2, 4) = -cy2;  k(2, 8) = -cy1;  k(2, 10) = -cy2;
    k(4, 4) = cy3;  k(4, 8) = cy2;   k(4, 10) = cy4;
    k(8, 8) = cy1;  k(8, 10) = cy2;
    k(10, 10) = cy3;

    return k.selfadjointView<Eigen::Upper>();
}

// Work-equivalent nodal loads for a uniform line load (local components):
// half the load plus wL^2/12 fixed-end moments at each end.
Eigen::Matrix<double, 12, 1> uniform_load_local(const Vec3& q_local, double L) {
    Eigen::Matrix<double, 12, 1> f = Eigen::Matrix<double, 12, 1>::Zero();
    const double qx = q_local.x(), qy = q_local.y(), qz = q_local.z();
    f(0) = qx * L / 2.0;
    f(6) = qx * L / 2.0;
    f(1) = qy * L / 2.0;
    f(5) = qy * L * L / 12.0;
    f(7) = qy * L / 2.0;
    f(11) = -qy * L * L / 12.0;
    f(2) = qz * L / 2.0;
    f(4) = -qz * L * L / 12.0;
    f(8) = qz * L / 2.0;
    f(10) = qz * L * L / 12.0;
    return f;
}

}  // namespace

int FrameModel::free_dof_count() const {
    int n = 0;
    for (bool f : fixed)
        if (!f) ++n;
    return n;
}

FrameModel build_frame_model(const FrameProblem& problem) {
    FrameModel model;
    const int nn = static_cast<int>(problem.nodes.size());
    model.positions.resize(nn);
    model.node_ids.resize(nn);
    model.fixed.assign(6 * nn, false);
    model.load = Eigen::VectorXd::Zero(6 * nn);
    for (int i = 0; i < nn; ++i) {
        model.positions[i] = problem.nodes[i].position;
        model.node_ids[i] = i;
        for (int d = 0; d < 6; ++d) model.fixed[6 * i + d] = problem.nodes[i].fixed[d];
    }

    for (const FrameElement& e : problem.elements) {
        const Vec3& pa = problem.nodes[e.node_a].position;
        const Vec3& pb = problem.nodes[e.node_b].position;
        const double L = (pb - pa).norm();
        Eigen::Matrix3d r = local_axes(pa, pb);

        FrameModel::ElementMatrices em;
        em.a = e.node_a;
        em.b = e.node_b;
        em.k_local = euler_bernoulli_local(e, L);
        em.transform.setZero();
        for (int blk = 0; blk < 4; ++blk) em.transform.block<3, 3>(3 * blk, 3 * blk) = r;
        model.elements.push_back(em);

        if (problem.self_weight) {
            const double w = e.density * e.section.area * problem.gravity;  // N/m, downward
            Vec3 q_global(0.0, 0.0, -w);
            Vec3 q_local = r * q_global;
            Eigen::Matrix<double, 12, 1> f_local = uniform_load_local(q_local, L);
            Eigen::Matrix<double, 12, 1> f_global = em.transform.transpose() * f_local;
            for (int d = 0; d < 6; ++d) {
                model.load(6 * e.node_a + d) += f_global(d);
                model.load(6 * e.node_b + d) += f_global(6 + d);
            }
            model.total_vertical_load += -w * L;
        }
    }
    return model;
}

DeformationResult solve_frame(const FrameModel& model, int dense_dof_limit) {
    const int nn = model.num_nodes();
    const int ndof = 6 * nn;

    std::vector<int> dof_index(ndof, -1);
    int nf = 0;
    for (int i = 0; i < ndof; ++i)
        if (!model.fixed[i]) dof_index[i] = nf++;
    if (nf == 0) throw SingularSystemError("no free DOFs");

    Eigen::VectorXd f = Eigen::VectorXd::Zero(nf);
    for (int i = 0; i < ndof; ++i)
        if (dof_index[i] >= 0) f(dof_index[i]) = model.load(i);

    auto scatter = [&](const FrameModel::ElementMatrices& em, auto&& emit) {
        Eigen::Matrix<double, 12, 12> kg =
            em.transform.transpose() * em.k_local * em.transform;
        std::array<int, 12> g;
        for (int d = 0; d < 6; ++d) {
            g[d] = 6 * em.a + d;
            g[6 + d] = 6 * em.b + d;
        }
        for (int r = 0; r < 12; ++r) {
            int gr = dof_index[g[r]];
            if (gr < 0) continue;
            for (int c = 0; c < 12; ++c) {
                int gc = dof_index[g[c]];
                if (gc < 0) continue;
                emit(gr, gc, kg(r, c));
            }
        }
    };

    Eigen::VectorXd u_f(nf);
    if (nf <= dense_dof_limit) {
        Eigen::MatrixXd K = Eigen::MatrixXd::Zero(nf, nf);
        for (const auto& em : model.elements)
            scatter(em, [&](int r, int c, double v) { K(r, c) += v; });
        Eigen::LLT<Eigen::MatrixXd> llt(K);
        if (llt.info() != Eigen::Success)
            throw SingularSystemError("stiffness matrix not positive definite");
        u_f = llt.solve(f);
        double fn = f.norm();
        if (fn > 0.0 && (K * u_f - f).norm() / fn > 1e-9)
            throw SingularSystemError("solve residual exceeds threshold");
    } else {
        std::vector<Eigen::Triplet<double>> trips;
        trips.reserve(model.elements.size() * 144);
        for (const auto& em : model.elements)
            scatter(em, [&](int r, int c, double v) { trips.emplace_back(r, c, v); });
        Eigen::SparseMatrix<double> K(nf, nf);
        K.setFromTriplets(trips.begin(), trips.end());
        Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt(K);
        if (llt.info() != Eigen::Success)
            throw SingularSystemError("stiffness matrix not positive definite");
        u_f = llt.solve(f);
        double fn = f.norm();
        if (fn > 0.0 && (K * u_f - f).norm() / fn > 1e-9)
            throw SingularSystemError("solve residual exceeds threshold");
    }

    DeformationResult result;
    result.displacements.assign(nn, Eigen::Matrix<double, 6, 1>::Zero());
    result.node_ids = model.node_ids;
    for (int i = 0; i < nn; ++i)
        for (int d = 0; d < 6; ++d) {
            int idx = dof_index[6 * i + d];
            if (idx >= 0) result.displacements[i](d) = u_f(idx);
        }
    result.max_translation_norm = 0.0;
    result.argmax_node = -1;
    for (int i = 0; i < nn; ++i) {
        double t = result.displacements[i].head<3>().norm();
        if (t > result.max_translation_norm) {
            result.max_translation_norm = t;
            result.argmax_node = model.node_ids[i];
        }
    }
    if (result.argmax_node == -1 && nn > 0) result.argmax_node = model.node_ids[0];
    return result;
}

StiffnessSolver::StiffnessSolver(const BarStructure& structure, StiffnessOptions options)
    : structure_(structure), options_(options) {}

FrameModel StiffnessSolver::assemble(const PartialStructure& partial) const {
    std::vector<int> elems = structure_.analysis_elements(partial);
    if (elems.empty()) throw SingularSystemError("assemble called on empty partial");

    // Condense to touched nodes.
    std::vector<int> node_map(structure_.nodes.size(), -1);
    FrameProblem problem;
    problem.gravity = options_.gravity;
    auto map_node = [&](int nid) {
        if (node_map[nid] < 0) {
            node_map[nid] = static_cast<int>(problem.nodes.size());
            FrameNode fn;
            fn.position = structure_.nodes[nid].position;
            if (structure_.nodes[nid].grounded) fn.fixed.fill(true);
            problem.nodes.push_back(fn);
        }
        return node_map[nid];
    };

    for (int id : elems) {
        const BarElement& e = structure_.elements[id];
        const Material& m = structure_.material_of(id);
        FrameElement fe;
        fe.node_a = map_node(e.end_a);
        fe.node_b = map_node(e.end_b);
        fe.youngs_modulus = m.youngs_modulus;
        fe.shear_modulus = m.shear_modulus;
        fe.density = m.density;
        if (e.kind == ElementKind::Connector) {
            if (options_.connector_section)
                fe.section = *options_.connector_section;
            else if (m.section)
                fe.section = *m.section;
            else
                fe.section = structure_.section_of(e.parents[0]);
        } else {
            fe.section = structure_.section_of(id);
        }
        problem.elements.push_back(fe);
    }

    FrameModel model = build_frame_model(problem);
    // Replace condensed indices with structure node ids.
    for (int nid = 0; nid < static_cast<int>(node_map.size()); ++nid)
        if (node_map[nid] >= 0) model.node_ids[node_map[nid]] = nid;
    return model;
}

DeformationResult StiffnessSolver::solve(const PartialStructure& partial) const {
    return solve_frame(assemble(partial), options_.dense_dof_limit);
}

StiffnessCheck StiffnessSolver::check(const PartialStructure& partial, double tolerance) const {
    StiffnessCheck out;
    if (partial.empty()) {
        out.ok = true;
        return out;
    }
    {
        std::lock_guard<std::mutex> lock(mutex_);
        ++checks_;
        auto it = cache_.find(partial);
        if (it != cache_.end()) {
            out.max_translation_norm = it->second.max_translation_norm;
            out.argmax_node = it->second.argmax_node;
            out.solver_failed = it->second.solver_failed;
            out.ok = !out.solver_failed && out.max_translation_norm <= tolerance;
            return out;
        }
    }

    CacheEntry entry{};
    try {
        DeformationResult r = solve(partial);
        entry.max_translation_norm = r.max_translation_norm;
        entry.argmax_node = r.argmax_node;
        entry.solver_failed = false;
    } catch (const SingularSystemError&) {
        entry.max_translation_norm = std::numeric_limits<double>::infinity();
        entry.argmax_node = -1;
        entry.solver_failed = true;
    }

    {
        std::lock_guard<std::mutex> lock(mutex_);
        ++solves_;
        cache_.emplace(partial, entry);
    }
    out.max_translation_norm = entry.max_translation_norm;
    out.argmax_node = entry.argmax_node;
    out.solver_failed = entry.solver_failed;
    out.ok = !entry.solver_failed && entry.max_translation_norm <= tolerance;
    return out;
}

std::int64_t StiffnessSolver::solve_count() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return solves_;
}

std::int64_t StiffnessSolver::check_count() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return checks_;
}

void StiffnessSolver::reset_counters() {
    std::lock_guard<std::mutex> lock(mutex_);
    solves_ = 0;
    checks_ = 0;
}

GreedySequenceResult greedy_stiffness_sequence(const StiffnessSolver& solver, double tolerance) {
    const BarStructure& s = solver.structure();
    GreedySequenceResult result;
    result.deepest_partial = s.empty_partial();

    PartialStructure built = s.empty_partial();
    std::vector<int> order;
    std::unordered_set<std::uint64_t> dead;  // partial hashes proven fruitless

    struct Frame {
        std::vector<int> candidates;  // sorted by (deflection, id), best last
    };

    // Candidates: unbuilt bars adjacent to the built set, or grounded.
    auto gather = [&](const PartialStructure& p) {
        std::vector<std::pair<double, int>> scored;
        for (int b : s.bar_ids) {
            if (p.contains(b)) continue;
            bool attachable = s.touches_ground(b);
            if (!attachable)
                for (int nb : s.adjacency[b])
                    if (p.contains(nb)) {
                        attachable = true;
                        break;
                    }
            if (!attachable) continue;
            PartialStructure next = p.with(b);
            if (dead.count(next.hash())) continue;
            StiffnessCheck c = solver.check(next, tolerance);
            if (!c.ok) continue;
            scored.emplace_back(c.max_translation_norm, b);
        }
        // Best candidate = lowest deflection, id tie-break; DFS pops from the back.
        std::sort(scored.begin(), scored.end(), [](const auto& x, const auto& y) {
            if (x.first != y.first) return x.first > y.first;
            return x.second > y.second;
        });
        Frame f;
        f.candidates.reserve(scored.size());
        for (const auto& [d, id] : scored) f.candidates.push_back(id);
        return f;
    };

    std::vector<Frame> stack;
    stack.push_back(gather(built));
    while (!stack.empty()) {
        if (built.count() == s.num_bars()) {
            result.sequence = order;
            result.success = true;
            return result;
        }
        Frame& top = stack.back();
        if (top.candidates.empty()) {
            dead.insert(built.hash());
            stack.pop_back();
            if (!order.empty()) {
                built.erase(order.back());
                order.pop_back();
            }
            continue;
        }
        int next = top.candidates.back();
        top.candidates.pop_back();
        built.insert(next);
        order.push_back(next);
        if (built.count() > result.deepest_partial.count()) result.deepest_partial = built;
        stack.push_back(gather(built));
    }
    return result;
}

}  // namespace barplan
