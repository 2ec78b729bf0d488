#include "latticefilm/fair.hpp"

#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>

namespace latticefilm {

ControlMesh upsample(const Film& film, int layers) {
    if (layers < 0) throw ValidationError("layers must be >= 0");

    ControlMesh out;
    out.positions = film.mesh.positions;
    out.normals = film.mesh.normals;
    out.roles = film.mesh.roles;
    out.params = film.mesh.params;
    out.strut_of = film.mesh.strut_of;

    const Vec3 o = film.node_center;
    const double r = film.strut_radius;

    for (std::size_t s = 0; s < film.rings.size(); ++s) {
        const auto& ring = film.rings[s];
        const auto& tops = film.tops[s];
        const auto& loop = film.loops[s];
        const std::size_t m = ring.size();
        const Vec3 axis = film.strut_dirs[s];

        // rows of rings: row 0 = boundary ring, rows 1..layers = new rings,
        // then the cell's inner loop closes the strip.
        std::vector<std::vector<int>> rows(layers + 1);
        rows[0] = ring;
        for (int l = 1; l <= layers; ++l) {
            const double t = static_cast<double>(l) / (layers + 1);
            rows[l].reserve(m);
            for (std::size_t k = 0; k < m; ++k) {
                const Vec3 q = (1.0 - t) * out.positions[ring[k]] +
                               t * out.positions[tops[k]];
                const double axial = (q - o).dot(axis);
                const Vec3 radial = (q - o) - axial * axis;
                Vec3 pos = o + axial * axis + r * radial.normalized();
                const VertexRole role = l == 1   ? VertexRole::Collar1
                                        : l == 2 ? VertexRole::Collar2
                                                 : VertexRole::Interior;
                if (role == VertexRole::Interior) {
                    // Free rows keep their linear position when the cylinder
                    // projection would cross into a neighboring cell
                    // (wrap-around patches); fairing redistributes them.
                    const Vec3 dir = (pos - o).normalized();
                    std::size_t nearest = 0;
                    double best = -2.0;
                    for (std::size_t c = 0; c < film.strut_dirs.size(); ++c)
                        if (film.strut_dirs[c].dot(dir) > best) {
                            best = film.strut_dirs[c].dot(dir);
                            nearest = c;
                        }
                    if (nearest != s) pos = q;
                }
                rows[l].push_back(out.add_vertex(pos, radial.normalized(), role, {},
                                                 static_cast<int>(s)));
            }
        }

        // Quad rows between consecutive rings (inner ring plays the w part).
        for (int l = 0; l < layers; ++l) {
            const auto& outer = rows[l];
            const auto& inner = rows[l + 1];
            for (std::size_t k = 0; k < m; ++k) {
                const std::size_t k1 = (k + 1) % m;
                out.triangles.push_back({inner[k], inner[k1], outer[k1]});
                out.triangles.push_back({inner[k], outer[k1], outer[k]});
            }
        }

        // Stitch row against the inner loop, fanning over any curve points
        // inserted between consecutive tops.
        const auto& last = rows[layers];
        for (std::size_t k = 0; k < m; ++k) {
            const std::size_t k1 = (k + 1) % m;
            const int wk = tops[k], wk1 = tops[k1];
            std::size_t at = 0;
            while (at < loop.size() && loop[at] != wk) ++at;
            if (at == loop.size()) throw InternalError("strip top missing from cell loop");
            std::vector<int> chain{wk};
            for (std::size_t i = (at + 1) % loop.size(); chain.back() != wk1;
                 i = (i + 1) % loop.size()) {
                chain.push_back(loop[i]);
                if (chain.size() > loop.size())
                    throw InternalError("cell loop does not connect consecutive tops");
            }
            // Fan from the ring vertex: polyline edges stay shared with the
            // neighboring strip, every chord is private to this one.
            out.triangles.push_back({last[k1], last[k], wk});
            for (std::size_t i = 0; i + 1 < chain.size(); ++i)
                out.triangles.push_back({last[k1], chain[i], chain[i + 1]});
        }
    }

    recompute_interior_normals(out);
    return out;
}

FairingSystem build_laplacian(const ControlMesh& mesh, LaplacianOrder order) {
    const int nv = static_cast<int>(mesh.vertex_count());
    std::map<std::pair<int, int>, double> weights;
    std::map<std::pair<int, int>, int> edge_tris;
    for (const Tri& t : mesh.triangles) {
        const int v[3] = {t.a, t.b, t.c};
        for (int k = 0; k < 3; ++k) {
            const int a = v[k], b = v[(k + 1) % 3], c = v[(k + 2) % 3];
            const Vec3 ea = mesh.positions[a] - mesh.positions[c];
            const Vec3 eb = mesh.positions[b] - mesh.positions[c];
            const double cross = ea.cross(eb).norm();
            // Uniform fallback on degenerate triangles keeps the matrix finite
            // and symmetric.
            double cot = cross < 1e-14 ? 1.0 : ea.dot(eb) / cross;
            cot = std::clamp(cot, -1e4, 1e4);
            weights[{std::min(a, b), std::max(a, b)}] += 0.5 * cot;
            ++edge_tris[{std::min(a, b), std::max(a, b)}];
        }
    }
    for (const auto& [e, c] : edge_tris)
        if (c > 2) throw ValidationError("build_laplacian: non-manifold edge");

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(weights.size() * 4);
    for (const auto& [e, w] : weights) {
        trip.emplace_back(e.first, e.second, -w);
        trip.emplace_back(e.second, e.first, -w);
        trip.emplace_back(e.first, e.first, w);
        trip.emplace_back(e.second, e.second, w);
    }

    FairingSystem sys;
    sys.order = order;
    sys.laplacian.resize(nv, nv);
    sys.laplacian.setFromTriplets(trip.begin(), trip.end());

    // Fixed set: boundary plus combinatorial 1- and 2-rings; with the standard
    // upsampling these are exactly the Collar1/Collar2 rings.
    std::vector<std::set<int>> nbr(nv);
    for (const auto& [e, w] : weights) {
        nbr[e.first].insert(e.second);
        nbr[e.second].insert(e.first);
    }
    sys.is_fixed.assign(nv, 0);
    for (int v = 0; v < nv; ++v)
        if (mesh.roles[v] == VertexRole::Boundary) sys.is_fixed[v] = 1;
    for (int pass = 0; pass < 2; ++pass) {
        std::vector<int> add;
        for (int v = 0; v < nv; ++v)
            if (sys.is_fixed[v])
                for (int w : nbr[v])
                    if (!sys.is_fixed[w]) add.push_back(w);
        for (int w : add) sys.is_fixed[w] = 1;
    }
    for (int v = 0; v < nv; ++v)
        if (sys.is_fixed[v]) sys.fixed.push_back(v);
    return sys;
}

namespace {

Eigen::SparseMatrix<double> system_matrix(const FairingSystem& sys) {
    if (sys.order == LaplacianOrder::second)
        return (sys.laplacian * sys.laplacian).pruned();
    return sys.laplacian;
}

}  // namespace

ControlMesh fair(const ControlMesh& mesh, const FairingSystem& system) {
    const int nv = static_cast<int>(mesh.vertex_count());
    if (static_cast<int>(system.is_fixed.size()) != nv)
        throw InternalError("fairing system does not match the mesh");
    if (system.fixed.empty())
        throw InternalError("fairing system without fixed vertices is singular");

    std::vector<int> free_ids;
    std::vector<int> index_of(nv, -1);
    for (int v = 0; v < nv; ++v)
        if (!system.is_fixed[v]) {
            index_of[v] = static_cast<int>(free_ids.size());
            free_ids.push_back(v);
        }

    ControlMesh out = mesh;
    if (free_ids.empty()) return out;

    const Eigen::SparseMatrix<double> A = system_matrix(system);
    const int nf = static_cast<int>(free_ids.size());

    std::vector<Eigen::Triplet<double>> trip_ff;
    Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(nf, 3);
    for (int col = 0; col < A.outerSize(); ++col) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(A, col); it; ++it) {
            const int r = static_cast<int>(it.row());
            const int c = static_cast<int>(it.col());
            if (index_of[r] < 0) continue;
            if (index_of[c] >= 0)
                trip_ff.emplace_back(index_of[r], index_of[c], it.value());
            else
                rhs.row(index_of[r]) -= it.value() * mesh.positions[c].transpose();
        }
    }
    Eigen::SparseMatrix<double> Aff(nf, nf);
    Aff.setFromTriplets(trip_ff.begin(), trip_ff.end());

    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
    solver.compute(Aff);
    if (solver.info() != Eigen::Success)
        throw InternalError("fairing solve: factorization failed");
    const Eigen::MatrixXd x = solver.solve(rhs);
    if (solver.info() != Eigen::Success)
        throw InternalError("fairing solve: back-substitution failed");

    for (int i = 0; i < nf; ++i) out.positions[free_ids[i]] = x.row(i).transpose();

    // Residual contract over the free rows.
    const double diag = bounding_box_diagonal(out.positions);
    Eigen::MatrixXd V(nv, 3);
    for (int v = 0; v < nv; ++v) V.row(v) = out.positions[v].transpose();
    const Eigen::MatrixXd R = A * V;
    double resid = 0.0;
    for (int i = 0; i < nf; ++i)
        resid = std::max(resid, R.row(free_ids[i]).lpNorm<Eigen::Infinity>());
    if (resid > 1e-8 * std::max(diag, 1e-12))
        throw InternalError("fairing residual " + std::to_string(resid) +
                            " exceeds tolerance");

    recompute_interior_normals(out);
    return out;
}

double fairing_energy(const ControlMesh& mesh, const FairingSystem& system) {
    const int nv = static_cast<int>(mesh.vertex_count());
    Eigen::MatrixXd V(nv, 3);
    for (int v = 0; v < nv; ++v) V.row(v) = mesh.positions[v].transpose();
    const Eigen::MatrixXd LV = system.laplacian * V;
    double e = 0.0;
    for (int v = 0; v < nv; ++v)
        if (!system.is_fixed[v]) e += LV.row(v).squaredNorm();
    return e;
}

}  // namespace latticefilm
