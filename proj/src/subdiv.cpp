#include "latticefilm/subdiv.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>

namespace latticefilm {

namespace {

constexpr double kDenomGuard = 1e-6;

// Displacement contribution of one stencil member (v, n) toward the new
// normal n_new about the averaged point t. Opposed normals contribute zero.
double h_term(const Vec3& v, const Vec3& n, const Vec3& t, const Vec3& n_new) {
    const double denom = (n + n_new).dot(n_new);
    if (std::abs(denom) < kDenomGuard) return 0.0;
    return (n + n_new).dot(v - t) / denom;
}

}  // namespace

double loop_beta(int n) {
    if (n < 3) throw ValidationError("loop_beta requires valence >= 3");
    const double c = 3.0 / 8.0 + 0.25 * std::cos(kTwoPi / n);
    return (5.0 / 8.0 - c * c) / n;
}

PNVertex pn_vertex_rule(const PNVertex& center, const std::vector<PNVertex>& ring) {
    const int n = static_cast<int>(ring.size());
    const double beta = loop_beta(n);
    const double wc = 1.0 - n * beta;

    Vec3 t = wc * center.position;
    Vec3 nsum = wc * center.normal;
    for (const PNVertex& v : ring) {
        t += beta * v.position;
        nsum += beta * v.normal;
    }
    const Vec3 n_new = normalized_or_throw(nsum, "vertex-rule normal");

    double h = wc * h_term(center.position, center.normal, t, n_new);
    for (const PNVertex& v : ring) h += beta * h_term(v.position, v.normal, t, n_new);

    return {t + h * n_new, n_new, {}};
}

PNVertex pn_edge_rule(const PNVertex& vi, const PNVertex& vj, const PNVertex& vp,
                      const PNVertex& vq) {
    const Vec3 t = 0.375 * (vi.position + vj.position) + 0.125 * (vp.position + vq.position);
    const Vec3 nsum = 0.375 * (vi.normal + vj.normal) + 0.125 * (vp.normal + vq.normal);
    const Vec3 n_new = normalized_or_throw(nsum, "edge-rule normal");

    const double h = 0.375 * (h_term(vi.position, vi.normal, t, n_new) +
                              h_term(vj.position, vj.normal, t, n_new)) +
                     0.125 * (h_term(vp.position, vp.normal, t, n_new) +
                              h_term(vq.position, vq.normal, t, n_new));
    return {t + h * n_new, n_new, {}};
}

PNVertex boundary_sample(const Circle3& circle, int circle_id, double u_i, double u_j) {
    const double delta = wrap_angle(u_j - u_i);
    // midpoint of the shorter arc, wrapping across the seam when needed
    const double mid =
        delta <= kPi ? wrap_angle(u_i + 0.5 * delta) : wrap_angle(u_i + 0.5 * delta - kPi);
    return {circle.at(mid), circle.cylinder_normal(mid), {circle_id, mid}};
}

SubdividedPatch subdivide(const ControlMesh& faired, const std::vector<Circle3>& circles,
                          int iterations) {
    if (iterations < 0) throw ValidationError("iterations must be >= 0");

    ControlMesh mesh = faired;

    // Normal configuration: boundary and collar-1 vertices get the exact
    // outward cylinder normal of their strut; the rest keep aggregated face
    // normals.
    recompute_interior_normals(mesh);
    for (std::size_t v = 0; v < mesh.vertex_count(); ++v) {
        const VertexRole role = mesh.roles[v];
        if (role == VertexRole::Boundary) {
            const BoundaryParam& bp = mesh.params[v];
            mesh.normals[v] = circles.at(bp.circle).cylinder_normal(bp.u);
        } else if (role == VertexRole::Collar1) {
            const Circle3& c = circles.at(mesh.strut_of[v]);
            const Vec3 d = mesh.positions[v] - c.center;
            mesh.normals[v] =
                normalized_or_throw(d - d.dot(c.axis) * c.axis, "collar normal");
        }
    }

    SubdividedPatch patch;
    patch.provenance.assign(mesh.vertex_count(), 0);

    for (int it = 0; it < iterations; ++it) {
        const std::size_t nv = mesh.vertex_count();

        // Edge map: incident triangle count and opposite vertices.
        struct EdgeInfo {
            int count = 0;
            int opposite[2] = {-1, -1};
        };
        std::map<std::pair<int, int>, EdgeInfo> edges;
        for (const Tri& t : mesh.triangles) {
            const int v[3] = {t.a, t.b, t.c};
            for (int k = 0; k < 3; ++k) {
                const auto key = std::minmax(v[k], v[(k + 1) % 3]);
                EdgeInfo& e = edges[key];
                if (e.count < 2) e.opposite[e.count] = v[(k + 2) % 3];
                ++e.count;
            }
        }

        std::vector<std::set<int>> ring(nv);
        for (const auto& [key, info] : edges) {
            ring[key.first].insert(key.second);
            ring[key.second].insert(key.first);
        }

        auto pn_of = [&](int v) {
            return PNVertex{mesh.positions[v], mesh.normals[v], mesh.params[v]};
        };

        ControlMesh next;
        std::vector<std::uint8_t> prov;

        // Vertex vertices: boundary retained, interior via the PN rule.
        std::vector<int> vert_map(nv);
        for (std::size_t v = 0; v < nv; ++v) {
            if (mesh.roles[v] == VertexRole::Boundary) {
                vert_map[v] = next.add_vertex(mesh.positions[v], mesh.normals[v],
                                              VertexRole::Boundary, mesh.params[v],
                                              mesh.strut_of[v]);
            } else {
                std::vector<PNVertex> rv;
                rv.reserve(ring[v].size());
                for (int w : ring[v]) rv.push_back(pn_of(w));
                const PNVertex nu = pn_vertex_rule(pn_of(static_cast<int>(v)), rv);
                vert_map[v] =
                    next.add_vertex(nu.position, nu.normal, VertexRole::Interior);
            }
            prov.push_back(0);
        }

        // Edge vertices.
        std::map<std::pair<int, int>, int> edge_vert;
        for (const auto& [key, info] : edges) {
            const int a = key.first, b = key.second;
            int id;
            if (info.count == 1) {
                const BoundaryParam& pa = mesh.params[a];
                const BoundaryParam& pb = mesh.params[b];
                if (!pa.valid() || !pb.valid() || pa.circle != pb.circle)
                    throw InternalError("boundary edge without a common circle");
                const PNVertex nu = boundary_sample(circles.at(pa.circle), pa.circle,
                                                    pa.u, pb.u);
                id = next.add_vertex(nu.position, nu.normal, VertexRole::Boundary,
                                     nu.param, pa.circle);
            } else if (info.count == 2) {
                const PNVertex nu =
                    pn_edge_rule(pn_of(a), pn_of(b), pn_of(info.opposite[0]),
                                 pn_of(info.opposite[1]));
                id = next.add_vertex(nu.position, nu.normal, VertexRole::Interior);
            } else {
                throw InternalError("non-manifold edge during subdivision");
            }
            edge_vert[key] = id;
            prov.push_back(1);
        }

        for (const Tri& t : mesh.triangles) {
            const int eab = edge_vert.at(std::minmax(t.a, t.b));
            const int ebc = edge_vert.at(std::minmax(t.b, t.c));
            const int eca = edge_vert.at(std::minmax(t.c, t.a));
            next.triangles.push_back({vert_map[t.a], eab, eca});
            next.triangles.push_back({vert_map[t.b], ebc, eab});
            next.triangles.push_back({vert_map[t.c], eca, ebc});
            next.triangles.push_back({eab, ebc, eca});
        }

        mesh = std::move(next);
        patch.provenance = std::move(prov);
    }

    patch.mesh = std::move(mesh);
    patch.iterations = iterations;
    if (iterations == 0) patch.provenance.assign(patch.mesh.vertex_count(), 0);
    return patch;
}

}  // namespace latticefilm
