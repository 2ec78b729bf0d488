#include "latticefilm/film.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace latticefilm {

namespace {

double wrap_distance(double u0, double u1) {
    const double d = std::abs(wrap_angle(u0) - wrap_angle(u1));
    return std::min(d, kTwoPi - d);
}

// Lowest incident cell per interior vertex; the cylinder used for the
// line-cylinder repositioning.
std::vector<int> anchor_cells(const Film& film) {
    std::vector<int> anchor(film.mesh.vertex_count(), -1);
    for (std::size_t s = 0; s < film.loops.size(); ++s)
        for (int v : film.loops[s])
            if (anchor[v] < 0) anchor[v] = static_cast<int>(s);
    return anchor;
}

}  // namespace

Film build_film(const std::vector<StrutCut>& cuts, const Node& node) {
    if (cuts.size() < 2)
        throw ValidationError("film geometry requires valence >= 2 (node " +
                              std::to_string(node.id) + ")");

    Film film;
    film.node_center = node.position;
    film.strut_radius = cuts.front().end_circle.radius;
    for (const StrutCut& c : cuts) {
        film.circles.push_back(c.end_circle);
        film.strut_dirs.push_back(c.end_circle.axis);
    }

    // Zero cuts leave coincident end circles (a straight through-node); the
    // film needs disjoint boundaries.
    if (cuts.size() == 2 &&
        circle_min_distance(film.circles[0], film.circles[1]) <= 1e-9 * film.strut_radius)
        throw ValidationError("end circles of node " + std::to_string(node.id) +
                              " are not disjoint (collinear struts)");

    const SphericalVoronoi vd = spherical_voronoi(film.strut_dirs);
    const int n_cells = static_cast<int>(vd.cells.size());

    // Initial sphere radius: encloses all end circles. Interior vertices get
    // re-positioned by adjust_vertices; only their directions matter.
    double sphere_r = 0.0;
    for (const StrutCut& c : cuts)
        sphere_r = std::max(sphere_r, std::hypot(c.cut_length, c.end_circle.radius));

    std::vector<int> vert_of(vd.vertices.size());
    for (std::size_t v = 0; v < vd.vertices.size(); ++v)
        vert_of[v] = film.mesh.add_vertex(node.position + sphere_r * vd.vertices[v],
                                          vd.vertices[v], VertexRole::Interior);

    // Arc densification: every Voronoi edge is refined with angular midpoints
    // until no segment spans more than pi/2 of arc or of ring parameter on
    // either adjacent circle. The parameter bound is what keeps the
    // straightened strips from folding across their cylinders; lune cells
    // (antipodal endpoints) seed the split with the midpoint on their sites'
    // side.
    constexpr double kMaxArc = kPi / 2 + 1e-9;
    auto ring_gap = [&](int cell, const Vec3& da, const Vec3& db) {
        const Circle3& c = film.circles[cell];
        const double ua = std::atan2(da.dot(c.e2), da.dot(c.e1));
        const double ub = std::atan2(db.dot(c.e2), db.dot(c.e1));
        const double d = std::abs(wrap_angle(ua) - wrap_angle(ub));
        return std::min(d, kTwoPi - d);
    };
    std::vector<std::vector<Vec3>> chains(vd.edges.size());
    for (std::size_t e = 0; e < vd.edges.size(); ++e) {
        const auto& rec = vd.edges[e];
        std::vector<Vec3>& chain = chains[e];
        chain = {vd.vertices[rec.a], vd.vertices[rec.b]};
        if ((chain[0] + chain[1]).norm() < 1e-8)
            chain.insert(chain.begin() + 1, voronoi_edge_midpoint(vd, static_cast<int>(e)));
        for (std::size_t k = 0; k + 1 < chain.size();) {
            const bool wide = angle_between(chain[k], chain[k + 1]) > kMaxArc ||
                              ring_gap(rec.site_i, chain[k], chain[k + 1]) > kMaxArc ||
                              ring_gap(rec.site_j, chain[k], chain[k + 1]) > kMaxArc;
            if (wide) {
                chain.insert(chain.begin() + k + 1, (chain[k] + chain[k + 1]).normalized());
                if (chain.size() > 1024)
                    throw InternalError("voronoi edge refinement does not converge");
            } else {
                ++k;
            }
        }
    }

    // Interior chain vertices become mesh vertices; records per segment feed
    // the point-insertion pass.
    std::vector<std::vector<int>> chain_ids(vd.edges.size());
    for (std::size_t e = 0; e < vd.edges.size(); ++e) {
        const auto& rec = vd.edges[e];
        auto& ids = chain_ids[e];
        ids.push_back(vert_of[rec.a]);
        for (std::size_t k = 1; k + 1 < chains[e].size(); ++k)
            ids.push_back(film.mesh.add_vertex(node.position + sphere_r * chains[e][k],
                                               chains[e][k], VertexRole::Interior));
        ids.push_back(vert_of[rec.b]);
        for (std::size_t k = 0; k + 1 < ids.size(); ++k)
            film.voronoi_edges.push_back({ids[k], ids[k + 1], rec.site_i, rec.site_j});
    }

    film.rings.resize(n_cells);
    film.tops.resize(n_cells);
    film.loops.resize(n_cells);

    for (int s = 0; s < n_cells; ++s) {
        const auto& loop = vd.cells[s];
        const auto& eloop = vd.cell_edges[s];
        std::vector<int>& tops = film.tops[s];
        for (std::size_t k = 0; k < loop.size(); ++k) {
            tops.push_back(vert_of[loop[k]]);
            const auto& ids = chain_ids[eloop[k]];
            // weave the chain in this cell's traversal direction
            if (ids.front() == vert_of[loop[k]]) {
                for (std::size_t i = 1; i + 1 < ids.size(); ++i) tops.push_back(ids[i]);
            } else {
                for (std::size_t i = ids.size() - 1; i >= 2; --i) tops.push_back(ids[i - 1]);
            }
        }
        if (tops.size() < 3)
            throw InternalError("film cell with fewer than 3 loop vertices");
        film.loops[s] = tops;

        const Circle3& circle = film.circles[s];
        std::vector<int>& ring = film.rings[s];
        std::vector<double> us;
        for (int w : tops) {
            const Vec3 d = film.mesh.positions[w] - circle.center;
            const Vec3 in_plane = d - d.dot(circle.axis) * circle.axis;
            if (in_plane.norm() < 1e-12)
                throw ValidationError("film cell " + std::to_string(s) +
                                      ": loop vertex projects onto the circle center");
            const double u = circle.param_of(film.mesh.positions[w]);
            us.push_back(u);
            ring.push_back(film.mesh.add_vertex(circle.at(u), circle.cylinder_normal(u),
                                                VertexRole::Boundary, {s, u}, s));
        }
        const std::size_t m = tops.size();
        for (std::size_t k = 0; k < m; ++k)
            if (wrap_distance(us[k], us[(k + 1) % m]) < 1e-9)
                throw ValidationError("film cell " + std::to_string(s) +
                                      ": adjacent projected points coincide on the circle");

        for (std::size_t k = 0; k < m; ++k) {
            const int wk = tops[k], wk1 = tops[(k + 1) % m];
            const int pk = ring[k], pk1 = ring[(k + 1) % m];
            film.mesh.triangles.push_back({wk, wk1, pk1});
            film.mesh.triangles.push_back({wk, pk1, pk});
        }
    }

    recompute_interior_normals(film.mesh);
    return film;
}

void adjust_vertices(Film& film, const NodeStar& star) {
    const std::vector<int> anchor = anchor_cells(film);
    for (std::size_t v = 0; v < film.mesh.vertex_count(); ++v) {
        if (film.mesh.roles[v] != VertexRole::Interior) continue;
        if (anchor[v] < 0) throw InternalError("interior film vertex without a cell");
        const Vec3 dir = film.mesh.positions[v] - film.node_center;
        film.mesh.positions[v] =
            ray_from_axis_to_cylinder(film.node_center, dir,
                                      star.incident[anchor[v]].direction, film.strut_radius);
    }
    recompute_interior_normals(film.mesh);
}

void insert_curve_points(Film& film, const NodeStar& star) {
    const std::vector<FilmEdge> records = film.voronoi_edges;
    const Vec3 o = film.node_center;
    const double r = film.strut_radius;

    for (const FilmEdge& rec : records) {
        const Vec3 di = star.incident[rec.cell_i].direction;
        const Vec3 dj = star.incident[rec.cell_j].direction;
        Vec3 n2 = di + dj;
        if (n2.norm() < 1e-9) continue;  // antiparallel struts: no bisector direction
        n2.normalize();

        const Vec3 a1 = (film.mesh.positions[rec.va] - o).normalized();
        const Vec3 a2 = (film.mesh.positions[rec.vb] - o).normalized();
        const double theta = angle_between(a1, a2);
        const double theta1 = angle_between(a1, n2);
        const double theta2 = angle_between(a2, n2);
        if (!(theta1 < theta && theta2 < theta)) continue;  // monotonic

        const Vec3 pN2 = ray_from_axis_to_cylinder(o, n2, di, r);
        const Vec3 pN1 = ray_from_axis_to_cylinder(o, (a1 + n2).normalized(), di, r);
        const Vec3 pN3 = ray_from_axis_to_cylinder(o, (a2 + n2).normalized(), di, r);
        const int vN1 = film.mesh.add_vertex(pN1, n2, VertexRole::Interior);
        const int vN2 = film.mesh.add_vertex(pN2, n2, VertexRole::Interior);
        const int vN3 = film.mesh.add_vertex(pN3, n2, VertexRole::Interior);

        // Split both incident triangles 1 -> 4 along the refined edge.
        int split = 0;
        const std::size_t tri_count = film.mesh.triangles.size();
        for (std::size_t t = 0; t < tri_count; ++t) {
            Tri tri = film.mesh.triangles[t];
            int corner = -1;
            bool forward = false;
            for (int k = 0; k < 3; ++k) {
                if (tri[k] == rec.va && tri[(k + 1) % 3] == rec.vb) {
                    corner = k;
                    forward = true;
                } else if (tri[k] == rec.vb && tri[(k + 1) % 3] == rec.va) {
                    corner = k;
                    forward = false;
                }
            }
            if (corner < 0) continue;
            const int apex = tri[(corner + 2) % 3];
            const int from = forward ? rec.va : rec.vb;
            const int to = forward ? rec.vb : rec.va;
            const int q1 = forward ? vN1 : vN3;
            const int q3 = forward ? vN3 : vN1;
            film.mesh.triangles[t] = {from, q1, apex};
            film.mesh.triangles.push_back({q1, vN2, apex});
            film.mesh.triangles.push_back({vN2, q3, apex});
            film.mesh.triangles.push_back({q3, to, apex});
            ++split;
        }
        if (split != 2)
            throw InternalError("voronoi edge with " + std::to_string(split) +
                                " incident triangles during point insertion");

        for (int cell : {rec.cell_i, rec.cell_j}) {
            auto& loop = film.loops[cell];
            bool placed = false;
            for (std::size_t k = 0; k < loop.size() && !placed; ++k) {
                const int cur = loop[k];
                const int nxt = loop[(k + 1) % loop.size()];
                if (cur == rec.va && nxt == rec.vb) {
                    loop.insert(loop.begin() + k + 1, {vN1, vN2, vN3});
                    placed = true;
                } else if (cur == rec.vb && nxt == rec.va) {
                    loop.insert(loop.begin() + k + 1, {vN3, vN2, vN1});
                    placed = true;
                }
            }
            if (!placed)
                throw InternalError("voronoi edge missing from its cell loop");
        }
    }
    recompute_interior_normals(film.mesh);
}

}  // namespace latticefilm
