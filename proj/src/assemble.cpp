#include "latticefilm/assemble.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <functional>
#include <map>
#include <ostream>
#include <set>
#include <string>
#include <tuple>

namespace latticefilm {

namespace {

// Unwrapped walk angles for a circular merge: angles ascending from list[0].
std::vector<double> unwrap(const std::vector<double>& sorted_angles) {
    std::vector<double> out = sorted_angles;
    out.push_back(sorted_angles.front() + kTwoPi);
    return out;
}

}  // namespace

StrutSleeve tessellate_strut(const Circle3& circle_a, const std::vector<double>& params_a,
                             const Circle3& circle_b, const std::vector<double>& params_b,
                             int longitudinal_segments) {
    if (params_a.size() < 3 || params_b.size() < 3)
        throw InternalError("strut sleeve requires at least 3 ring vertices per end");
    if (longitudinal_segments < 1)
        throw ValidationError("longitudinal segments must be >= 1");
    const double length = (circle_b.center - circle_a.center).norm();
    if (!(length > 0.0)) throw InternalError("strut sleeve with nonpositive length");

    StrutSleeve sleeve;
    const std::size_t ma = params_a.size();
    const std::size_t mb = params_b.size();

    sleeve.ring_a.resize(ma);
    for (std::size_t k = 0; k < ma; ++k) {
        sleeve.ring_a[k] = static_cast<int>(sleeve.positions.size());
        sleeve.positions.push_back(circle_a.at(params_a[k]));
    }
    sleeve.ring_b.resize(mb);
    for (std::size_t k = 0; k < mb; ++k) {
        sleeve.ring_b[k] = static_cast<int>(sleeve.positions.size());
        sleeve.positions.push_back(circle_b.at(params_b[k]));
    }

    // Intermediate rings ride the circle_a parameters, translated along the
    // shared axis, so every vertex stays exactly on the cylinder.
    std::vector<int> prev = sleeve.ring_a;
    const Vec3 step = circle_b.center - circle_a.center;
    for (int l = 1; l < longitudinal_segments; ++l) {
        std::vector<int> ring(ma);
        const double t = static_cast<double>(l) / longitudinal_segments;
        for (std::size_t k = 0; k < ma; ++k) {
            ring[k] = static_cast<int>(sleeve.positions.size());
            sleeve.positions.push_back(circle_a.at(params_a[k]) + t * step);
        }
        for (std::size_t k = 0; k < ma; ++k) {
            const std::size_t k1 = (k + 1) % ma;
            sleeve.triangles.push_back({prev[k], prev[k1], ring[k1]});
            sleeve.triangles.push_back({prev[k], ring[k1], ring[k]});
        }
        prev = std::move(ring);
    }

    // Merge band between the last a-ring and the b-ring. The b-ring walks in
    // its descending-parameter direction, which is the same rotational sense
    // as ascending parameters on circle_a (the axes are opposite).
    std::vector<double> phi_b(mb);
    for (std::size_t j = 0; j < mb; ++j) phi_b[j] = wrap_angle(kTwoPi - params_b[j]);
    std::vector<std::size_t> order(mb);
    for (std::size_t j = 0; j < mb; ++j) order[j] = j;
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return phi_b[x] < phi_b[y]; });

    std::vector<double> phi_sorted(mb);
    for (std::size_t j = 0; j < mb; ++j) phi_sorted[j] = phi_b[order[j]];

    // Rotate the b walk so it starts at the angle nearest the a start.
    const double a0 = params_a.front();
    std::size_t j0 = 0;
    double best = 1e300;
    for (std::size_t j = 0; j < mb; ++j) {
        const double d = std::min(wrap_angle(phi_sorted[j] - a0), wrap_angle(a0 - phi_sorted[j]));
        if (d < best) {
            best = d;
            j0 = j;
        }
    }

    const std::vector<double> ua = unwrap(params_a);
    std::vector<double> ub(mb + 1);
    for (std::size_t j = 0; j <= mb; ++j) {
        const std::size_t jj = (j0 + j) % mb;
        ub[j] = phi_sorted[jj] + (j0 + j >= mb ? kTwoPi : 0.0);
    }
    // Align the b angles onto the a walk's angular origin.
    const double shift = ub[0] - a0;
    const double base = shift > kPi ? -kTwoPi : (shift < -kPi ? kTwoPi : 0.0);
    for (double& u : ub) u += base;

    std::size_t i = 0, j = 0;
    while (i < ma || j < mb) {
        const int a_cur = prev[i % ma];
        const int b_cur = sleeve.ring_b[order[(j0 + j) % mb]];
        const bool advance_a =
            j == mb || (i < ma && ua[i + 1] - ua[0] <= ub[j + 1] - ub[0]);
        if (advance_a) {
            sleeve.triangles.push_back({a_cur, prev[(i + 1) % ma], b_cur});
            ++i;
        } else {
            sleeve.triangles.push_back({a_cur, sleeve.ring_b[order[(j0 + j + 1) % mb]], b_cur});
            ++j;
        }
    }
    return sleeve;
}

std::vector<Tri> cap_valence_one(int center_vertex, const std::vector<int>& ring) {
    std::vector<Tri> tris;
    const std::size_t m = ring.size();
    for (std::size_t k = 0; k < m; ++k)
        tris.push_back({center_vertex, ring[(k + 1) % m], ring[k]});
    return tris;
}

namespace {

struct SeamKey {
    int edge = 0;
    int end = 0;
    std::uint64_t u_bits = 0;
    bool operator<(const SeamKey& o) const {
        return std::tie(edge, end, u_bits) < std::tie(o.edge, o.end, o.u_bits);
    }
};

int expected_euler(const LatticeGraph& graph) {
    // chi = sum over components of 2 - 2*genus; genus = cycle rank.
    std::map<std::int64_t, std::int64_t> parent;
    std::function<std::int64_t(std::int64_t)> find = [&](std::int64_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    std::set<std::int64_t> used;
    for (const Edge& e : graph.edges()) {
        used.insert(e.a);
        used.insert(e.b);
    }
    for (std::int64_t v : used) parent[v] = v;
    for (const Edge& e : graph.edges()) parent[find(e.a)] = find(e.b);
    std::set<std::int64_t> roots;
    for (std::int64_t v : used) roots.insert(find(v));
    const int c = static_cast<int>(roots.size());
    const int nn = static_cast<int>(used.size());
    const int ne = static_cast<int>(graph.edges().size());
    return 2 * c - 2 * (ne - nn + c);
}

}  // namespace

LatticeMesh assemble(const LatticeGraph& graph, const std::vector<NodePatch>& patches,
                     const AssembleSettings& settings) {
    LatticeMesh out;
    if (graph.edges().empty()) {
        out.census = {};
        return out;
    }

    std::map<std::int64_t, const NodePatch*> by_node;
    for (const NodePatch& p : patches) by_node[p.node_id] = &p;

    // strut index of edge `ei` at node `nid` (position in the sorted star).
    auto strut_index = [&](std::int64_t nid, std::size_t ei) {
        const auto& inc = graph.incident_edges(nid);
        const auto it = std::find(inc.begin(), inc.end(), ei);
        if (it == inc.end()) throw InternalError("edge missing from node incidence");
        return static_cast<int>(it - inc.begin());
    };

    std::map<SeamKey, int> seam;
    auto seam_vertex = [&](int edge, int end, double u, const Vec3& pos) {
        const SeamKey key{edge, end, std::bit_cast<std::uint64_t>(u)};
        auto it = seam.find(key);
        if (it != seam.end()) return it->second;
        const int id = static_cast<int>(out.positions.size());
        out.positions.push_back(pos);
        seam.emplace(key, id);
        return id;
    };

    // Patch boundary params per (edge index, end), ascending.
    std::vector<std::array<std::vector<double>, 2>> ring_params(graph.edges().size());

    // 1) Nodal patches, in graph node order.
    for (const Node& node : graph.nodes()) {
        auto itp = by_node.find(node.id);
        if (itp == by_node.end() || !itp->second->has_patch) continue;
        const NodePatch& np = *itp->second;
        const ControlMesh& pm = np.patch.mesh;

        std::vector<int> remap(pm.vertex_count(), -1);
        for (std::size_t v = 0; v < pm.vertex_count(); ++v) {
            if (pm.roles[v] == VertexRole::Boundary) {
                const BoundaryParam& bp = pm.params[v];
                const auto& inc = graph.incident_edges(node.id);
                const std::size_t ei = inc.at(bp.circle);
                const int end = graph.edges()[ei].a == node.id ? 0 : 1;
                remap[v] = seam_vertex(static_cast<int>(ei), end, bp.u, pm.positions[v]);
                ring_params[ei][end].push_back(bp.u);
            } else {
                remap[v] = static_cast<int>(out.positions.size());
                out.positions.push_back(pm.positions[v]);
            }
        }
        for (const Tri& t : pm.triangles) {
            out.triangles.push_back({remap[t.a], remap[t.b], remap[t.c]});
            out.owners.push_back({TriOwner::Kind::NodePatch, node.id});
        }
    }
    for (auto& pr : ring_params)
        for (auto& side : pr) std::sort(side.begin(), side.end());

    // 2) Strut sleeves and caps, in edge order.
    int caps = 0;
    const int default_ring = 4 << std::max(0, settings.iterations);
    for (std::size_t ei = 0; ei < graph.edges().size(); ++ei) {
        const Edge& e = graph.edges()[ei];
        const NodePatch* pa = by_node.count(e.a) ? by_node.at(e.a) : nullptr;
        const NodePatch* pb = by_node.count(e.b) ? by_node.at(e.b) : nullptr;
        if (!pa || !pb) throw InternalError("edge endpoint without cut data");
        const StrutCut& cut_a = pa->cuts.at(strut_index(e.a, ei));
        const StrutCut& cut_b = pb->cuts.at(strut_index(e.b, ei));
        if (cut_a.cut_length + cut_b.cut_length >= graph.edge_length(e))
            throw InvalidCutError("cuts consume edge " + std::to_string(e.id), e.id);

        auto& ua = ring_params[ei][0];
        auto& ub = ring_params[ei][1];
        // Cap ends have no patch ring: sample the generators of the opposite
        // ring (or a default fan resolution when both ends are caps).
        if (ua.empty() && ub.empty()) {
            for (int k = 0; k < default_ring; ++k) ua.push_back(wrap_angle(kTwoPi * k / default_ring));
            std::sort(ua.begin(), ua.end());
        }
        if (ua.empty())
            for (const double u : ub) ua.push_back(wrap_angle(kTwoPi - u));
        if (ub.empty())
            for (const double u : ua) ub.push_back(wrap_angle(kTwoPi - u));
        std::sort(ua.begin(), ua.end());
        std::sort(ub.begin(), ub.end());

        const StrutSleeve sleeve = tessellate_strut(cut_a.end_circle, ua, cut_b.end_circle,
                                                    ub, settings.longitudinal_segments);
        std::vector<int> remap(sleeve.positions.size(), -1);
        for (std::size_t k = 0; k < ua.size(); ++k)
            remap[sleeve.ring_a[k]] =
                seam_vertex(static_cast<int>(ei), 0, ua[k], sleeve.positions[sleeve.ring_a[k]]);
        for (std::size_t k = 0; k < ub.size(); ++k)
            remap[sleeve.ring_b[k]] =
                seam_vertex(static_cast<int>(ei), 1, ub[k], sleeve.positions[sleeve.ring_b[k]]);
        for (std::size_t v = 0; v < sleeve.positions.size(); ++v)
            if (remap[v] < 0) {
                remap[v] = static_cast<int>(out.positions.size());
                out.positions.push_back(sleeve.positions[v]);
            }
        for (const Tri& t : sleeve.triangles) {
            out.triangles.push_back({remap[t.a], remap[t.b], remap[t.c]});
            out.owners.push_back({TriOwner::Kind::Strut, e.id});
        }

        // Caps for valence-1 ends.
        for (int end = 0; end < 2; ++end) {
            const std::int64_t nid = end == 0 ? e.a : e.b;
            const NodePatch* np = end == 0 ? pa : pb;
            if (np->has_patch) continue;
            const auto& params = end == 0 ? ua : ub;
            const Circle3& circle = (end == 0 ? cut_a : cut_b).end_circle;
            std::vector<int> ring;
            for (const double u : params)
                ring.push_back(seam_vertex(static_cast<int>(ei), end, u, circle.at(u)));
            const int center = static_cast<int>(out.positions.size());
            out.positions.push_back(circle.center);
            for (const Tri& t : cap_valence_one(center, ring)) {
                out.triangles.push_back(t);
                out.owners.push_back({TriOwner::Kind::Cap, nid});
            }
            ++caps;
        }
    }

    const MeshChecks checks = check_mesh(out.triangles, out.positions.size());
    if (!checks.edge_manifold) throw InternalError("assembled mesh is not edge-manifold");
    if (!checks.closed) throw InternalError("assembled mesh has open seams (" +
                                            std::to_string(checks.boundary_edge_count) +
                                            " boundary edges)");
    if (!checks.oriented) throw InternalError("assembled mesh is not consistently oriented");
    const int chi_expected = expected_euler(graph);
    if (checks.euler_characteristic != chi_expected)
        throw InternalError("assembled mesh Euler characteristic " +
                            std::to_string(checks.euler_characteristic) + ", expected " +
                            std::to_string(chi_expected));

    const int ne = static_cast<int>(graph.edges().size());
    int patch_count = 0;
    for (const NodePatch& p : patches) patch_count += p.has_patch ? 1 : 0;
    out.census = {ne, patch_count, caps, 2 * ne};
    return out;
}

namespace {

void write_owner_group(std::ostream& os, const TriOwner& o) {
    switch (o.kind) {
        case TriOwner::Kind::Strut: os << "g strut_" << o.id << "\n"; break;
        case TriOwner::Kind::NodePatch: os << "g node_" << o.id << "\n"; break;
        case TriOwner::Kind::Cap: os << "g cap_" << o.id << "\n"; break;
    }
}

void write_census_comment(std::ostream& os, const BRepCensus& c, const char* prefix) {
    os << prefix << " census cylindrical=" << c.cylindrical_faces
       << " subdivision=" << c.subdivision_faces << " caps=" << c.planar_caps
       << " curves=" << c.boundary_curves << "\n";
}

}  // namespace

void export_mesh(const LatticeMesh& mesh, MeshFormat format, std::ostream& out) {
    if (mesh.triangles.empty()) throw ValidationError("nothing to export");

    char buf[96];
    switch (format) {
        case MeshFormat::obj: {
            out << "# latticefilm boundary mesh\n";
            write_census_comment(out, mesh.census, "#");
            for (const Vec3& p : mesh.positions) {
                std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", p.x(), p.y(), p.z());
                out << buf;
            }
            const TriOwner* last = nullptr;
            for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
                if (!last || !(*last == mesh.owners[t])) {
                    write_owner_group(out, mesh.owners[t]);
                    last = &mesh.owners[t];
                }
                const Tri& tri = mesh.triangles[t];
                out << "f " << tri.a + 1 << ' ' << tri.b + 1 << ' ' << tri.c + 1 << "\n";
            }
            break;
        }
        case MeshFormat::stl_binary: {
            char header[80] = {};
            std::snprintf(header, sizeof header, "latticefilm binary STL");
            out.write(header, 80);
            const std::uint32_t n = static_cast<std::uint32_t>(mesh.triangles.size());
            out.write(reinterpret_cast<const char*>(&n), 4);
            for (const Tri& t : mesh.triangles) {
                const Vec3 a = mesh.positions[t.a], b = mesh.positions[t.b],
                           c = mesh.positions[t.c];
                Vec3 fn = (b - a).cross(c - a);
                const double len = fn.norm();
                if (len > 1e-300) fn /= len;
                float rec[12] = {
                    float(fn.x()), float(fn.y()), float(fn.z()),
                    float(a.x()),  float(a.y()),  float(a.z()),
                    float(b.x()),  float(b.y()),  float(b.z()),
                    float(c.x()),  float(c.y()),  float(c.z()),
                };
                out.write(reinterpret_cast<const char*>(rec), 48);
                const std::uint16_t attr = 0;
                out.write(reinterpret_cast<const char*>(&attr), 2);
            }
            break;
        }
        case MeshFormat::ply: {
            out << "ply\nformat ascii 1.0\n";
            write_census_comment(out, mesh.census, "comment");
            out << "element vertex " << mesh.positions.size() << "\n"
                << "property double x\nproperty double y\nproperty double z\n"
                << "element face " << mesh.triangles.size() << "\n"
                << "property list uchar int vertex_indices\n"
                << "property int owner_kind\nproperty int owner_id\n"
                << "end_header\n";
            for (const Vec3& p : mesh.positions) {
                std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g\n", p.x(), p.y(), p.z());
                out << buf;
            }
            for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
                const Tri& tri = mesh.triangles[t];
                out << "3 " << tri.a << ' ' << tri.b << ' ' << tri.c << ' '
                    << static_cast<int>(mesh.owners[t].kind) << ' ' << mesh.owners[t].id
                    << "\n";
            }
            break;
        }
    }
    if (!out) throw ValidationError("mesh export failed: sink write error");
}

}  // namespace latticefilm
