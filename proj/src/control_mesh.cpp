#include "latticefilm/control_mesh.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <set>

namespace latticefilm {

MeshChecks check_mesh(const std::vector<Tri>& triangles, std::size_t vertex_count) {
    MeshChecks out;
    // Sort-based edge census: scales to multi-million-triangle assemblies
    // where per-edge maps would not.
    std::vector<std::uint64_t> directed;
    directed.reserve(triangles.size() * 3);
    auto pack = [](int a, int b) {
        return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(a)) << 32) |
               static_cast<std::uint32_t>(b);
    };
    for (const Tri& t : triangles) {
        directed.push_back(pack(t.a, t.b));
        directed.push_back(pack(t.b, t.c));
        directed.push_back(pack(t.c, t.a));
    }
    std::sort(directed.begin(), directed.end());
    out.oriented = std::adjacent_find(directed.begin(), directed.end()) == directed.end();

    std::vector<std::uint64_t> undirected;
    undirected.reserve(directed.size());
    for (const Tri& t : triangles) {
        undirected.push_back(pack(std::min(t.a, t.b), std::max(t.a, t.b)));
        undirected.push_back(pack(std::min(t.b, t.c), std::max(t.b, t.c)));
        undirected.push_back(pack(std::min(t.c, t.a), std::max(t.c, t.a)));
    }
    std::sort(undirected.begin(), undirected.end());
    out.edge_manifold = true;
    std::size_t unique_edges = 0;
    for (std::size_t i = 0; i < undirected.size();) {
        std::size_t j = i;
        while (j < undirected.size() && undirected[j] == undirected[i]) ++j;
        const std::size_t mult = j - i;
        if (mult > 2) out.edge_manifold = false;
        if (mult == 1) ++out.boundary_edge_count;
        ++unique_edges;
        i = j;
    }
    out.closed = out.boundary_edge_count == 0;

    std::vector<std::uint64_t> used;
    used.reserve(triangles.size() * 3);
    for (const Tri& t : triangles) {
        used.push_back(static_cast<std::uint32_t>(t.a));
        used.push_back(static_cast<std::uint32_t>(t.b));
        used.push_back(static_cast<std::uint32_t>(t.c));
    }
    std::sort(used.begin(), used.end());
    used.erase(std::unique(used.begin(), used.end()), used.end());
    (void)vertex_count;
    out.euler_characteristic = static_cast<int>(used.size()) -
                               static_cast<int>(unique_edges) +
                               static_cast<int>(triangles.size());
    return out;
}

std::vector<Vec3> area_weighted_normals(const ControlMesh& mesh) {
    std::vector<Vec3> normals(mesh.vertex_count(), Vec3::Zero());
    for (const Tri& t : mesh.triangles) {
        const Vec3 n = (mesh.positions[t.b] - mesh.positions[t.a])
                           .cross(mesh.positions[t.c] - mesh.positions[t.a]);
        normals[t.a] += n;
        normals[t.b] += n;
        normals[t.c] += n;
    }
    for (Vec3& n : normals) {
        const double len = n.norm();
        if (len > 1e-300) n /= len;
    }
    return normals;
}

void recompute_interior_normals(ControlMesh& mesh) {
    const std::vector<Vec3> fresh = area_weighted_normals(mesh);
    for (std::size_t v = 0; v < mesh.vertex_count(); ++v)
        if (mesh.roles[v] != VertexRole::Boundary) mesh.normals[v] = fresh[v];
}

std::vector<std::vector<int>> boundary_loops(const std::vector<Tri>& triangles,
                                             std::size_t vertex_count) {
    std::map<std::pair<int, int>, int> undirected;
    for (const Tri& t : triangles) {
        const int v[3] = {t.a, t.b, t.c};
        for (int k = 0; k < 3; ++k)
            ++undirected[{std::min(v[k], v[(k + 1) % 3]), std::max(v[k], v[(k + 1) % 3])}];
    }
    // Boundary edges kept directed as they appear in their single triangle.
    std::map<int, int> next;
    for (const Tri& t : triangles) {
        const int v[3] = {t.a, t.b, t.c};
        for (int k = 0; k < 3; ++k) {
            const int a = v[k], b = v[(k + 1) % 3];
            if (undirected.at({std::min(a, b), std::max(a, b)}) == 1) next[a] = b;
        }
    }
    (void)vertex_count;
    std::vector<std::vector<int>> loops;
    std::set<int> visited;
    for (const auto& [start, unused] : next) {
        if (visited.count(start)) continue;
        std::vector<int> loop;
        int v = start;
        do {
            loop.push_back(v);
            visited.insert(v);
            v = next.at(v);
        } while (v != start);
        loops.push_back(std::move(loop));
    }
    return loops;
}

double bounding_box_diagonal(const std::vector<Vec3>& positions) {
    if (positions.empty()) return 0.0;
    Vec3 lo = positions.front(), hi = positions.front();
    for (const Vec3& p : positions) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    return (hi - lo).norm();
}

}  // namespace latticefilm
