#pragma once

#include "latticefilm/control_mesh.hpp"
#include "latticefilm/graph.hpp"
#include "latticefilm/pipeline.hpp"

#include <sstream>
#include <string>
#include <vector>

namespace lftest {

using namespace latticefilm;

inline NodeStar star_from_directions(const std::vector<Vec3>& dirs, double radius = 1.0,
                                     double length = 10.0) {
    NodeStar star;
    star.node = {0, Vec3::Zero()};
    for (std::size_t k = 0; k < dirs.size(); ++k)
        star.incident.push_back({static_cast<std::int64_t>(k), dirs[k].normalized(), length,
                                 radius});
    return star;
}

inline NodeStar octahedron_star(double radius = 1.0, double length = 10.0) {
    return star_from_directions(
        {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}}, radius,
        length);
}

inline LatticeGraph graph_from_json(const std::string& text) {
    std::istringstream in(text);
    return load_graph(in);
}

// Deterministic xorshift-style generator for property tests.
struct TestRng {
    std::uint64_t s;
    explicit TestRng(std::uint64_t seed) : s(seed ? seed : 1) {}
    std::uint64_t next() {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        return s;
    }
    double uniform(double lo = 0.0, double hi = 1.0) {
        return lo + (hi - lo) * (static_cast<double>(next() >> 11) * 0x1.0p-53);
    }
    Vec3 unit_vector() {
        while (true) {
            const Vec3 v(uniform(-1, 1), uniform(-1, 1), uniform(-1, 1));
            const double n = v.norm();
            if (n > 0.1 && n < 1.0) return v / n;
        }
    }
};

// Open tube on a cylinder about the z-axis: boundary rings at both ends,
// interior rings between, every vertex on the surface with its exact normal.
inline ControlMesh cylinder_tube(double radius, int rings, int segments, double length,
                                 bool tag_collars) {
    ControlMesh mesh;
    for (int r = 0; r < rings; ++r) {
        const double z = length * r / (rings - 1);
        for (int k = 0; k < segments; ++k) {
            const double u = kTwoPi * k / segments;
            const Vec3 pos(radius * std::cos(u), radius * std::sin(u), z);
            const Vec3 normal(std::cos(u), std::sin(u), 0.0);
            VertexRole role = VertexRole::Interior;
            if (r == 0 || r == rings - 1) role = VertexRole::Boundary;
            else if (tag_collars && (r == 1 || r == rings - 2)) role = VertexRole::Collar1;
            else if (tag_collars && (r == 2 || r == rings - 3)) role = VertexRole::Collar2;
            BoundaryParam bp;
            if (role == VertexRole::Boundary) bp = {r == 0 ? 0 : 1, u};
            mesh.add_vertex(pos, normal, role, bp, role == VertexRole::Interior ? -1 : 0);
        }
        if (r > 0)
            for (int k = 0; k < segments; ++k) {
                const int k1 = (k + 1) % segments;
                const int a = (r - 1) * segments + k, b = (r - 1) * segments + k1;
                const int c = r * segments + k1, d = r * segments + k;
                mesh.triangles.push_back({a, b, c});
                mesh.triangles.push_back({a, c, d});
            }
    }
    return mesh;
}

inline double max_cylinder_distance(const ControlMesh& mesh, double radius) {
    double worst = 0.0;
    for (const Vec3& p : mesh.positions)
        worst = std::max(worst, std::abs(std::hypot(p.x(), p.y()) - radius));
    return worst;
}

// Uniformly spread directions (spherical Fibonacci); min pairwise angle is
// comfortable for cutting at moderate counts.
inline std::vector<Vec3> fibonacci_directions(int n) {
    std::vector<Vec3> dirs;
    const double ga = kPi * (3.0 - std::sqrt(5.0));
    for (int k = 0; k < n; ++k) {
        const double z = 1.0 - 2.0 * (k + 0.5) / n;
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        dirs.emplace_back(r * std::cos(ga * k), r * std::sin(ga * k), z);
    }
    return dirs;
}

}  // namespace lftest
