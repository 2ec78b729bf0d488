#pragma once

#include "latticefilm/geometry.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace latticefilm {

enum class VertexRole : std::uint8_t { Boundary, Collar1, Collar2, Interior };

// (circle id, parameter) of a vertex pinned to a boundary circle.
struct BoundaryParam {
    int circle = -1;
    double u = 0.0;
    bool valid() const { return circle >= 0; }
};

struct Tri {
    int a = 0, b = 0, c = 0;
    int operator[](int k) const { return k == 0 ? a : (k == 1 ? b : c); }
};

// Indexed triangle mesh with the per-vertex attributes the pipeline tracks.
struct ControlMesh {
    std::vector<Vec3> positions;
    std::vector<Vec3> normals;
    std::vector<VertexRole> roles;
    std::vector<BoundaryParam> params;
    std::vector<int> strut_of;  // circle/strut id for boundary+collar vertices, -1 otherwise
    std::vector<Tri> triangles;

    int add_vertex(const Vec3& p, const Vec3& n, VertexRole role,
                   BoundaryParam bp = {}, int strut = -1) {
        positions.push_back(p);
        normals.push_back(n);
        roles.push_back(role);
        params.push_back(bp);
        strut_of.push_back(strut);
        return static_cast<int>(positions.size()) - 1;
    }

    std::size_t vertex_count() const { return positions.size(); }
};

struct MeshChecks {
    bool edge_manifold = false;    // every edge borders 1 or 2 triangles
    bool closed = false;           // no boundary edges
    bool oriented = false;         // interior edges traversed once per direction
    int boundary_edge_count = 0;
    int euler_characteristic = 0;
};

MeshChecks check_mesh(const std::vector<Tri>& triangles, std::size_t vertex_count);

// Area-weighted vertex normals from incident triangle normals.
std::vector<Vec3> area_weighted_normals(const ControlMesh& mesh);

// Refreshes normals of every vertex whose role is not Boundary.
void recompute_interior_normals(ControlMesh& mesh);

// Boundary loops as ordered vertex id cycles.
std::vector<std::vector<int>> boundary_loops(const std::vector<Tri>& triangles,
                                             std::size_t vertex_count);

double bounding_box_diagonal(const std::vector<Vec3>& positions);

}  // namespace latticefilm
