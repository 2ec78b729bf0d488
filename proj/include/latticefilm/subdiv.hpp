#pragma once

#include "latticefilm/control_mesh.hpp"
#include "latticefilm/geometry.hpp"

#include <cstdint>
#include <vector>

namespace latticefilm {

// Point-normal pair refined by the PN-Loop rules.
struct PNVertex {
    Vec3 position{0, 0, 0};
    Vec3 normal{0, 0, 1};
    BoundaryParam param;  // set when the vertex is pinned to a boundary circle
};

struct SubdividedPatch {
    ControlMesh mesh;
    int iterations = 0;
    // 0 = retained/vertex-vertex, 1 = edge-vertex
    std::vector<std::uint8_t> provenance;
};

// Loop vertex weight; n >= 3.
double loop_beta(int n);

// Vertex-vertex rule: weighted point/normal average plus a normal-directed
// displacement. Falls back to zero displacement for stencil members whose
// normals oppose the averaged normal.
PNVertex pn_vertex_rule(const PNVertex& center, const std::vector<PNVertex>& ring);

// Edge-vertex rule for interior edge (vi, vj) with opposite vertices vp, vq.
PNVertex pn_edge_rule(const PNVertex& vi, const PNVertex& vj, const PNVertex& vp,
                      const PNVertex& vq);

// New boundary vertex at the shorter-arc parameter midpoint, with the exact
// outward cylinder normal.
PNVertex boundary_sample(const Circle3& circle, int circle_id, double u_i, double u_j);

// Combined scheme: circle sampling on boundary edges, PN-Loop in the
// interior, boundary vertices retained. Normals are configured up front:
// boundary and collar-1 vertices carry exact cylinder normals of their strut,
// everything else area-weighted face normals.
SubdividedPatch subdivide(const ControlMesh& faired, const std::vector<Circle3>& circles,
                          int iterations = 3);

}  // namespace latticefilm
