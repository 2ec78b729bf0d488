#pragma once

#include "latticefilm/control_mesh.hpp"
#include "latticefilm/cut.hpp"
#include "latticefilm/graph.hpp"
#include "latticefilm/subdiv.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace latticefilm {

struct BRepCensus {
    int cylindrical_faces = 0;
    int subdivision_faces = 0;
    int planar_caps = 0;
    int boundary_curves = 0;
};

// Provenance of one exported triangle.
struct TriOwner {
    enum class Kind : std::uint8_t { Strut, NodePatch, Cap };
    Kind kind = Kind::Strut;
    std::int64_t id = 0;  // edge id, node id, or capped node id

    bool operator==(const TriOwner&) const = default;
};

// Assembled watertight lattice boundary mesh.
struct LatticeMesh {
    std::vector<Vec3> positions;
    std::vector<Tri> triangles;
    std::vector<TriOwner> owners;  // aligned with triangles
    BRepCensus census;
};

// Everything the assembler needs from one processed node.
struct NodePatch {
    std::int64_t node_id = 0;
    std::vector<StrutCut> cuts;  // in node_star order
    SubdividedPatch patch;       // boundary params in strut-index circle ids
    bool has_patch = false;      // false for valence-1 nodes (capped)
};

struct AssembleSettings {
    int longitudinal_segments = 1;
    int iterations = 3;  // sets the ring resolution of cap-only struts
};

// Triangulated cylinder sleeve between two end circles. The end rings sample
// the circles at exactly the given parameters; rings of different size are
// joined by an angular merge band.
// Returns triangles over a fresh vertex buffer (positions + ring metadata).
struct StrutSleeve {
    std::vector<Vec3> positions;
    std::vector<Tri> triangles;
    std::vector<int> ring_a;  // vertex ids of the circle_a ring, ascending parameter
    std::vector<int> ring_b;  // vertex ids of the circle_b ring, ascending parameter
};
StrutSleeve tessellate_strut(const Circle3& circle_a, const std::vector<double>& params_a,
                             const Circle3& circle_b, const std::vector<double>& params_b,
                             int longitudinal_segments);

// Flat triangle fan closing a valence-1 strut at its cut plane.
// `ring` are unified vertex ids ordered by ascending circle parameter.
std::vector<Tri> cap_valence_one(int center_vertex, const std::vector<int>& ring);

// Stitches patches, sleeves and caps into one watertight mesh with exact
// seam sharing, verifies manifoldness/orientation/Euler characteristic and
// records the B-rep census. Throws InternalError on any seam defect.
LatticeMesh assemble(const LatticeGraph& graph, const std::vector<NodePatch>& patches,
                     const AssembleSettings& settings);

enum class MeshFormat { obj, stl_binary, ply };

// Deterministic export; OBJ/PLY carry provenance groups and the census as
// comments, STL is the usual 80-byte-header binary layout.
void export_mesh(const LatticeMesh& mesh, MeshFormat format, std::ostream& out);

}  // namespace latticefilm
