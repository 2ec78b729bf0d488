#pragma once

#include "latticefilm/control_mesh.hpp"

#include <iosfwd>
#include <vector>

namespace latticefilm {

struct IndexedMesh {
    std::vector<Vec3> positions;
    std::vector<Tri> triangles;
};

IndexedMesh read_obj(std::istream& in);
IndexedMesh read_stl_binary(std::istream& in);
IndexedMesh read_ply_ascii(std::istream& in);

// Plain OBJ dump of a pipeline-stage mesh (debug output).
void write_obj(const ControlMesh& mesh, std::ostream& out);

}  // namespace latticefilm
