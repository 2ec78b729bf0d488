#pragma once

#include "latticefilm/control_mesh.hpp"
#include "latticefilm/film.hpp"

#include <Eigen/Sparse>

#include <vector>

namespace latticefilm {

enum class LaplacianOrder { first, second };

// Constrained fairing system over a mesh: cotangent Laplacian plus the fixed
// vertex set (boundary and its two collar rings).
struct FairingSystem {
    Eigen::SparseMatrix<double> laplacian;  // full |V| x |V|, symmetric, zero row sums
    std::vector<int> fixed;                 // sorted vertex ids
    std::vector<char> is_fixed;             // |V| flags
    LaplacianOrder order = LaplacianOrder::second;
};

// Inserts `layers` concentric vertex rings between each boundary ring and its
// cell's inner loop, projected onto the strut cylinders, and re-triangulates
// the strips. Ring 1 is tagged Collar1, ring 2 Collar2.
ControlMesh upsample(const Film& film, int layers = 3);

// Cotangent-weight Laplacian (clamped; uniform fallback on degenerate
// triangles). Fixed set: boundary vertices plus their combinatorial 1- and
// 2-ring neighborhoods.
FairingSystem build_laplacian(const ControlMesh& mesh, LaplacianOrder order);

// Solves the constrained (bi-)Laplacian system; free vertices move, fixed
// vertices stay bit-identical. Throws InternalError if the solve fails or
// the residual exceeds 1e-8 times the bounding-box diagonal.
ControlMesh fair(const ControlMesh& mesh, const FairingSystem& system);

// Discrete fairing energy sum over free vertices of |(L V)_v|^2.
double fairing_energy(const ControlMesh& mesh, const FairingSystem& system);

}  // namespace latticefilm
