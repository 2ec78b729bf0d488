#pragma once

#include "latticefilm/control_mesh.hpp"
#include "latticefilm/cut.hpp"
#include "latticefilm/spherical_voronoi.hpp"

#include <vector>

namespace latticefilm {

// A Voronoi-edge segment in the film mesh and the two strut cells it
// separates; consumed by the point-insertion pass.
struct FilmEdge {
    int va = -1, vb = -1;
    int cell_i = -1, cell_j = -1;
};

// Nodal film geometry: the initial control mesh spanning a node's end
// circles, plus the per-cell structure that later stages build on.
struct Film {
    ControlMesh mesh;
    std::vector<Circle3> circles;          // per strut index
    std::vector<Vec3> strut_dirs;          // per strut index, unit
    Vec3 node_center{0, 0, 0};
    double strut_radius = 0.0;

    std::vector<std::vector<int>> rings;   // per cell: boundary ring vertex ids
    std::vector<std::vector<int>> tops;    // per cell: interior vertex ring[k] projects from
    std::vector<std::vector<int>> loops;   // per cell: full inner loop (tops + curve points)
    std::vector<FilmEdge> voronoi_edges;
};

// Builds the film from a node's end circles: spherical Voronoi of the strut
// directions, arc straightening, projection of cell loops onto the circles
// and strip triangulation. Lune cells (2-vertex loops) are densified with
// edge midpoints before projection.
Film build_film(const std::vector<StrutCut>& cuts, const Node& node);

// Moves every interior Voronoi vertex onto the incident strut cylinders
// along its ray from the node center.
void adjust_vertices(Film& film, const NodeStar& star);

// Non-monotonic Voronoi edges receive three extra vertices approximating the
// cylinder-cylinder intersection curve; incident triangles are split 1->4.
void insert_curve_points(Film& film, const NodeStar& star);

}  // namespace latticefilm
