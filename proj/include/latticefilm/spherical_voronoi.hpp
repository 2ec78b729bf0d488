#pragma once

#include "latticefilm/geometry.hpp"

#include <vector>

namespace latticefilm {

// Voronoi diagram of unit directions on the sphere under angular distance.
struct SphericalVoronoi {
    struct EdgeRec {
        int a = -1, b = -1;            // vertex ids
        int site_i = -1, site_j = -1;  // the two cells this edge separates
    };

    std::vector<Vec3> sites;                  // unit
    std::vector<Vec3> vertices;               // unit
    std::vector<EdgeRec> edges;
    std::vector<std::vector<int>> cells;      // per site: vertex loop, CCW about the site
    std::vector<std::vector<int>> cell_edges; // aligned: edge id for loop[k] -> loop[k+1]
};

// Builds the diagram via the convex hull of the sites (Delaunay duality on
// the sphere). Degenerate inputs are handled specially:
//   - 2 sites: the bisector great circle, discretized;
//   - all sites on one circle (great or small): lune cells between the two
//     poles of the circle axis.
// Output is deterministic for a fixed input order; near-coplanar hull faces
// are split by insertion order and coincident dual vertices merged.
SphericalVoronoi spherical_voronoi(const std::vector<Vec3>& directions);

// Angular midpoint of a Voronoi edge arc, on the side of its two sites.
// Well-defined even for lune edges whose endpoints are antipodal.
Vec3 voronoi_edge_midpoint(const SphericalVoronoi& vd, int edge_id);

}  // namespace latticefilm
