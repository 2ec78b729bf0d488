#pragma once

#include "latticefilm/geometry.hpp"
#include "latticefilm/graph.hpp"

#include <vector>

namespace latticefilm {

// Per-strut cut record at one node.
struct StrutCut {
    std::int64_t edge_id = 0;
    std::int64_t node_id = 0;
    int strut_index = 0;        // position within the star (circle id in patch space)
    double min_length = 0.0;    // largest pairwise minimum over the star
    double cut_length = 0.0;    // (1 + lambda) * min_length
    std::vector<double> pairwise;  // candidate lengths against every other strut
    Circle3 end_circle;
};

// Minimum cutting length for two struts of equal radius meeting at angle
// theta: r / tan(theta/2). Strictly decreasing in theta; zero at theta = pi.
double pairwise_min_cut(double theta, double radius);

// Same quantity straight from the two unit directions; algebraically
// r*(1 + cos)/|cross|, which keeps exact values (e.g. 1.0 at 90 degrees)
// that the theta round-trip through tan() would blur.
double pairwise_min_cut(const Vec3& dir_i, const Vec3& dir_j, double radius);

// Cuts for every strut of a star: min_length by the max rule over pairwise
// candidates, scaled by (1 + lambda), end circle on the strut axis.
// Valence-1 stars cut at zero (capped flat later in assembly).
// Throws InvalidCutError when a cut consumes the whole strut.
std::vector<StrutCut> node_cuts(const NodeStar& star, double lambda);

// True iff every pair of end circles keeps a strictly positive clearance.
bool verify_disjoint(const std::vector<StrutCut>& cuts);

// Minimum distance between two circles in 3-space (sampled + locally
// refined; exact point-to-circle distance per sample).
double circle_min_distance(const Circle3& a, const Circle3& b);

}  // namespace latticefilm
