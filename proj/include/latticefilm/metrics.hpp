#pragma once

#include "latticefilm/control_mesh.hpp"
#include "latticefilm/graph.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace latticefilm {

// The pre-cut nodal shape: the Boolean union of the full strut cylinders and
// the node sphere of strut radius.
struct OriginalNodeOracle {
    Vec3 center{0, 0, 0};
    double sphere_radius = 0.0;
    struct Cylinder {
        Vec3 axis{0, 0, 1};  // unit, from the node outward
        double radius = 0.0;
        double extent = 0.0;  // full edge length
    };
    std::vector<Cylinder> cylinders;
};

OriginalNodeOracle make_node_oracle(const NodeStar& star);

// |signed distance to the union|: min over the component signed distances,
// magnitude taken at the end.
double oracle_distance(const OriginalNodeOracle& oracle, const Vec3& p);

struct DeviationReport {
    std::size_t samples = 0;
    double max = 0.0;
    double avg = 0.0;
    double std_dev = 0.0;
};

// Area-stratified surface sampling of the mesh against the oracle;
// deterministic for a fixed seed (per-triangle RNG streams, ordered
// pairwise-tree reduction).
DeviationReport deviation(const ControlMesh& patch, const OriginalNodeOracle& oracle,
                          std::size_t samples = 800000, std::uint64_t seed = 0,
                          std::vector<double>* per_sample = nullptr);

// Discrete mean curvature (cotangent Laplacian over mixed Voronoi area),
// positive on convex regions with outward normals. Boundary vertices and
// degenerate one-rings report nullopt.
std::vector<std::optional<double>> mean_curvature(const ControlMesh& mesh);

// Per-node wall-clock statistics of one pipeline run.
struct StageTimings {
    double smoothing_ms = 0.0;     // upsampling + fairing
    double construction_ms = 0.0;  // whole nodal pipeline
};

struct TimingReport {
    std::size_t edge_count = 0;
    std::size_t node_count = 0;  // nodes processed (valence >= 2)
    std::size_t max_degree = 0;
    double smoothing_min = 0.0, smoothing_max = 0.0, smoothing_avg = 0.0;
    double construction_min = 0.0, construction_max = 0.0, construction_avg = 0.0;
};

TimingReport timing_report(const std::vector<StageTimings>& per_node,
                           std::size_t edge_count, std::size_t max_degree);
void write_timing_csv(const TimingReport& report, std::ostream& out);
void write_deviation_csv(const DeviationReport& report, std::ostream& out);

// PLY with one float scalar per vertex, for color-mapped inspection.
void write_ply_with_scalar(const ControlMesh& mesh, const std::string& scalar_name,
                           const std::vector<double>& values, std::ostream& out);

}  // namespace latticefilm
