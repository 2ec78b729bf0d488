#pragma once

#include "latticefilm/assemble.hpp"
#include "latticefilm/cut.hpp"
#include "latticefilm/fair.hpp"
#include "latticefilm/film.hpp"
#include "latticefilm/graph.hpp"
#include "latticefilm/metrics.hpp"
#include "latticefilm/subdiv.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace latticefilm {

struct PipelineConfig {
    double lambda = 0.3;
    int iterations = 3;
    int layers = 3;
    int longitudinal_segments = 1;
    std::optional<double> radius_override;
    std::uint64_t seed = 20240801;
    int threads = 0;  // 0: hardware concurrency
    std::string dump_dir;  // when set, per-stage OBJ dumps are written here
    bool dump_film = false;
    bool dump_faired = false;
    int dump_subdiv = -1;  // level to dump, -1: off

    void validate() const;
};

// One processed node: cuts always, patch for valence >= 2.
struct NodeResult {
    std::int64_t node_id = 0;
    std::vector<StrutCut> cuts;
    SubdividedPatch patch;
    bool has_patch = false;
    StageTimings timings;
};

// Full nodal pipeline for one star: cut, film, adjust, insert, upsample,
// fair, subdivide.
NodeResult process_node(const NodeStar& star, const PipelineConfig& config);

struct BuildResult {
    LatticeMesh mesh;
    std::vector<StageTimings> node_timings;
    std::size_t max_degree = 0;
};

// Builds the whole lattice: nodes processed in a worker pool (results are
// deterministic and independent of the thread count), then assembled.
BuildResult build_lattice(const LatticeGraph& graph, const PipelineConfig& config);

// Per-node construction without retaining patches; returns timings only.
std::vector<StageTimings> profile_nodes(const LatticeGraph& graph,
                                        const PipelineConfig& config);

enum class RegularNodeKind { regular6, regular12, regular20 };

// Regular benchmark direction sets: octahedron, icosahedron and dodecahedron
// vertex directions.
std::vector<Vec3> regular_node_directions(RegularNodeKind kind);

// Single-node star graph with struts of length 10*r along the directions.
LatticeGraph make_star_graph(const std::vector<Vec3>& directions, double radius);

// Axis-aligned grid lattice (synthetic benchmark graphs).
LatticeGraph make_grid_graph(int nx, int ny, int nz, double spacing, double radius);

}  // namespace latticefilm
