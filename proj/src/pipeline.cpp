#include "latticefilm/pipeline.hpp"

#include "latticefilm/io.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <string>
#include <thread>
#include <unordered_map>

namespace latticefilm {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void dump_stage(const PipelineConfig& cfg, const std::string& name, std::int64_t node_id,
                const ControlMesh& mesh) {
    if (cfg.dump_dir.empty()) return;
    std::ofstream os(cfg.dump_dir + "/" + name + "_node" + std::to_string(node_id) + ".obj");
    write_obj(mesh, os);
}

}  // namespace

void PipelineConfig::validate() const {
    if (!(lambda > 0.0 && lambda < 0.5))
        throw ValidationError("lambda must lie in (0, 0.5)");
    if (iterations < 0) throw ValidationError("iterations must be >= 0");
    if (layers < 0) throw ValidationError("layers must be >= 0");
    if (longitudinal_segments < 1) throw ValidationError("segments must be >= 1");
    if (radius_override && !(*radius_override > 0.0))
        throw ValidationError("radius must be positive");
    if (threads < 0) throw ValidationError("threads must be >= 0");
}

NodeResult process_node(const NodeStar& star, const PipelineConfig& config) {
    NodeResult result;
    result.node_id = star.node.id;

    const auto t_start = Clock::now();
    result.cuts = node_cuts(star, config.lambda);

    if (star.valence() < 2) {
        result.has_patch = false;
        result.timings.construction_ms = ms_since(t_start);
        return result;
    }

    Film film = build_film(result.cuts, star.node);
    adjust_vertices(film, star);
    insert_curve_points(film, star);
    if (config.dump_film) dump_stage(config, "film", star.node.id, film.mesh);

    const auto t_smooth = Clock::now();
    const ControlMesh upsampled = upsample(film, config.layers);
    const FairingSystem system = build_laplacian(upsampled, LaplacianOrder::second);
    const ControlMesh faired = fair(upsampled, system);
    result.timings.smoothing_ms = ms_since(t_smooth);
    if (config.dump_faired) dump_stage(config, "faired", star.node.id, faired);

    result.patch = subdivide(faired, film.circles, config.iterations);
    result.has_patch = true;
    if (config.dump_subdiv >= 0) {
        const SubdividedPatch at_level =
            config.dump_subdiv == config.iterations
                ? result.patch
                : subdivide(faired, film.circles, config.dump_subdiv);
        dump_stage(config, "subdiv" + std::to_string(config.dump_subdiv), star.node.id,
                   at_level.mesh);
    }

    result.timings.construction_ms = ms_since(t_start);
    return result;
}

namespace {

// Runs fn(node_index) over all nodes with incident edges, in a worker pool.
// Results are written to per-index slots, so the schedule cannot change the
// output.
template <typename Fn>
void parallel_over_nodes(const LatticeGraph& graph, int threads, Fn&& fn) {
    const std::size_t n = graph.nodes().size();
    unsigned pool = threads > 0 ? static_cast<unsigned>(threads)
                                : std::max(1u, std::thread::hardware_concurrency());
    pool = std::min<unsigned>(pool, std::max<std::size_t>(n, 1));

    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;
    auto worker = [&] {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                return;
            }
        }
    };
    if (pool <= 1) {
        worker();
    } else {
        std::vector<std::thread> ts;
        for (unsigned k = 0; k < pool; ++k) ts.emplace_back(worker);
        for (auto& t : ts) t.join();
    }
    if (error) std::rethrow_exception(error);
}

void check_cut_sums(const LatticeGraph& graph, const std::vector<NodeResult>& results) {
    std::unordered_map<std::int64_t, const NodeResult*> by_node;
    for (const NodeResult& r : results)
        if (r.node_id != -1) by_node[r.node_id] = &r;
    for (std::size_t ei = 0; ei < graph.edges().size(); ++ei) {
        const Edge& e = graph.edges()[ei];
        double used = 0.0;
        for (const std::int64_t nid : {e.a, e.b}) {
            const NodeResult* r = by_node.at(nid);
            for (const StrutCut& c : r->cuts)
                if (c.edge_id == e.id) used += c.cut_length;
        }
        if (used >= graph.edge_length(e))
            throw InvalidCutError("cuts of edge " + std::to_string(e.id) + " total " +
                                      std::to_string(used) + " over length " +
                                      std::to_string(graph.edge_length(e)),
                                  e.id);
    }
}

NodeStar star_with_radius(const LatticeGraph& graph, std::int64_t node_id,
                          const PipelineConfig& config) {
    NodeStar star = node_star(graph, node_id);
    if (config.radius_override)
        for (StarStrut& s : star.incident) s.radius = *config.radius_override;
    return star;
}

}  // namespace

BuildResult build_lattice(const LatticeGraph& graph, const PipelineConfig& config) {
    config.validate();
    if (graph.edges().empty()) throw ValidationError("nothing to export: graph has no edges");

    std::vector<NodeResult> results(graph.nodes().size());
    for (auto& r : results) r.node_id = -1;
    parallel_over_nodes(graph, config.threads, [&](std::size_t i) {
        const Node& node = graph.nodes()[i];
        if (graph.incident_edges(node.id).empty()) return;  // isolated node
        results[i] = process_node(star_with_radius(graph, node.id, config), config);
    });
    check_cut_sums(graph, results);

    BuildResult out;
    std::vector<NodePatch> patches;
    for (NodeResult& r : results) {
        if (r.node_id == -1) continue;
        out.node_timings.push_back(r.timings);
        patches.push_back({r.node_id, std::move(r.cuts), std::move(r.patch), r.has_patch});
    }
    for (const Node& n : graph.nodes())
        out.max_degree = std::max(out.max_degree, graph.incident_edges(n.id).size());

    AssembleSettings settings;
    settings.longitudinal_segments = config.longitudinal_segments;
    settings.iterations = config.iterations;
    out.mesh = assemble(graph, patches, settings);
    return out;
}

std::vector<StageTimings> profile_nodes(const LatticeGraph& graph,
                                        const PipelineConfig& config) {
    config.validate();
    std::vector<StageTimings> timings(graph.nodes().size());
    std::vector<char> active(graph.nodes().size(), 0);
    parallel_over_nodes(graph, config.threads, [&](std::size_t i) {
        const Node& node = graph.nodes()[i];
        if (graph.incident_edges(node.id).size() < 2) return;
        const NodeResult r = process_node(star_with_radius(graph, node.id, config), config);
        timings[i] = r.timings;
        active[i] = 1;
    });
    std::vector<StageTimings> out;
    for (std::size_t i = 0; i < timings.size(); ++i)
        if (active[i]) out.push_back(timings[i]);
    return out;
}

std::vector<Vec3> regular_node_directions(RegularNodeKind kind) {
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Vec3> dirs;
    switch (kind) {
        case RegularNodeKind::regular6:
            dirs = {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}};
            break;
        case RegularNodeKind::regular12:
            for (const double a : {-1.0, 1.0})
                for (const double b : {-phi, phi}) {
                    dirs.emplace_back(0.0, a, b);
                    dirs.emplace_back(a, b, 0.0);
                    dirs.emplace_back(b, 0.0, a);
                }
            break;
        case RegularNodeKind::regular20:
            for (const double sx : {-1.0, 1.0})
                for (const double sy : {-1.0, 1.0})
                    for (const double sz : {-1.0, 1.0}) dirs.emplace_back(sx, sy, sz);
            for (const double a : {-1.0 / phi, 1.0 / phi})
                for (const double b : {-phi, phi}) {
                    dirs.emplace_back(0.0, a, b);
                    dirs.emplace_back(a, b, 0.0);
                    dirs.emplace_back(b, 0.0, a);
                }
            break;
    }
    for (Vec3& d : dirs) d.normalize();
    return dirs;
}

LatticeGraph make_star_graph(const std::vector<Vec3>& directions, double radius) {
    if (directions.empty()) throw ValidationError("star graph needs at least one direction");
    const double length = 10.0 * radius;
    std::vector<Node> nodes;
    nodes.push_back({0, Vec3::Zero()});
    std::vector<Edge> edges;
    for (std::size_t k = 0; k < directions.size(); ++k) {
        const Vec3 d = normalized_or_throw(directions[k], "star direction");
        nodes.push_back({static_cast<std::int64_t>(k + 1), length * d});
        edges.push_back({static_cast<std::int64_t>(k), 0, static_cast<std::int64_t>(k + 1),
                         std::nullopt});
    }
    return LatticeGraph(std::move(nodes), std::move(edges), radius);
}

LatticeGraph make_grid_graph(int nx, int ny, int nz, double spacing, double radius) {
    if (nx < 1 || ny < 1 || nz < 1) throw ValidationError("grid dimensions must be >= 1");
    std::vector<Node> nodes;
    auto id = [&](int x, int y, int z) {
        return static_cast<std::int64_t>((x * ny + y) * nz + z);
    };
    for (int x = 0; x < nx; ++x)
        for (int y = 0; y < ny; ++y)
            for (int z = 0; z < nz; ++z)
                nodes.push_back({id(x, y, z), spacing * Vec3(x, y, z)});
    std::vector<Edge> edges;
    std::int64_t eid = 0;
    for (int x = 0; x < nx; ++x)
        for (int y = 0; y < ny; ++y)
            for (int z = 0; z < nz; ++z) {
                if (x + 1 < nx) edges.push_back({eid++, id(x, y, z), id(x + 1, y, z), {}});
                if (y + 1 < ny) edges.push_back({eid++, id(x, y, z), id(x, y + 1, z), {}});
                if (z + 1 < nz) edges.push_back({eid++, id(x, y, z), id(x, y, z + 1), {}});
            }
    return LatticeGraph(std::move(nodes), std::move(edges), radius);
}

}  // namespace latticefilm
