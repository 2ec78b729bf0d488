// latticefilm: build watertight lattice boundary meshes from lattice graphs
// and run the single-node analysis pipeline.

#include "latticefilm/assemble.hpp"
#include "latticefilm/io.hpp"
#include "latticefilm/metrics.hpp"
#include "latticefilm/pipeline.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>

namespace lf = latticefilm;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUserError = 1;
constexpr int kExitInternalError = 2;

struct CommonOptions {
    lf::PipelineConfig config;
    std::string config_file;
    std::string format = "obj";
    std::string output;
    std::string dump_cuts;
};

void add_common_flags(CLI::App* cmd, CommonOptions& opt) {
    cmd->add_option("--config", opt.config_file, "JSON config file (flags win)");
    cmd->add_option("--lambda", opt.config.lambda, "cut scaling in (0, 0.5)");
    cmd->add_option("--iters", opt.config.iterations, "subdivision iterations");
    cmd->add_option("--layers", opt.config.layers, "upsampling layers");
    cmd->add_option("--segments", opt.config.longitudinal_segments,
                    "longitudinal strut segments");
    cmd->add_option_function<double>(
        "--radius", [&opt](double r) { opt.config.radius_override = r; },
        "override strut radius");
    cmd->add_option("--seed", opt.config.seed, "RNG seed");
    cmd->add_option("--threads", opt.config.threads, "worker threads (0 = hardware)");
    cmd->add_option("--format", opt.format, "obj | stl | ply");
    cmd->add_option("-o,--output", opt.output, "output path");
    cmd->add_option("--dump-cuts", opt.dump_cuts, "write per-node cut report JSON");
    cmd->add_option("--dump-dir", opt.config.dump_dir, "directory for stage dumps");
    cmd->add_flag("--dump-film", opt.config.dump_film, "dump film geometry OBJs");
    cmd->add_flag("--dump-faired", opt.config.dump_faired, "dump faired mesh OBJs");
    cmd->add_option("--dump-subdiv", opt.config.dump_subdiv,
                    "dump subdivision level k OBJs");
}

// Precedence: flags > config file > defaults. Flags were already applied by
// CLI11, so the file only fills options the user did not pass.
void merge_config_file(const CLI::App* cmd, CommonOptions& opt) {
    if (opt.config_file.empty()) return;
    std::ifstream in(opt.config_file);
    if (!in) throw lf::ValidationError("cannot read config file " + opt.config_file);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw lf::ValidationError(std::string("config parse error: ") + e.what());
    }
    auto fresh = [&](const char* flag) { return cmd->count(flag) == 0; };
    if (doc.contains("lambda") && fresh("--lambda"))
        opt.config.lambda = doc["lambda"].get<double>();
    if (doc.contains("iterations") && fresh("--iters"))
        opt.config.iterations = doc["iterations"].get<int>();
    if (doc.contains("layers") && fresh("--layers"))
        opt.config.layers = doc["layers"].get<int>();
    if (doc.contains("segments") && fresh("--segments"))
        opt.config.longitudinal_segments = doc["segments"].get<int>();
    if (doc.contains("radius") && fresh("--radius"))
        opt.config.radius_override = doc["radius"].get<double>();
    if (doc.contains("seed") && fresh("--seed"))
        opt.config.seed = doc["seed"].get<std::uint64_t>();
    if (doc.contains("threads") && fresh("--threads"))
        opt.config.threads = doc["threads"].get<int>();
    if (doc.contains("format") && fresh("--format"))
        opt.format = doc["format"].get<std::string>();
}

lf::MeshFormat parse_format(const std::string& name) {
    if (name == "obj") return lf::MeshFormat::obj;
    if (name == "stl" || name == "stl_binary") return lf::MeshFormat::stl_binary;
    if (name == "ply") return lf::MeshFormat::ply;
    throw lf::ValidationError("unknown format '" + name + "' (obj | stl | ply)");
}

std::string default_extension(lf::MeshFormat f) {
    switch (f) {
        case lf::MeshFormat::stl_binary: return ".stl";
        case lf::MeshFormat::ply: return ".ply";
        default: return ".obj";
    }
}

// Write to a temp file in the target directory, rename on success; failed
// runs leave no partial outputs behind.
void write_file(const std::string& path, const std::function<void(std::ostream&)>& fn,
                bool binary = false) {
    const fs::path target(path);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, binary ? std::ios::binary : std::ios::out);
        if (!out) throw lf::ValidationError("cannot open " + tmp.string() + " for writing");
        try {
            fn(out);
        } catch (...) {
            out.close();
            fs::remove(tmp);
            throw;
        }
        if (!out) {
            out.close();
            fs::remove(tmp);
            throw lf::ValidationError("write failed for " + path);
        }
    }
    fs::rename(tmp, target);
}

void report_error(const char* type, const std::exception& e,
                  std::optional<long long> element = {}) {
    nlohmann::json err = {{"error", {{"type", type}, {"message", e.what()}}}};
    if (element) err["error"]["element"] = *element;
    std::cerr << err.dump() << "\n";
}

lf::LatticeGraph load_graph_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw lf::ValidationError("cannot read graph file " + path);
    return lf::load_graph(in);
}

void dump_cut_report(const lf::LatticeGraph& graph, const lf::PipelineConfig& config,
                     const std::string& path) {
    nlohmann::json doc = nlohmann::json::array();
    for (const lf::Node& node : graph.nodes()) {
        if (graph.incident_edges(node.id).empty()) continue;
        lf::NodeStar star = lf::node_star(graph, node.id);
        if (config.radius_override)
            for (auto& s : star.incident) s.radius = *config.radius_override;
        const auto cuts = lf::node_cuts(star, config.lambda);
        nlohmann::json jnode = {{"node", node.id}, {"cuts", nlohmann::json::array()}};
        for (const auto& c : cuts)
            jnode["cuts"].push_back({{"edge", c.edge_id},
                                     {"min_length", c.min_length},
                                     {"cut_length", c.cut_length}});
        doc.push_back(std::move(jnode));
    }
    write_file(path, [&](std::ostream& os) { os << doc.dump(2) << "\n"; });
}

std::vector<lf::Vec3> parse_node_spec(const std::string& spec) {
    if (spec == "regular6")
        return lf::regular_node_directions(lf::RegularNodeKind::regular6);
    if (spec == "regular12")
        return lf::regular_node_directions(lf::RegularNodeKind::regular12);
    if (spec == "regular20")
        return lf::regular_node_directions(lf::RegularNodeKind::regular20);
    std::ifstream in(spec);
    if (!in)
        throw lf::ValidationError(
            "node spec is neither regular6/12/20 nor a readable file: " + spec);
    std::vector<lf::Vec3> dirs;
    double x, y, z;
    while (in >> x >> y >> z) dirs.emplace_back(x, y, z);
    if (dirs.empty()) throw lf::ValidationError("direction file " + spec + " is empty");
    for (std::size_t i = 0; i < dirs.size(); ++i) {
        if (dirs[i].norm() < 1e-12) throw lf::ValidationError("zero direction in " + spec);
        dirs[i].normalize();
        for (std::size_t j = 0; j < i; ++j)
            if (lf::angle_between(dirs[i], dirs[j]) < 1e-6)
                throw lf::ValidationError("duplicate directions in " + spec);
    }
    return dirs;
}

lf::ControlMesh to_control_mesh(const lf::IndexedMesh& in) {
    lf::ControlMesh mesh;
    for (const lf::Vec3& p : in.positions)
        mesh.add_vertex(p, lf::Vec3(0, 0, 1), lf::VertexRole::Interior);
    mesh.triangles = in.triangles;
    lf::recompute_interior_normals(mesh);
    return mesh;
}

int cmd_build(const std::string& graph_path, CommonOptions& opt) {
    opt.config.validate();
    const lf::LatticeGraph graph = load_graph_file(graph_path);
    if (!opt.dump_cuts.empty()) dump_cut_report(graph, opt.config, opt.dump_cuts);

    const lf::BuildResult built = lf::build_lattice(graph, opt.config);
    const lf::MeshFormat format = parse_format(opt.format);
    const std::string out_path =
        opt.output.empty()
            ? fs::path(graph_path).stem().string() + default_extension(format)
            : opt.output;
    write_file(out_path, [&](std::ostream& os) { lf::export_mesh(built.mesh, format, os); },
               format == lf::MeshFormat::stl_binary);

    const lf::TimingReport timing =
        lf::timing_report(built.node_timings, graph.edges().size(), built.max_degree);
    std::cout << "mesh: " << out_path << " (" << built.mesh.triangles.size()
              << " triangles, " << built.mesh.positions.size() << " vertices)\n";
    std::cout << "census: " << built.mesh.census.cylindrical_faces << " cylindrical, "
              << built.mesh.census.subdivision_faces << " subdivision, "
              << built.mesh.census.planar_caps << " caps, "
              << built.mesh.census.boundary_curves << " boundary curves\n";
    std::printf("timing: construction avg %.2f ms (min %.2f, max %.2f), "
                "smoothing avg %.2f ms over %zu nodes\n",
                timing.construction_avg, timing.construction_min, timing.construction_max,
                timing.smoothing_avg, timing.node_count);
    return kExitOk;
}

int cmd_node(const std::string& spec, CommonOptions& opt, std::size_t samples) {
    opt.config.validate();
    const double radius = opt.config.radius_override.value_or(1.0);
    const std::vector<lf::Vec3> dirs = parse_node_spec(spec);
    const lf::LatticeGraph graph = lf::make_star_graph(dirs, radius);
    const lf::NodeStar star = lf::node_star(graph, 0);
    const lf::NodeResult result = lf::process_node(star, opt.config);
    if (!result.has_patch) throw lf::ValidationError("node spec needs valence >= 2");

    const lf::MeshFormat format = parse_format(opt.format);
    const std::string base = opt.output.empty() ? fs::path(spec).stem().string() : opt.output;
    const std::string mesh_path = base + default_extension(format);

    lf::LatticeMesh patch_mesh;
    patch_mesh.positions = result.patch.mesh.positions;
    patch_mesh.triangles = result.patch.mesh.triangles;
    patch_mesh.owners.assign(patch_mesh.triangles.size(),
                             {lf::TriOwner::Kind::NodePatch, 0});
    patch_mesh.census = {0, 1, 0, static_cast<int>(dirs.size())};
    write_file(mesh_path,
               [&](std::ostream& os) { lf::export_mesh(patch_mesh, format, os); },
               format == lf::MeshFormat::stl_binary);

    const lf::OriginalNodeOracle oracle = lf::make_node_oracle(star);
    const lf::DeviationReport report =
        lf::deviation(result.patch.mesh, oracle, samples, opt.config.seed);
    write_file(base + "_deviation.csv",
               [&](std::ostream& os) { lf::write_deviation_csv(report, os); });

    std::cout << "patch: " << mesh_path << " (" << patch_mesh.triangles.size()
              << " triangles)\n";
    std::printf("deviation over %zu samples: max %.4f avg %.4f std %.4f [mm]\n",
                report.samples, report.max, report.avg, report.std_dev);
    return kExitOk;
}

int cmd_analyze(const std::string& input, CommonOptions& opt, std::size_t samples) {
    opt.config.validate();
    const std::string base =
        opt.output.empty() ? fs::path(input).stem().string() + "_analysis" : opt.output;

    lf::ControlMesh mesh;
    std::optional<lf::OriginalNodeOracle> oracle;
    const fs::path path(input);
    const std::string ext = path.extension().string();
    if (ext == ".obj" || ext == ".stl" || ext == ".ply") {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw lf::ValidationError("cannot read mesh " + input);
        lf::IndexedMesh im;
        if (ext == ".obj") im = lf::read_obj(in);
        else if (ext == ".stl") im = lf::read_stl_binary(in);
        else im = lf::read_ply_ascii(in);
        mesh = to_control_mesh(im);
    } else {
        const double radius = opt.config.radius_override.value_or(1.0);
        const std::vector<lf::Vec3> dirs = parse_node_spec(input);
        const lf::LatticeGraph graph = lf::make_star_graph(dirs, radius);
        const lf::NodeStar star = lf::node_star(graph, 0);
        const lf::NodeResult result = lf::process_node(star, opt.config);
        mesh = result.patch.mesh;
        oracle = lf::make_node_oracle(star);
    }

    const auto curvature = lf::mean_curvature(mesh);
    std::vector<double> values(mesh.vertex_count(), 0.0);
    double hsum = 0.0;
    std::size_t hcount = 0;
    for (std::size_t v = 0; v < values.size(); ++v)
        if (curvature[v]) {
            values[v] = *curvature[v];
            hsum += *curvature[v];
            ++hcount;
        }
    write_file(base + "_curvature.ply", [&](std::ostream& os) {
        lf::write_ply_with_scalar(mesh, "mean_curvature", values, os);
    });
    std::printf("mean curvature: %zu interior vertices, avg %.4f [1/mm]\n", hcount,
                hcount ? hsum / static_cast<double>(hcount) : 0.0);

    if (oracle) {
        const lf::DeviationReport report =
            lf::deviation(mesh, *oracle, samples, opt.config.seed);
        write_file(base + "_deviation.csv",
                   [&](std::ostream& os) { lf::write_deviation_csv(report, os); });
        std::vector<double> vertex_dev(mesh.vertex_count());
        for (std::size_t v = 0; v < mesh.vertex_count(); ++v)
            vertex_dev[v] = lf::oracle_distance(*oracle, mesh.positions[v]);
        write_file(base + "_deviation.ply", [&](std::ostream& os) {
            lf::write_ply_with_scalar(mesh, "deviation", vertex_dev, os);
        });
        std::printf("deviation over %zu samples: max %.4f avg %.4f std %.4f [mm]\n",
                    report.samples, report.max, report.avg, report.std_dev);
    }
    std::cout << "analysis written with base path " << base << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"soap-film lattice structure construction"};
    app.require_subcommand(1);

    CommonOptions build_opt, node_opt, analyze_opt;
    std::string graph_path, node_spec, analyze_input;
    std::size_t node_samples = 800000, analyze_samples = 800000;

    CLI::App* build = app.add_subcommand("build", "build a lattice mesh from a graph");
    build->add_option("graph", graph_path, "lattice graph JSON")->required();
    add_common_flags(build, build_opt);

    CLI::App* node = app.add_subcommand("node", "run the pipeline on a single node");
    node->add_option("spec", node_spec, "regular6 | regular12 | regular20 | direction file")
        ->required();
    node->add_option("--samples", node_samples, "deviation sample count");
    add_common_flags(node, node_opt);

    CLI::App* analyze = app.add_subcommand("analyze", "deviation/curvature reports");
    analyze->add_option("input", analyze_input, "mesh file (.obj/.stl/.ply) or node spec")
        ->required();
    analyze->add_option("--samples", analyze_samples, "deviation sample count");
    add_common_flags(analyze, analyze_opt);

    CLI11_PARSE(app, argc, argv);

    try {
        if (build->parsed()) {
            merge_config_file(build, build_opt);
            return cmd_build(graph_path, build_opt);
        }
        if (node->parsed()) {
            merge_config_file(node, node_opt);
            return cmd_node(node_spec, node_opt, node_samples);
        }
        merge_config_file(analyze, analyze_opt);
        return cmd_analyze(analyze_input, analyze_opt, analyze_samples);
    } catch (const lf::InvalidCutError& e) {
        report_error("invalid_cut", e, e.element);
        return kExitUserError;
    } catch (const lf::ValidationError& e) {
        report_error("validation", e);
        return kExitUserError;
    } catch (const lf::InternalError& e) {
        report_error("internal", e);
        return kExitInternalError;
    } catch (const std::exception& e) {
        report_error("internal", e);
        return kExitInternalError;
    }
}
