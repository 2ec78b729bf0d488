#include "test_support.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sys/wait.h>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace {

const std::string kCli = LATTICEFILM_CLI_PATH;

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / "latticefilm_cli_test";
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

int run(const std::string& args) {
    const int status = std::system((kCli + " " + args + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(status);
}

std::string run_capture_stderr(const std::string& args, const fs::path& dir) {
    const fs::path errfile = dir / "stderr.txt";
    const int status =
        std::system((kCli + " " + args + " >/dev/null 2>" + errfile.string()).c_str());
    (void)status;  // the caller asserts on the JSON payload, not the code
    std::ifstream in(errfile);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

const char* kCubeGraph = R"({
  "default_radius": 1.0,
  "nodes": [
    {"id": 0, "x": 0,  "y": 0,  "z": 0},  {"id": 1, "x": 0,  "y": 0,  "z": 10},
    {"id": 2, "x": 0,  "y": 10, "z": 0},  {"id": 3, "x": 0,  "y": 10, "z": 10},
    {"id": 4, "x": 10, "y": 0,  "z": 0},  {"id": 5, "x": 10, "y": 0,  "z": 10},
    {"id": 6, "x": 10, "y": 10, "z": 0},  {"id": 7, "x": 10, "y": 10, "z": 10}
  ],
  "edges": [
    {"id": 0,  "a": 0, "b": 1}, {"id": 1,  "a": 2, "b": 3},
    {"id": 2,  "a": 4, "b": 5}, {"id": 3,  "a": 6, "b": 7},
    {"id": 4,  "a": 0, "b": 2}, {"id": 5,  "a": 1, "b": 3},
    {"id": 6,  "a": 4, "b": 6}, {"id": 7,  "a": 5, "b": 7},
    {"id": 8,  "a": 0, "b": 4}, {"id": 9,  "a": 1, "b": 5},
    {"id": 10, "a": 2, "b": 6}, {"id": 11, "a": 3, "b": 7}
  ]
})";

}  // namespace

TEST_CASE("build succeeds on the cube cell and writes mesh plus dumps") {
    TempDir dir;
    const fs::path graph = dir.path / "cube.json";
    write_text(graph, kCubeGraph);
    const fs::path out = dir.path / "cube.obj";
    const fs::path cuts = dir.path / "cuts.json";

    const fs::path dumps = dir.path / "dumps";
    fs::create_directories(dumps);
    const int rc = run("build " + graph.string() + " --iters 1 -o " + out.string() +
                       " --dump-cuts " + cuts.string() + " --dump-dir " + dumps.string() +
                       " --dump-film --dump-faired --dump-subdiv 1");
    CHECK(rc == 0);
    CHECK(fs::exists(out));
    CHECK(fs::exists(cuts));
    CHECK(fs::file_size(out) > 0);
    CHECK(fs::exists(dumps / "film_node0.obj"));
    CHECK(fs::exists(dumps / "faired_node0.obj"));
    CHECK(fs::exists(dumps / "subdiv1_node0.obj"));
}

TEST_CASE("build failure paths: exit 1, machine-readable error, no partial mesh") {
    TempDir dir;
    CHECK(run("build " + (dir.path / "missing.json").string()) == 1);

    // a graph whose short edge cannot absorb both cuts
    const fs::path graph = dir.path / "short.json";
    write_text(graph, R"({
      "default_radius": 1.0,
      "nodes": [
        {"id": 0, "x": 0, "y": 0, "z": 0}, {"id": 1, "x": 2.2, "y": 0, "z": 0},
        {"id": 2, "x": 0, "y": 9, "z": 0}, {"id": 3, "x": 2.2, "y": 9, "z": 0},
        {"id": 4, "x": -9, "y": 0, "z": 0}, {"id": 5, "x": 11.2, "y": 0, "z": 0}
      ],
      "edges": [
        {"id": 10, "a": 0, "b": 1},
        {"id": 11, "a": 0, "b": 2}, {"id": 12, "a": 1, "b": 3},
        {"id": 13, "a": 0, "b": 4}, {"id": 14, "a": 1, "b": 5}
      ]
    })");
    const fs::path out = dir.path / "short.obj";
    const std::string err =
        run_capture_stderr("build " + graph.string() + " -o " + out.string(), dir.path);
    CHECK(run("build " + graph.string() + " -o " + out.string()) == 1);
    CHECK(err.find("invalid_cut") != std::string::npos);
    CHECK(err.find("10") != std::string::npos);  // offending edge id
    CHECK_FALSE(fs::exists(out));               // no partial output

    const fs::path bad = dir.path / "bad.json";
    write_text(bad, "this is not json");
    CHECK(run("build " + bad.string()) == 1);
}

TEST_CASE("node subcommand writes patch and deviation csv") {
    TempDir dir;
    const fs::path base = dir.path / "reg6";
    const int rc =
        run("node regular6 --samples 20000 --iters 1 -o " + base.string());
    CHECK(rc == 0);
    CHECK(fs::exists(base.string() + ".obj"));
    CHECK(fs::exists(base.string() + "_deviation.csv"));

    // direction file with three entries gives a valence-3 patch
    const fs::path dirs3 = dir.path / "three.txt";
    write_text(dirs3, "1 0 0\n0 1 0\n-0.7 -0.7 0.4\n");
    CHECK(run("node " + dirs3.string() + " --samples 5000 --iters 1 -o " +
              (dir.path / "v3").string()) == 0);

    // duplicate directions rejected
    const fs::path dup = dir.path / "dup.txt";
    write_text(dup, "1 0 0\n1 0 0\n");
    CHECK(run("node " + dup.string()) == 1);

    // non-existent spec rejected
    CHECK(run("node nosuchspec") == 1);
}

TEST_CASE("analyze works on node specs and mesh files") {
    TempDir dir;
    const fs::path base = dir.path / "reg6a";
    CHECK(run("analyze regular6 --samples 20000 --iters 1 -o " + base.string()) == 0);
    CHECK(fs::exists(base.string() + "_curvature.ply"));
    CHECK(fs::exists(base.string() + "_deviation.csv"));
    CHECK(fs::exists(base.string() + "_deviation.ply"));

    // reuse an exported patch as a plain mesh input
    const fs::path patch = dir.path / "patch";
    REQUIRE(run("node regular6 --samples 5000 --iters 1 -o " + patch.string()) == 0);
    CHECK(run("analyze " + patch.string() + ".obj -o " + (dir.path / "mesh_based").string()) ==
          0);
    CHECK(fs::exists((dir.path / "mesh_based").string() + "_curvature.ply"));

    CHECK(run("analyze " + (dir.path / "missing.obj").string()) == 1);
}

TEST_CASE("config file fills defaults but flags win") {
    TempDir dir;
    const fs::path graph = dir.path / "cube.json";
    write_text(graph, kCubeGraph);
    const fs::path cfg = dir.path / "cfg.json";
    write_text(cfg, R"({"iterations": 1, "format": "ply", "lambda": 0.25})");

    const fs::path out = dir.path / "from_config.ply";
    CHECK(run("build " + graph.string() + " --config " + cfg.string() + " -o " +
              out.string()) == 0);
    CHECK(fs::exists(out));
    {
        std::ifstream in(out);
        std::string first;
        std::getline(in, first);
        CHECK(first == "ply");
    }

    // flag overrides the config file format
    const fs::path out2 = dir.path / "flag_wins.obj";
    CHECK(run("build " + graph.string() + " --config " + cfg.string() +
              " --format obj -o " + out2.string()) == 0);
    std::ifstream in2(out2);
    std::string first2;
    std::getline(in2, first2);
    CHECK(first2.rfind("# latticefilm", 0) == 0);
}
