#include "latticefilm/io.hpp"

#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

namespace latticefilm {

IndexedMesh read_obj(std::istream& in) {
    IndexedMesh mesh;
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("v ", 0) == 0) {
            double x, y, z;
            if (std::sscanf(line.c_str(), "v %lf %lf %lf", &x, &y, &z) != 3)
                throw ValidationError("obj: malformed vertex line");
            mesh.positions.emplace_back(x, y, z);
        } else if (line.rfind("f ", 0) == 0) {
            // indices possibly in a/b/c form; the leading integer is enough
            std::istringstream ss(line.substr(2));
            std::vector<long> idx;
            std::string tok;
            while (ss >> tok) idx.push_back(std::strtol(tok.c_str(), nullptr, 10));
            if (idx.size() < 3) throw ValidationError("obj: face with fewer than 3 vertices");
            for (std::size_t k = 1; k + 1 < idx.size(); ++k)
                mesh.triangles.push_back({static_cast<int>(idx[0] - 1),
                                          static_cast<int>(idx[k] - 1),
                                          static_cast<int>(idx[k + 1] - 1)});
        }
    }
    return mesh;
}

IndexedMesh read_stl_binary(std::istream& in) {
    char header[80];
    in.read(header, 80);
    std::uint32_t n = 0;
    in.read(reinterpret_cast<char*>(&n), 4);
    if (!in) throw ValidationError("stl: truncated header");
    IndexedMesh mesh;
    mesh.positions.reserve(static_cast<std::size_t>(n) * 3);
    for (std::uint32_t t = 0; t < n; ++t) {
        float rec[12];
        in.read(reinterpret_cast<char*>(rec), 48);
        std::uint16_t attr;
        in.read(reinterpret_cast<char*>(&attr), 2);
        if (!in) throw ValidationError("stl: truncated triangle record");
        const int base = static_cast<int>(mesh.positions.size());
        for (int k = 0; k < 3; ++k)
            mesh.positions.emplace_back(rec[3 + 3 * k], rec[4 + 3 * k], rec[5 + 3 * k]);
        mesh.triangles.push_back({base, base + 1, base + 2});
    }
    return mesh;
}

IndexedMesh read_ply_ascii(std::istream& in) {
    std::string line;
    std::size_t nv = 0, nf = 0;
    int vertex_props = 0;
    bool in_vertex_element = false;
    while (std::getline(in, line)) {
        if (line.rfind("element vertex", 0) == 0) {
            nv = std::stoul(line.substr(15));
            in_vertex_element = true;
        } else if (line.rfind("element face", 0) == 0) {
            nf = std::stoul(line.substr(13));
            in_vertex_element = false;
        } else if (line.rfind("property", 0) == 0 && in_vertex_element) {
            ++vertex_props;
        } else if (line == "end_header") {
            break;
        }
    }
    if (vertex_props < 3) throw ValidationError("ply: vertex element lacks x y z");
    IndexedMesh mesh;
    for (std::size_t v = 0; v < nv; ++v) {
        if (!std::getline(in, line)) throw ValidationError("ply: truncated vertices");
        std::istringstream ss(line);
        double x, y, z;
        if (!(ss >> x >> y >> z)) throw ValidationError("ply: malformed vertex");
        mesh.positions.emplace_back(x, y, z);
    }
    for (std::size_t f = 0; f < nf; ++f) {
        if (!std::getline(in, line)) throw ValidationError("ply: truncated faces");
        std::istringstream ss(line);
        int cnt;
        if (!(ss >> cnt) || cnt < 3) throw ValidationError("ply: malformed face");
        std::vector<int> idx(cnt);
        for (int& i : idx)
            if (!(ss >> i)) throw ValidationError("ply: malformed face indices");
        for (int k = 1; k + 1 < cnt; ++k)
            mesh.triangles.push_back({idx[0], idx[k], idx[k + 1]});
    }
    return mesh;
}

void write_obj(const ControlMesh& mesh, std::ostream& out) {
    char buf[96];
    for (const Vec3& p : mesh.positions) {
        std::snprintf(buf, sizeof buf, "v %.17g %.17g %.17g\n", p.x(), p.y(), p.z());
        out << buf;
    }
    for (const Vec3& n : mesh.normals) {
        std::snprintf(buf, sizeof buf, "vn %.17g %.17g %.17g\n", n.x(), n.y(), n.z());
        out << buf;
    }
    for (const Tri& t : mesh.triangles)
        out << "f " << t.a + 1 << "//" << t.a + 1 << ' ' << t.b + 1 << "//" << t.b + 1 << ' '
            << t.c + 1 << "//" << t.c + 1 << "\n";
}

}  // namespace latticefilm
