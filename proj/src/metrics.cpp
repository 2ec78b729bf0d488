#include "latticefilm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>

namespace latticefilm {

namespace {

// splitmix64; self-contained so sampled values do not depend on the standard
// library's distribution implementations.
struct Rng {
    std::uint64_t state;
    explicit Rng(std::uint64_t seed) : state(seed) {}
    std::uint64_t next() {
        std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

double capped_cylinder_sdf(const Vec3& p, const Vec3& base, const Vec3& axis, double radius,
                           double extent) {
    const Vec3 d = p - base;
    const double axial = d.dot(axis);
    const double radial = (d - axial * axis).norm();
    const double a = radial - radius;
    const double b = std::max(-axial, axial - extent);
    const double outside = std::hypot(std::max(a, 0.0), std::max(b, 0.0));
    const double inside = std::min(std::max(a, b), 0.0);
    return outside + inside;
}

double sphere_sdf(const Vec3& p, const Vec3& c, double r) { return (p - c).norm() - r; }

}  // namespace

OriginalNodeOracle make_node_oracle(const NodeStar& star) {
    OriginalNodeOracle oracle;
    oracle.center = star.node.position;
    oracle.sphere_radius = star.radius();
    for (const StarStrut& s : star.incident)
        oracle.cylinders.push_back({s.direction, s.radius, s.length});
    return oracle;
}

double oracle_distance(const OriginalNodeOracle& oracle, const Vec3& p) {
    double sd = sphere_sdf(p, oracle.center, oracle.sphere_radius);
    for (const auto& c : oracle.cylinders)
        sd = std::min(sd, capped_cylinder_sdf(p, oracle.center, c.axis, c.radius, c.extent));
    return std::abs(sd);
}

DeviationReport deviation(const ControlMesh& patch, const OriginalNodeOracle& oracle,
                          std::size_t samples, std::uint64_t seed,
                          std::vector<double>* per_sample) {
    if (patch.triangles.empty()) throw ValidationError("deviation: empty patch");

    const std::size_t nt = patch.triangles.size();
    std::vector<double> area(nt);
    double total = 0.0;
    for (std::size_t t = 0; t < nt; ++t) {
        const Tri& tr = patch.triangles[t];
        area[t] = 0.5 * (patch.positions[tr.b] - patch.positions[tr.a])
                            .cross(patch.positions[tr.c] - patch.positions[tr.a])
                            .norm();
        total += area[t];
    }
    if (!(total > 0.0)) throw ValidationError("deviation: degenerate patch");

    // Systematic stratification over the area CDF: sample j targets
    // (j + 1/2)/N of the total area. Tiny perturbations of the areas (rigid
    // motion round-off) cannot reshuffle the allocation.
    std::vector<double> prefix(nt);
    double acc = 0.0;
    for (std::size_t t = 0; t < nt; ++t) {
        acc += area[t];
        prefix[t] = acc;
    }

    struct Partial {
        double sum = 0.0, sumsq = 0.0, max = 0.0;
        std::size_t n = 0;
    };
    std::vector<Partial> partials(nt);
    std::size_t t = 0;
    for (std::size_t j = 0; j < samples; ++j) {
        const double x = (static_cast<double>(j) + 0.5) / static_cast<double>(samples) * acc;
        while (t + 1 < nt && prefix[t] < x) ++t;
        Rng rng(seed ^ (0xd1342543de82ef95ull * (j + 1)));
        const Tri& tr = patch.triangles[t];
        const Vec3 &A = patch.positions[tr.a], &B = patch.positions[tr.b],
                   &C = patch.positions[tr.c];
        const double su = std::sqrt(rng.uniform());
        const double v = rng.uniform();
        const Vec3 p = (1.0 - su) * A + su * (1.0 - v) * B + su * v * C;
        const double d = oracle_distance(oracle, p);
        if (per_sample) per_sample->push_back(d);
        Partial& pp = partials[t];
        pp.sum += d;
        pp.sumsq += d * d;
        pp.max = std::max(pp.max, d);
        ++pp.n;
    }

    // Pairwise tree reduction keeps the sums reproducible.
    std::vector<Partial> level = std::move(partials);
    while (level.size() > 1) {
        std::vector<Partial> next((level.size() + 1) / 2);
        for (std::size_t i = 0; i < next.size(); ++i) {
            next[i] = level[2 * i];
            if (2 * i + 1 < level.size()) {
                next[i].sum += level[2 * i + 1].sum;
                next[i].sumsq += level[2 * i + 1].sumsq;
                next[i].max = std::max(next[i].max, level[2 * i + 1].max);
                next[i].n += level[2 * i + 1].n;
            }
        }
        level = std::move(next);
    }

    DeviationReport rep;
    rep.samples = level.front().n;
    rep.max = level.front().max;
    rep.avg = level.front().sum / static_cast<double>(rep.samples);
    const double var =
        std::max(0.0, level.front().sumsq / static_cast<double>(rep.samples) - rep.avg * rep.avg);
    rep.std_dev = std::sqrt(var);
    return rep;
}

std::vector<std::optional<double>> mean_curvature(const ControlMesh& mesh) {
    const std::size_t nv = mesh.vertex_count();
    std::vector<Vec3> lap(nv, Vec3::Zero());
    std::vector<double> mixed_area(nv, 0.0);
    std::vector<char> boundary(nv, 0);

    std::map<std::pair<int, int>, int> edge_count;
    for (const Tri& t : mesh.triangles) {
        const int v[3] = {t.a, t.b, t.c};
        for (int k = 0; k < 3; ++k)
            ++edge_count[{std::min(v[k], v[(k + 1) % 3]), std::max(v[k], v[(k + 1) % 3])}];
    }
    for (const auto& [e, c] : edge_count)
        if (c == 1) {
            boundary[e.first] = 1;
            boundary[e.second] = 1;
        }

    for (const Tri& t : mesh.triangles) {
        const int v[3] = {t.a, t.b, t.c};
        const Vec3 p[3] = {mesh.positions[t.a], mesh.positions[t.b], mesh.positions[t.c]};
        const double area2 = (p[1] - p[0]).cross(p[2] - p[0]).norm();
        if (area2 < 1e-300) continue;
        double cot[3];
        bool obtuse[3];
        for (int k = 0; k < 3; ++k) {
            const Vec3 ea = p[(k + 1) % 3] - p[k];
            const Vec3 eb = p[(k + 2) % 3] - p[k];
            cot[k] = ea.dot(eb) / area2;  // cross norm is shared by all corners
            obtuse[k] = ea.dot(eb) < 0.0;
        }
        for (int k = 0; k < 3; ++k) {
            const int i = v[k], j = v[(k + 1) % 3];
            const double w = 0.5 * cot[(k + 2) % 3];
            lap[i] += w * (mesh.positions[i] - mesh.positions[j]);
            lap[j] += w * (mesh.positions[j] - mesh.positions[i]);
        }
        const bool any_obtuse = obtuse[0] || obtuse[1] || obtuse[2];
        for (int k = 0; k < 3; ++k) {
            if (!any_obtuse) {
                const double l_prev = (p[(k + 2) % 3] - p[k]).squaredNorm();
                const double l_next = (p[(k + 1) % 3] - p[k]).squaredNorm();
                mixed_area[v[k]] += (l_prev * cot[(k + 1) % 3] + l_next * cot[(k + 2) % 3]) / 8.0;
            } else {
                mixed_area[v[k]] += (obtuse[k] ? 0.25 : 0.125) * area2;
            }
        }
    }

    const std::vector<Vec3> normals = [&] {
        ControlMesh tmp = mesh;
        return area_weighted_normals(tmp);
    }();

    std::vector<std::optional<double>> H(nv);
    for (std::size_t v = 0; v < nv; ++v) {
        if (boundary[v] || mixed_area[v] < 1e-300) continue;
        const double mag = lap[v].norm() / (2.0 * mixed_area[v]);
        H[v] = lap[v].dot(normals[v]) >= 0.0 ? mag : -mag;
    }
    return H;
}

TimingReport timing_report(const std::vector<StageTimings>& per_node, std::size_t edge_count,
                           std::size_t max_degree) {
    TimingReport rep;
    rep.edge_count = edge_count;
    rep.node_count = per_node.size();
    rep.max_degree = max_degree;
    if (per_node.empty()) return rep;
    rep.smoothing_min = rep.construction_min = std::numeric_limits<double>::infinity();
    for (const StageTimings& t : per_node) {
        rep.smoothing_min = std::min(rep.smoothing_min, t.smoothing_ms);
        rep.smoothing_max = std::max(rep.smoothing_max, t.smoothing_ms);
        rep.smoothing_avg += t.smoothing_ms;
        rep.construction_min = std::min(rep.construction_min, t.construction_ms);
        rep.construction_max = std::max(rep.construction_max, t.construction_ms);
        rep.construction_avg += t.construction_ms;
    }
    rep.smoothing_avg /= static_cast<double>(per_node.size());
    rep.construction_avg /= static_cast<double>(per_node.size());
    return rep;
}

void write_timing_csv(const TimingReport& r, std::ostream& out) {
    out << "edges,nodes,max_degree,smoothing_min_ms,smoothing_max_ms,smoothing_avg_ms,"
           "construction_min_ms,construction_max_ms,construction_avg_ms\n";
    out << r.edge_count << ',' << r.node_count << ',' << r.max_degree << ','
        << r.smoothing_min << ',' << r.smoothing_max << ',' << r.smoothing_avg << ','
        << r.construction_min << ',' << r.construction_max << ',' << r.construction_avg
        << "\n";
}

void write_deviation_csv(const DeviationReport& r, std::ostream& out) {
    out << "samples,max_mm,avg_mm,std_mm\n";
    out << r.samples << ',' << r.max << ',' << r.avg << ',' << r.std_dev << "\n";
}

void write_ply_with_scalar(const ControlMesh& mesh, const std::string& scalar_name,
                           const std::vector<double>& values, std::ostream& out) {
    if (values.size() != mesh.vertex_count())
        throw ValidationError("scalar field size does not match the mesh");
    out << "ply\nformat ascii 1.0\n"
        << "element vertex " << mesh.vertex_count() << "\n"
        << "property double x\nproperty double y\nproperty double z\n"
        << "property double " << scalar_name << "\n"
        << "element face " << mesh.triangles.size() << "\n"
        << "property list uchar int vertex_indices\nend_header\n";
    char buf[128];
    for (std::size_t v = 0; v < mesh.vertex_count(); ++v) {
        const Vec3& p = mesh.positions[v];
        std::snprintf(buf, sizeof buf, "%.17g %.17g %.17g %.17g\n", p.x(), p.y(), p.z(),
                      values[v]);
        out << buf;
    }
    for (const Tri& t : mesh.triangles)
        out << "3 " << t.a << ' ' << t.b << ' ' << t.c << "\n";
    if (!out) throw ValidationError("ply export failed: sink write error");
}

}  // namespace latticefilm
