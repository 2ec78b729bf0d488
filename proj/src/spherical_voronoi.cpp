#include "latticefilm/spherical_voronoi.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

namespace latticefilm {

namespace {

constexpr double kCoplanarEps = 1e-9;   // volume test for the initial simplex
constexpr double kVisibleEps = 1e-12;   // coplanar points count as visible
constexpr double kMergeEps = 1e-7;      // dual vertices closer than this collapse

struct HullFace {
    std::array<int, 3> v;  // site indices, CCW seen from outside
    Vec3 normal;           // unit outward
    bool alive = true;
};

double signed_dist(const HullFace& f, const Vec3& p, const std::vector<Vec3>& pts) {
    return f.normal.dot(p - pts[f.v[0]]);
}

HullFace make_face(int a, int b, int c, const Vec3& interior, const std::vector<Vec3>& pts) {
    HullFace f;
    f.v = {a, b, c};
    Vec3 n = (pts[b] - pts[a]).cross(pts[c] - pts[a]);
    const double nn = n.norm();
    if (nn < 1e-14) throw InternalError("degenerate hull face");
    n /= nn;
    if (n.dot(interior - pts[a]) > 0.0) {
        std::swap(f.v[1], f.v[2]);
        n = -n;
    }
    f.normal = n;
    return f;
}

// Incremental convex hull; callers guarantee a non-coplanar point set.
// Insertion follows site index order, which settles cospherical ties
// deterministically.
std::vector<HullFace> convex_hull(const std::vector<Vec3>& pts) {
    const int n = static_cast<int>(pts.size());

    int i1 = -1;
    for (int i = 1; i < n && i1 < 0; ++i)
        if ((pts[i] - pts[0]).norm() > 1e-9) i1 = i;
    if (i1 < 0) throw InternalError("hull: all points coincide");
    int i2 = -1;
    for (int i = 1; i < n && i2 < 0; ++i)
        if (i != i1 && (pts[i1] - pts[0]).cross(pts[i] - pts[0]).norm() > 1e-9) i2 = i;
    if (i2 < 0) throw InternalError("hull: all points collinear");
    const Vec3 plane_n = (pts[i1] - pts[0]).cross(pts[i2] - pts[0]).normalized();
    int i3 = -1;
    for (int i = 1; i < n && i3 < 0; ++i)
        if (i != i1 && i != i2 && std::abs(plane_n.dot(pts[i] - pts[0])) > kCoplanarEps) i3 = i;
    if (i3 < 0) throw InternalError("hull: points are coplanar");

    const Vec3 interior = 0.25 * (pts[0] + pts[i1] + pts[i2] + pts[i3]);
    std::vector<HullFace> faces;
    faces.push_back(make_face(0, i1, i2, interior, pts));
    faces.push_back(make_face(0, i1, i3, interior, pts));
    faces.push_back(make_face(0, i2, i3, interior, pts));
    faces.push_back(make_face(i1, i2, i3, interior, pts));

    for (int p = 1; p < n; ++p) {
        if (p == i1 || p == i2 || p == i3) continue;
        std::vector<int> visible;
        for (int f = 0; f < static_cast<int>(faces.size()); ++f)
            if (faces[f].alive && signed_dist(faces[f], pts[p], pts) > -kVisibleEps)
                visible.push_back(f);
        if (visible.empty())
            throw InternalError("hull: point inside hull (sites are not distinct directions?)");

        // Horizon = directed edges of visible faces whose reverse is not visible.
        std::map<std::pair<int, int>, int> count;
        for (int f : visible) {
            const auto& v = faces[f].v;
            for (int k = 0; k < 3; ++k)
                count[{v[k], v[(k + 1) % 3]}] = f;
        }
        std::vector<std::pair<int, int>> horizon;
        for (const auto& [e, f] : count)
            if (!count.count({e.second, e.first})) horizon.push_back(e);
        for (int f : visible) faces[f].alive = false;
        for (const auto& [a, b] : horizon)
            faces.push_back(make_face(a, b, p, interior, pts));
    }

    std::vector<HullFace> out;
    for (const HullFace& f : faces)
        if (f.alive) out.push_back(f);

    // Closedness check: every directed edge must be matched by its reverse.
    std::map<std::pair<int, int>, int> dir;
    for (const HullFace& f : out)
        for (int k = 0; k < 3; ++k) ++dir[{f.v[k], f.v[(k + 1) % 3]}];
    for (const auto& [e, c] : dir)
        if (c != 1 || !dir.count({e.second, e.first}))
            throw InternalError("hull: inconsistent surface");
    return out;
}

// Deterministic in-plane frame for a unit normal.
std::pair<Vec3, Vec3> plane_frame(const Vec3& n) {
    const Circle3 c(Vec3::Zero(), n, 1.0);
    return {c.e1, c.e2};
}

void orient_and_canonicalize(SphericalVoronoi& vd) {
    for (std::size_t s = 0; s < vd.cells.size(); ++s) {
        auto& loop = vd.cells[s];
        auto& eloop = vd.cell_edges[s];
        if (loop.size() < 2) continue;

        // Signed area about the site, using edge midpoints so that lune cells
        // (two antipodal vertices) orient correctly too.
        double area = 0.0;
        const std::size_t m = loop.size();
        std::vector<Vec3> path;
        for (std::size_t k = 0; k < m; ++k) {
            path.push_back(vd.vertices[loop[k]]);
            path.push_back(voronoi_edge_midpoint(vd, eloop[k]));
        }
        for (std::size_t k = 0; k < path.size(); ++k)
            area += path[k].cross(path[(k + 1) % path.size()]).dot(vd.sites[s]);
        if (area < 0.0) {
            // Reverse: vertex loop reverses, edge k' = edge that used to lead
            // into vertex k'.
            std::reverse(loop.begin(), loop.end());
            std::reverse(eloop.begin(), eloop.end());
            std::rotate(eloop.begin(), eloop.end() - 1, eloop.end());
        }

        // Canonical start: smallest vertex id first (ties broken by edge id).
        std::size_t best = 0;
        for (std::size_t k = 1; k < m; ++k)
            if (loop[k] < loop[best] ||
                (loop[k] == loop[best] && eloop[k] < eloop[best]))
                best = k;
        std::rotate(loop.begin(), loop.begin() + best, loop.end());
        std::rotate(eloop.begin(), eloop.begin() + best, eloop.end());
    }
}

SphericalVoronoi two_site_diagram(const std::vector<Vec3>& sites) {
    SphericalVoronoi vd;
    vd.sites = sites;
    const Vec3 nb = normalized_or_throw(sites[0] - sites[1], "site bisector");
    auto [b1, b2] = plane_frame(nb);
    const int k_count = std::max(8, static_cast<int>(std::ceil(kTwoPi / 0.5)));
    for (int k = 0; k < k_count; ++k) {
        const double u = kTwoPi * k / k_count;
        vd.vertices.push_back(std::cos(u) * b1 + std::sin(u) * b2);
    }
    vd.cells.resize(2);
    vd.cell_edges.resize(2);
    for (int k = 0; k < k_count; ++k) {
        vd.edges.push_back({k, (k + 1) % k_count, 0, 1});
        vd.cells[0].push_back(k);
        vd.cell_edges[0].push_back(k);
    }
    for (int k = 0; k < k_count; ++k) {
        vd.cells[1].push_back((k_count - k) % k_count);
        vd.cell_edges[1].push_back((2 * k_count - 1 - k) % k_count);
    }
    orient_and_canonicalize(vd);
    return vd;
}

// All sites on one circle of the sphere: lune cells between the two poles of
// the circle axis.
SphericalVoronoi coplanar_diagram(const std::vector<Vec3>& sites, const Vec3& axis) {
    SphericalVoronoi vd;
    vd.sites = sites;
    vd.vertices = {axis, -axis};

    auto [f1, f2] = plane_frame(axis);
    const int n = static_cast<int>(sites.size());
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::vector<double> phi(n);
    for (int i = 0; i < n; ++i) {
        const Vec3 t = sites[i] - sites[i].dot(axis) * axis;
        phi[i] = wrap_angle(std::atan2(t.dot(f2), t.dot(f1)));
    }
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        return phi[a] != phi[b] ? phi[a] < phi[b] : a < b;
    });

    vd.cells.assign(n, {});
    vd.cell_edges.assign(n, {});
    for (int k = 0; k < n; ++k) {
        const int i = order[k];
        const int j = order[(k + 1) % n];
        vd.edges.push_back({0, 1, i, j});  // meridian between adjacent sites
    }
    for (int k = 0; k < n; ++k) {
        const int i = order[k];
        const int e_next = k;
        const int e_prev = (k + n - 1) % n;
        vd.cells[i] = {0, 1};
        vd.cell_edges[i] = {e_next, e_prev};
    }
    orient_and_canonicalize(vd);
    return vd;
}

}  // namespace

Vec3 voronoi_edge_midpoint(const SphericalVoronoi& vd, int edge_id) {
    const auto& e = vd.edges[edge_id];
    const Vec3& va = vd.vertices[e.a];
    const Vec3& vb = vd.vertices[e.b];
    const Vec3& si = vd.sites[e.site_i];
    const Vec3& sj = vd.sites[e.site_j];
    Vec3 m = va + vb;
    if (m.norm() < 1e-8) {
        // Antipodal endpoints (lune edge): midpoint is the in-plane direction
        // perpendicular to va within the bisector plane of the two sites.
        const Vec3 nbp = normalized_or_throw(si - sj, "bisector normal");
        m = nbp.cross(va);
    }
    m = normalized_or_throw(m, "edge midpoint");
    if (m.dot(si + sj) < 0.0) m = -m;
    return m;
}

SphericalVoronoi spherical_voronoi(const std::vector<Vec3>& directions) {
    if (directions.empty()) throw ValidationError("spherical_voronoi: no sites");

    std::vector<Vec3> sites;
    sites.reserve(directions.size());
    for (const Vec3& d : directions) sites.push_back(normalized_or_throw(d, "site"));
    for (std::size_t i = 0; i < sites.size(); ++i)
        for (std::size_t j = i + 1; j < sites.size(); ++j)
            if (angle_between(sites[i], sites[j]) < 1e-6)
                throw ValidationError("spherical_voronoi: duplicate sites " +
                                      std::to_string(i) + ", " + std::to_string(j));

    const int n = static_cast<int>(sites.size());
    if (n == 1) {
        SphericalVoronoi vd;
        vd.sites = sites;
        vd.cells.resize(1);
        vd.cell_edges.resize(1);
        return vd;
    }
    if (n == 2) return two_site_diagram(sites);

    // Coplanarity test: best-fit plane through the site points.
    Vec3 centroid = Vec3::Zero();
    for (const Vec3& s : sites) centroid += s;
    centroid /= n;
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (const Vec3& s : sites) cov += (s - centroid) * (s - centroid).transpose();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> eig(cov);
    if (eig.eigenvalues()(0) < kCoplanarEps * std::max(1.0, eig.eigenvalues()(2))) {
        Vec3 axis = eig.eigenvectors().col(0);
        const double c = axis.dot(centroid);
        if (c < -1e-12 ||
            (std::abs(c) <= 1e-12 &&
             (axis.x() < 0 || (axis.x() == 0 && (axis.y() < 0 || (axis.y() == 0 && axis.z() < 0))))))
            axis = -axis;
        return coplanar_diagram(sites, axis.normalized());
    }

    const std::vector<HullFace> faces = convex_hull(sites);

    SphericalVoronoi vd;
    vd.sites = sites;

    // Dual vertex per face; coincident duals (cospherical sites) merge.
    std::vector<int> dual(faces.size());
    for (std::size_t f = 0; f < faces.size(); ++f) {
        const Vec3 v = faces[f].normal;
        int id = -1;
        for (std::size_t g = 0; g < vd.vertices.size(); ++g)
            if ((vd.vertices[g] - v).norm() < kMergeEps) { id = static_cast<int>(g); break; }
        if (id < 0) {
            id = static_cast<int>(vd.vertices.size());
            vd.vertices.push_back(v);
        }
        dual[f] = id;
    }

    // Directed edge -> face map for walking cells.
    std::map<std::pair<int, int>, int> face_of;
    for (std::size_t f = 0; f < faces.size(); ++f)
        for (int k = 0; k < 3; ++k)
            face_of[{faces[f].v[k], faces[f].v[(k + 1) % 3]}] = static_cast<int>(f);

    std::map<std::pair<int, int>, int> edge_id;  // hull edge {i,j} -> diagram edge
    auto get_edge = [&](int si, int sj, int va, int vb) {
        const auto key = std::minmax(si, sj);
        auto it = edge_id.find(key);
        if (it != edge_id.end()) return it->second;
        const int id = static_cast<int>(vd.edges.size());
        vd.edges.push_back({va, vb, key.first, key.second});
        edge_id.emplace(key, id);
        return id;
    };

    vd.cells.assign(n, {});
    vd.cell_edges.assign(n, {});
    for (int s = 0; s < n; ++s) {
        int f0 = -1;
        for (std::size_t f = 0; f < faces.size() && f0 < 0; ++f)
            if (faces[f].v[0] == s || faces[f].v[1] == s || faces[f].v[2] == s)
                f0 = static_cast<int>(f);
        if (f0 < 0) throw InternalError("voronoi: site missing from hull");

        std::vector<std::pair<int, int>> raw;  // (vertex id, crossed site)
        int f = f0;
        do {
            auto v = faces[f].v;
            while (v[0] != s) std::rotate(v.begin(), v.begin() + 1, v.end());
            raw.emplace_back(dual[f], v[2]);
            f = face_of.at({s, v[2]});
        } while (f != f0);

        // Collapse zero-length dual edges from merged vertices. Each entry
        // keeps the crossing that leaves its run.
        std::vector<std::pair<int, int>> clean;
        for (const auto& entry : raw) {
            if (!clean.empty() && clean.back().first == entry.first)
                clean.back().second = entry.second;
            else
                clean.push_back(entry);
        }
        while (clean.size() > 1 && clean.front().first == clean.back().first) {
            clean.back().second = clean.front().second;  // run wraps the start
            clean.erase(clean.begin());
        }

        for (std::size_t k = 0; k < clean.size(); ++k) {
            const int va = clean[k].first;
            const int vb = clean[(k + 1) % clean.size()].first;
            vd.cells[s].push_back(va);
            vd.cell_edges[s].push_back(get_edge(s, clean[k].second, va, vb));
        }
    }

    orient_and_canonicalize(vd);
    return vd;
}

}  // namespace latticefilm
