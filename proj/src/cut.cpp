#include "latticefilm/cut.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace latticefilm {

double pairwise_min_cut(double theta, double radius) {
    if (!(radius > 0.0)) throw ValidationError("strut radius must be positive");
    if (!(theta > 0.0) || theta > kPi + 1e-15)
        throw ValidationError("strut angle must lie in (0, pi]");
    // cot(theta/2) = (1 + cos theta) / sin theta; the numerator hits an exact
    // zero at theta = pi where tan(theta/2) overflows.
    const double c = std::cos(theta);
    if (1.0 + c <= 0.0) return 0.0;
    return radius * (1.0 + c) / std::sin(theta);
}

double pairwise_min_cut(const Vec3& dir_i, const Vec3& dir_j, double radius) {
    if (!(radius > 0.0)) throw ValidationError("strut radius must be positive");
    const double dot = dir_i.dot(dir_j);
    const double cross = dir_i.cross(dir_j).norm();
    if (cross <= 1e-15) {
        if (dot < 0.0) return 0.0;  // antiparallel
        throw ValidationError("coincident strut directions");
    }
    if (1.0 + dot <= 0.0) return 0.0;
    return radius * (1.0 + dot) / cross;
}

std::vector<StrutCut> node_cuts(const NodeStar& star, double lambda) {
    if (!(lambda > 0.0 && lambda < 0.5))
        throw ValidationError("lambda must lie in (0, 0.5)");

    const std::size_t n = star.valence();
    std::vector<StrutCut> cuts(n);
    for (std::size_t i = 0; i < n; ++i) {
        const StarStrut& si = star.incident[i];
        StrutCut& cut = cuts[i];
        cut.edge_id = si.edge_id;
        cut.node_id = star.node.id;
        cut.strut_index = static_cast<int>(i);
        cut.min_length = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            const double dij =
                pairwise_min_cut(si.direction, star.incident[j].direction, si.radius);
            cut.pairwise.push_back(dij);
            cut.min_length = std::max(cut.min_length, dij);
        }
        cut.cut_length = (1.0 + lambda) * cut.min_length;
        if (cut.cut_length >= si.length)
            throw InvalidCutError("cutting length " + std::to_string(cut.cut_length) +
                                      " exceeds strut length " + std::to_string(si.length) +
                                      " on edge " + std::to_string(si.edge_id),
                                  si.edge_id);
        cut.end_circle = Circle3(star.node.position + cut.cut_length * si.direction,
                                 si.direction, si.radius);
    }
    return cuts;
}

double circle_min_distance(const Circle3& a, const Circle3& b) {
    // Sample the parameter of circle a, measure exactly to circle b, then
    // polish the best bracket by golden-section search.
    constexpr int kSamples = 256;
    double best_u = 0.0;
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < kSamples; ++k) {
        const double u = kTwoPi * k / kSamples;
        const double d = point_circle_distance(a.at(u), b);
        if (d < best) {
            best = d;
            best_u = u;
        }
    }
    const double step = kTwoPi / kSamples;
    double lo = best_u - step, hi = best_u + step;
    constexpr double kGolden = 0.6180339887498949;
    double x1 = hi - kGolden * (hi - lo);
    double x2 = lo + kGolden * (hi - lo);
    double f1 = point_circle_distance(a.at(x1), b);
    double f2 = point_circle_distance(a.at(x2), b);
    for (int it = 0; it < 80; ++it) {
        if (f1 < f2) {
            hi = x2; x2 = x1; f2 = f1;
            x1 = hi - kGolden * (hi - lo);
            f1 = point_circle_distance(a.at(x1), b);
        } else {
            lo = x1; x1 = x2; f1 = f2;
            x2 = lo + kGolden * (hi - lo);
            f2 = point_circle_distance(a.at(x2), b);
        }
    }
    return std::min({best, f1, f2});
}

bool verify_disjoint(const std::vector<StrutCut>& cuts) {
    for (std::size_t i = 0; i < cuts.size(); ++i) {
        for (std::size_t j = i + 1; j < cuts.size(); ++j) {
            const double scale = std::max(cuts[i].end_circle.radius, cuts[j].end_circle.radius);
            if (circle_min_distance(cuts[i].end_circle, cuts[j].end_circle) <= 1e-7 * scale)
                return false;
        }
    }
    return true;
}

}  // namespace latticefilm
