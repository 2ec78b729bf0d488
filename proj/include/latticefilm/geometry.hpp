#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

namespace latticefilm {

using Vec3 = Eigen::Vector3d;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// User-facing input problems (bad graph, bad parameters). CLI exit code 1.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

// Geometric failure driven by the input (e.g. cutting length exceeds the
// strut length). Carries the offending element so the CLI can report it.
class InvalidCutError : public ValidationError {
public:
    InvalidCutError(const std::string& msg, long long element_id)
        : ValidationError(msg), element(element_id) {}
    long long element;
};

// Broken pipeline invariant. CLI exit code 2.
class InternalError : public std::logic_error {
public:
    explicit InternalError(const std::string& msg) : std::logic_error(msg) {}
};

inline Vec3 normalized_or_throw(const Vec3& v, const char* what) {
    const double n = v.norm();
    if (!(n > 0.0) || !std::isfinite(n))
        throw InternalError(std::string("cannot normalize ") + what);
    return v / n;
}

// Angle between two vectors via atan2(|a x b|, a.b); stable for near-parallel
// and near-antiparallel inputs where acos of the dot loses digits.
inline double angle_between(const Vec3& a, const Vec3& b) {
    return std::atan2(a.cross(b).norm(), a.dot(b));
}

inline double wrap_angle(double u) {
    u = std::fmod(u, kTwoPi);
    if (u < 0.0) u += kTwoPi;
    return u;
}

// Oriented circle in 3-space with a deterministic in-plane frame.
// c(u) = center + radius*(cos(u)*e1 + sin(u)*e2), (e1, e2, axis) right-handed.
struct Circle3 {
    Vec3 center{0, 0, 0};
    Vec3 axis{0, 0, 1};
    double radius = 1.0;
    Vec3 e1{1, 0, 0};
    Vec3 e2{0, 1, 0};

    Circle3() = default;

    // Frame rule: e1 is the normalized in-plane projection of the global axis
    // least aligned with `axis`, so the parametrization is reproducible.
    Circle3(const Vec3& c, const Vec3& a, double r) : center(c), axis(a), radius(r) {
        int least = 0;
        double best = std::abs(axis.x());
        if (std::abs(axis.y()) < best) { least = 1; best = std::abs(axis.y()); }
        if (std::abs(axis.z()) < best) { least = 2; }
        Vec3 g = Vec3::Zero();
        g[least] = 1.0;
        e1 = normalized_or_throw(g - g.dot(axis) * axis, "circle frame e1");
        e2 = axis.cross(e1);
    }

    Vec3 at(double u) const {
        return center + radius * (std::cos(u) * e1 + std::sin(u) * e2);
    }

    // Outward normal of the supporting cylinder at parameter u.
    Vec3 cylinder_normal(double u) const {
        return std::cos(u) * e1 + std::sin(u) * e2;
    }

    // Parameter of the point on the circle nearest to p (radial projection
    // about the center within the circle plane).
    double param_of(const Vec3& p) const {
        const Vec3 d = p - center;
        return wrap_angle(std::atan2(d.dot(e2), d.dot(e1)));
    }

    Vec3 project(const Vec3& p) const { return at(param_of(p)); }
};

// Exact distance from a point to a circle (not the disk).
inline double point_circle_distance(const Vec3& p, const Circle3& c) {
    const Vec3 d = p - c.center;
    const double axial = d.dot(c.axis);
    const Vec3 radial = d - axial * c.axis;
    const double rn = radial.norm();
    if (rn < 1e-300) return std::sqrt(c.radius * c.radius + axial * axial);
    const double dr = rn - c.radius;
    return std::sqrt(dr * dr + axial * axial);
}

// First positive ray/infinite-cylinder hit for rays cast from a point on the
// cylinder axis: |dir_perp| scales straight to the radius.
// Throws when the ray runs parallel to the axis.
inline Vec3 ray_from_axis_to_cylinder(const Vec3& origin, const Vec3& dir,
                                      const Vec3& cyl_axis, double radius) {
    const Vec3 d = normalized_or_throw(dir, "ray direction");
    const Vec3 perp = d - d.dot(cyl_axis) * cyl_axis;
    const double pn = perp.norm();
    if (pn < 1e-12)
        throw InternalError("ray is parallel to cylinder axis; no lateral intersection");
    return origin + (radius / pn) * d;
}

}  // namespace latticefilm
