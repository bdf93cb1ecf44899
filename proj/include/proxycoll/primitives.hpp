#pragma once

#include <array>
#include <stdexcept>

#include "proxycoll/math.hpp"

namespace proxycoll {

enum class PrimitiveKind { cylinder, cuboid };

inline const char* kind_name(PrimitiveKind k) {
    return k == PrimitiveKind::cylinder ? "cylinder" : "cuboid";
}

// Solid cylinder given by its bottom-cap center, unit axis, height and radius.
struct Cylinder {
    Vector3d bottom = Vector3d::Zero();
    Vector3d axis = Vector3d::UnitZ();  // unit length
    double height = 0.0;
    double radius = 0.0;

    // A point is inside when its perpendicular distance to the axis is strictly
    // below the radius and its axial projection falls within [0, height]. The
    // radial comparison is strict, the axial one inclusive.
    bool contains(const Vector3d& p) const {
        const Vector3d rel = p - bottom;
        const double t = rel.dot(axis);
        if (t < 0.0 || t > height) return false;
        return (rel - t * axis).norm() < radius;
    }

    // Distance from an interior point to the nearest surface patch
    // (lateral wall or either cap). Throws if the point is not inside.
    double interior_depth(const Vector3d& p) const {
        const Vector3d rel = p - bottom;
        const double t = rel.dot(axis);
        const double radial = (rel - t * axis).norm();
        if (t < 0.0 || t > height || radial >= radius)
            throw std::invalid_argument("penetration_depth: point not interior");
        return std::min({radius - radial, t, height - t});
    }

    // Reflection through the axis line; undefined (throws) for points on the axis.
    Vector3d reflect_through_axis(const Vector3d& p) const {
        const Vector3d rel = p - bottom;
        const double t = rel.dot(axis);
        const Vector3d radial = rel - t * axis;
        if (radial.norm() < kBoundaryEps)
            throw std::invalid_argument("antipodal: undefined for axis point");
        return p - 2.0 * radial;
    }

    Vector3d bounding_center() const { return bottom + 0.5 * height * axis; }
    double bounding_radius() const {
        return std::sqrt(0.25 * height * height + radius * radius);
    }
};

// Oriented box given by center, orthonormal basis (columns) and half extents.
// Pairs of representative points on opposite faces are cached so the
// containment test can be phrased as a sign flip of the two offsets along each
// face-pair direction.
struct Cuboid {
    Vector3d center = Vector3d::Zero();
    Matrix3d basis = Matrix3d::Identity();
    Vector3d half_extents = Vector3d::Zero();
    std::array<std::array<Vector3d, 2>, 3> face_points{};

    static Cuboid make(const Vector3d& center, const Matrix3d& basis,
                       const Vector3d& half_extents) {
        Cuboid c;
        c.center = center;
        c.basis = basis;
        c.half_extents = half_extents;
        for (int k = 0; k < 3; ++k) {
            const Vector3d offset = half_extents[k] * basis.col(k);
            c.face_points[k][0] = center + offset;
            c.face_points[k][1] = center - offset;
        }
        return c;
    }

    // Inside iff, for every face pair, the offsets from the point to the two
    // opposite faces (measured along the pair's direction) have opposite signs.
    // Offsets within kBoundaryEps of zero count as outside.
    bool contains(const Vector3d& p) const {
        for (int k = 0; k < 3; ++k) {
            const Vector3d dir = basis.col(k);
            const double d1 = (p - face_points[k][0]).dot(dir);
            const double d2 = (p - face_points[k][1]).dot(dir);
            if (std::abs(d1) <= kBoundaryEps || std::abs(d2) <= kBoundaryEps) return false;
            if (d1 * d2 >= 0.0) return false;
        }
        return true;
    }

    double interior_depth(const Vector3d& p) const {
        const Vector3d local = basis.transpose() * (p - center);
        double best = std::numeric_limits<double>::infinity();
        for (int k = 0; k < 3; ++k) {
            const double slack = half_extents[k] - std::abs(local[k]);
            if (slack <= 0.0)
                throw std::invalid_argument("penetration_depth: point not interior");
            best = std::min(best, slack);
        }
        return best;
    }

    Vector3d reflect_through_center(const Vector3d& p) const { return 2.0 * center - p; }

    Vector3d bounding_center() const { return center; }
    double bounding_radius() const { return half_extents.norm(); }
};

// --- Local-frame operations -------------------------------------------------
//
// The local frame of a cylinder has its bottom-cap center at the origin and the
// axis along +z; a cuboid is centered at the origin with axes along x/y/z.

inline bool cylinder_contains_local(double radius, double height, const Vector3d& p) {
    Cylinder c;
    c.height = height;
    c.radius = radius;
    return c.contains(p);
}

inline bool cuboid_contains_local(const Vector3d& half_extents, const Vector3d& p) {
    return Cuboid::make(Vector3d::Zero(), Matrix3d::Identity(), half_extents).contains(p);
}

// Antipodal map on the surface. Cylinder points reflect through the axis
// (height preserved, cap points included); cuboid points reflect through the
// center. Both are involutions that stay on the surface.
inline Vector3d cylinder_antipodal_local(const Vector3d& p) {
    if (std::hypot(p.x(), p.y()) < kBoundaryEps)
        throw std::invalid_argument("antipodal: undefined for axis point");
    return Vector3d(-p.x(), -p.y(), p.z());
}

inline Vector3d cuboid_antipodal_local(const Vector3d& p) { return -p; }

inline double cylinder_depth_local(double radius, double height, const Vector3d& p) {
    Cylinder c;
    c.height = height;
    c.radius = radius;
    return c.interior_depth(p);
}

inline double cuboid_depth_local(const Vector3d& half_extents, const Vector3d& p) {
    return Cuboid::make(Vector3d::Zero(), Matrix3d::Identity(), half_extents)
        .interior_depth(p);
}

}  // namespace proxycoll
