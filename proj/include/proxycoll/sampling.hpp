#pragma once

#include <vector>

#include "proxycoll/math.hpp"
#include "proxycoll/primitives.hpp"

namespace proxycoll {

// Points on a primitive surface, expressed in the primitive's local frame.
struct SurfaceSamples {
    std::vector<Vector3d> local_points;
};

// Dimension-free description of a sample layout, reusable across poses.
//
// Cylinder entries are (nx, ny, zfrac): multiply (nx, ny) by the radius and
// zfrac by the current height. Lateral points have nx^2+ny^2 == 1 and
// zfrac in (0,1); cap points have nx^2+ny^2 <= 1 and zfrac in {0,1}.
// Cuboid entries are per-axis fractions in [-1,1], scaled by the half extents;
// exactly one component is +-1 (the face the point lies on).
struct SamplePattern {
    PrimitiveKind kind = PrimitiveKind::cylinder;
    std::vector<Vector3d> unit;

    int count() const { return int(unit.size()); }
};

// Streams n placements over weighted regions so that any prefix of the
// assignment is itself a largest-remainder allocation. Region k receives
// point i when its deficit share*(i+1) - count is largest (ties: lowest k).
inline std::vector<int> allocate_streaming(const std::vector<double>& areas, int n) {
    const int regions = int(areas.size());
    double total = 0.0;
    for (double a : areas) total += a;
    std::vector<double> share(regions);
    for (int r = 0; r < regions; ++r) share[r] = areas[r] / total;

    std::vector<int> counts(regions, 0);
    std::vector<int> assignment(n, 0);
    for (int i = 0; i < n; ++i) {
        int best = 0;
        double best_deficit = -std::numeric_limits<double>::infinity();
        for (int r = 0; r < regions; ++r) {
            const double deficit = share[r] * double(i + 1) - double(counts[r]);
            if (deficit > best_deficit) {
                best_deficit = deficit;
                best = r;
            }
        }
        assignment[i] = best;
        ++counts[best];
    }
    return assignment;
}

namespace detail {

// Points are laid out in pairs mirrored across the local xz-plane, so a
// reflected scene sees a reflected sample cloud whenever region counts are
// even. Index k within a region maps to pair k/2 with the sign of ny/uy
// alternating.
inline void cylinder_point(int region, int k, const R2Sequence seq[3], Vector3d* out) {
    const auto [u, v] = seq[region].at(k / 2);
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    const double theta = M_PI * u;
    if (region == 0) {  // lateral wall
        *out = Vector3d(std::cos(theta), sign * std::sin(theta), v);
    } else {  // caps at zfrac 0 and 1
        const double rho = std::sqrt(v);
        const double zfrac = (region == 1) ? 0.0 : 1.0;
        *out = Vector3d(rho * std::cos(theta), sign * rho * std::sin(theta), zfrac);
    }
}

// Face order: +y, -y, +x, -x, +z, -z. The y-face pair shares one (u,v)
// stream so both faces carry the same in-face layout; the other faces mirror
// internally on the local y coordinate.
inline void cuboid_point(int face, int k, const R2Sequence seq[6], Vector3d* out) {
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    switch (face) {
        case 0: {
            const auto [u, v] = seq[0].at(k);
            *out = Vector3d(2.0 * u - 1.0, 1.0, 2.0 * v - 1.0);
            break;
        }
        case 1: {
            const auto [u, v] = seq[0].at(k);  // same stream as +y
            *out = Vector3d(2.0 * u - 1.0, -1.0, 2.0 * v - 1.0);
            break;
        }
        case 2:
        case 3: {
            const auto [u, v] = seq[face].at(k / 2);
            *out = Vector3d(face == 2 ? 1.0 : -1.0, sign * u, 2.0 * v - 1.0);
            break;
        }
        default: {
            const auto [u, v] = seq[face].at(k / 2);
            *out = Vector3d(2.0 * u - 1.0, sign * v, face == 4 ? 1.0 : -1.0);
            break;
        }
    }
}

}  // namespace detail

inline SamplePattern cylinder_pattern(double radius, double height, int n, uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sample_surface: empty sample set");
    const double lateral = 2.0 * M_PI * radius * height;
    const double cap = M_PI * radius * radius;
    const std::vector<double> areas = {lateral, cap, cap};
    const std::vector<int> region = allocate_streaming(areas, n);

    R2Sequence seq[3];
    for (int r = 0; r < 3; ++r) seq[r] = R2Sequence::seeded(seed, 0x11 + uint64_t(r));

    SamplePattern pat;
    pat.kind = PrimitiveKind::cylinder;
    pat.unit.resize(n);
    int counts[3] = {0, 0, 0};
    for (int i = 0; i < n; ++i) {
        const int r = region[i];
        detail::cylinder_point(r, counts[r]++, seq, &pat.unit[i]);
    }
    return pat;
}

inline SamplePattern cuboid_pattern(const Vector3d& half_extents, int n, uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sample_surface: empty sample set");
    const double ax = half_extents.y() * half_extents.z();  // +-x faces
    const double ay = half_extents.x() * half_extents.z();
    const double az = half_extents.x() * half_extents.y();
    const std::vector<double> areas = {ay, ay, ax, ax, az, az};
    const std::vector<int> face = allocate_streaming(areas, n);

    R2Sequence seq[6];
    for (int f = 0; f < 6; ++f) seq[f] = R2Sequence::seeded(seed, 0x21 + uint64_t(f));

    SamplePattern pat;
    pat.kind = PrimitiveKind::cuboid;
    pat.unit.resize(n);
    int counts[6] = {0, 0, 0, 0, 0, 0};
    for (int i = 0; i < n; ++i) {
        const int f = face[i];
        detail::cuboid_point(f, counts[f]++, seq, &pat.unit[i]);
    }
    return pat;
}

inline Vector3d cylinder_local_point(double radius, double height, const Vector3d& unit) {
    return Vector3d(radius * unit.x(), radius * unit.y(), height * unit.z());
}

inline Vector3d cuboid_local_point(const Vector3d& half_extents, const Vector3d& unit) {
    return half_extents.cwiseProduct(unit);
}

inline SurfaceSamples sample_cylinder(double radius, double height, int n, uint64_t seed) {
    const SamplePattern pat = cylinder_pattern(radius, height, n, seed);
    SurfaceSamples s;
    s.local_points.reserve(n);
    for (const Vector3d& u : pat.unit)
        s.local_points.push_back(cylinder_local_point(radius, height, u));
    return s;
}

inline SurfaceSamples sample_cuboid(const Vector3d& half_extents, int n, uint64_t seed) {
    const SamplePattern pat = cuboid_pattern(half_extents, n, seed);
    SurfaceSamples s;
    s.local_points.reserve(n);
    for (const Vector3d& u : pat.unit)
        s.local_points.push_back(cuboid_local_point(half_extents, u));
    return s;
}

}  // namespace proxycoll
