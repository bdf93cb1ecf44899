#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace proxycoll {

using Eigen::Matrix3d;
using Eigen::Vector3d;

// Thrown when an optimizer or loss evaluation produces non-finite values.
struct numerical_error : std::runtime_error {
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

// Segments shorter than this are treated as degenerate (collapsed joints).
inline constexpr double kDegenerateLength = 1e-9;

// Half-width of the boundary band in which containment tests report "outside".
inline constexpr double kBoundaryEps = 1e-9;

inline double frac01(double x) {
    double f = x - std::floor(x);
    return (f >= 1.0) ? 0.0 : f;
}

inline uint64_t splitmix64(uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Uniform double in [0,1) from a hashed stream.
inline double hash_unit(uint64_t seed, uint64_t tag) {
    return double(splitmix64(seed ^ (tag * 0x9e3779b97f4a7c15ULL)) >> 11) * 0x1.0p-53;
}

// Additive low-discrepancy sequence on the unit square (generalized golden ratio).
// Successive prefixes are well spread, so sample sets built from it nest: the
// first k points are the same no matter how many more are requested.
struct R2Sequence {
    double u0 = 0.0;
    double v0 = 0.0;

    static constexpr double g1 = 0.7548776662466927;  // 1/phi2
    static constexpr double g2 = 0.5698402909980532;  // 1/phi2^2

    static R2Sequence seeded(uint64_t seed, uint64_t tag) {
        R2Sequence s;
        s.u0 = hash_unit(seed, tag * 2 + 1);
        s.v0 = hash_unit(seed, tag * 2 + 2);
        return s;
    }

    std::pair<double, double> at(int i) const {
        return {frac01(u0 + g1 * double(i + 1)), frac01(v0 + g2 * double(i + 1))};
    }
};

inline Matrix3d cross_matrix(const Vector3d& v) {
    Matrix3d m;
    m << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
    return m;
}

inline bool finite(const Vector3d& v) {
    return std::isfinite(v.x()) && std::isfinite(v.y()) && std::isfinite(v.z());
}

}  // namespace proxycoll
