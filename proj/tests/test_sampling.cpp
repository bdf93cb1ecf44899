#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "helpers.hpp"

using namespace proxycoll;
using namespace testing;
using Catch::Approx;

namespace {

bool on_cylinder_surface(double r, double h, const Vector3d& p) {
    const double radial = std::hypot(p.x(), p.y());
    if (std::abs(radial - r) < 1e-9 && p.z() > -1e-12 && p.z() < h + 1e-12) return true;
    const bool cap_plane = std::abs(p.z()) < 1e-9 || std::abs(p.z() - h) < 1e-9;
    return cap_plane && radial <= r + 1e-9;
}

int face_of(const Vector3d& unit) {
    // matches the allocation order: +y, -y, +x, -x, +z, -z
    if (unit.y() == 1.0) return 0;
    if (unit.y() == -1.0) return 1;
    if (unit.x() == 1.0) return 2;
    if (unit.x() == -1.0) return 3;
    if (unit.z() == 1.0) return 4;
    return 5;
}

}  // namespace

TEST_CASE("cylinder samples lie on the surface") {
    const double r = 0.1, h = 1.0;
    const SurfaceSamples s = sample_cylinder(r, h, 30, 0);
    REQUIRE(s.local_points.size() == 30);
    for (const Vector3d& p : s.local_points) CHECK(on_cylinder_surface(r, h, p));
}

TEST_CASE("cuboid samples lie on the surface") {
    const Vector3d he(0.12, 0.2, 0.07);
    const SurfaceSamples s = sample_cuboid(he, 64, 0);
    REQUIRE(s.local_points.size() == 64);
    for (const Vector3d& p : s.local_points) {
        const Vector3d frac = p.cwiseQuotient(he).cwiseAbs();
        CHECK(frac.maxCoeff() == Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("single sample goes to the largest region") {
    // lateral area dominates for a tall cylinder
    const SamplePattern tall = cylinder_pattern(0.1, 1.0, 1, 0);
    REQUIRE(tall.unit.size() == 1);
    CHECK(std::hypot(tall.unit[0].x(), tall.unit[0].y()) == Approx(1.0));
    // a squat disc puts it on a cap
    const SamplePattern squat = cylinder_pattern(0.5, 0.01, 1, 0);
    CHECK((squat.unit[0].z() == 0.0 || squat.unit[0].z() == 1.0));
    // elongated box: the two biggest faces are the +-y pair (x-z extent)
    const SamplePattern box = cuboid_pattern(Vector3d(0.3, 0.05, 0.2), 1, 0);
    CHECK(std::abs(box.unit[0].y()) == 1.0);
}

TEST_CASE("equal-area cube spreads samples to within one per face") {
    const SamplePattern pat = cuboid_pattern(Vector3d(0.1, 0.1, 0.1), 64, 9);
    std::array<int, 6> counts{};
    for (const Vector3d& u : pat.unit) ++counts[face_of(u)];
    const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
    CHECK(*hi - *lo <= 1);
}

TEST_CASE("area weighting tracks region areas") {
    const double r = 0.05, h = 0.8;
    const int n = 200;
    const SamplePattern pat = cylinder_pattern(r, h, n, 1);
    int lateral = 0;
    for (const Vector3d& u : pat.unit)
        if (u.z() > 0.0 && u.z() < 1.0) ++lateral;
    const double lateral_share = 2 * M_PI * r * h / (2 * M_PI * r * h + 2 * M_PI * r * r);
    CHECK(lateral == Approx(lateral_share * n).margin(2.0));
}

TEST_CASE("sampling is deterministic per seed and varies across seeds") {
    const SamplePattern a = cylinder_pattern(0.1, 0.5, 30, 12);
    const SamplePattern b = cylinder_pattern(0.1, 0.5, 30, 12);
    REQUIRE(a.unit.size() == b.unit.size());
    for (size_t i = 0; i < a.unit.size(); ++i) CHECK(a.unit[i] == b.unit[i]);
    const SamplePattern c = cylinder_pattern(0.1, 0.5, 30, 13);
    bool any_differs = false;
    for (size_t i = 0; i < a.unit.size(); ++i)
        if ((a.unit[i] - c.unit[i]).norm() > 1e-12) any_differs = true;
    CHECK(any_differs);
}

TEST_CASE("sample sets nest across counts") {
    const SamplePattern p10 = cylinder_pattern(0.1, 0.5, 10, 4);
    const SamplePattern p30 = cylinder_pattern(0.1, 0.5, 30, 4);
    const SamplePattern p50 = cylinder_pattern(0.1, 0.5, 50, 4);
    for (int i = 0; i < 10; ++i) CHECK(p10.unit[i] == p30.unit[i]);
    for (int i = 0; i < 30; ++i) CHECK(p30.unit[i] == p50.unit[i]);

    const Vector3d he(0.1, 0.15, 0.2);
    const SamplePattern b16 = cuboid_pattern(he, 16, 4);
    const SamplePattern b64 = cuboid_pattern(he, 64, 4);
    for (int i = 0; i < 16; ++i) CHECK(b16.unit[i] == b64.unit[i]);
}

TEST_CASE("empty sample request is rejected") {
    CHECK_THROWS_WITH(cylinder_pattern(0.1, 0.5, 0, 0),
                      Catch::Matchers::ContainsSubstring("empty sample set"));
    CHECK_THROWS_AS(cuboid_pattern(Vector3d(0.1, 0.1, 0.1), 0, 0), std::invalid_argument);
}

TEST_CASE("patterns with even region counts mirror across the local xz-plane") {
    // the cap share is small enough that all 10 points land on the lateral wall
    const SamplePattern pat = cylinder_pattern(0.02, 0.40, 10, 21);
    std::multiset<std::tuple<double, double, double>> points, mirrored;
    for (const Vector3d& u : pat.unit) {
        REQUIRE((u.z() > 0.0 && u.z() < 1.0));  // precondition: lateral only
        points.insert({u.x(), u.y(), u.z()});
        mirrored.insert({u.x(), -u.y(), u.z()});
    }
    CHECK(points == mirrored);

    const SamplePattern box = cuboid_pattern(Vector3d(0.1, 0.1, 0.1), 36, 21);
    std::array<int, 6> counts{};
    for (const Vector3d& u : box.unit) ++counts[face_of(u)];
    REQUIRE(counts[0] == counts[1]);  // the +-y pair must match for mirror symmetry
    std::multiset<std::tuple<double, double, double>> bpoints, bmirrored;
    for (const Vector3d& u : box.unit) {
        bpoints.insert({u.x(), u.y(), u.z()});
        bmirrored.insert({u.x(), -u.y(), u.z()});
    }
    CHECK(bpoints == bmirrored);
}

TEST_CASE("pattern scales consistently with dimensions") {
    const SamplePattern pat = cylinder_pattern(0.1, 0.5, 30, 2);
    const SurfaceSamples s = sample_cylinder(0.1, 0.5, 30, 2);
    for (size_t i = 0; i < pat.unit.size(); ++i) {
        const Vector3d expect = cylinder_local_point(0.1, 0.5, pat.unit[i]);
        CHECK((s.local_points[i] - expect).norm() < 1e-15);
    }
}
