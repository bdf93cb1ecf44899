#pragma once

#include <vector>

#include "proxycoll/collision.hpp"
#include "proxycoll/guidance.hpp"
#include "proxycoll/mesh.hpp"

namespace proxycoll {

// Sequence-level penetration metrics. Per-frame depth is the maximum
// penetration depth among that frame's collision points (0 if none);
// coll_dis sums those depths over the sequence; coll_ro is the fraction of
// frames with at least one collision point.
struct PlausibilityMetrics {
    double coll_dis = 0.0;
    double coll_ro = 0.0;
    std::vector<double> per_frame_depth;
};

inline PlausibilityMetrics metrics_from_reports(const std::vector<CollisionReport>& reports) {
    PlausibilityMetrics m;
    m.per_frame_depth.reserve(reports.size());
    int colliding = 0;
    for (const CollisionReport& r : reports) {
        double depth = 0.0;
        for (const CollisionPoint& p : r.points) depth = std::max(depth, p.depth);
        m.per_frame_depth.push_back(depth);
        m.coll_dis += depth;
        if (!r.points.empty()) ++colliding;
    }
    m.coll_ro = reports.empty() ? 0.0 : double(colliding) / double(reports.size());
    return m;
}

inline PlausibilityMetrics coll_metrics(const MotionSequence& motion, const BodyModel& body_a,
                                        const BodyModel& body_b, int threads = 1) {
    return metrics_from_reports(detect_sequence(motion, body_a, body_b, threads));
}

// Cross-tabulation of proxy-level vs mesh-level collision over a probe grid.
// A probe point "collides" when it lies inside a volume of each person.
struct AgreementCounts {
    int64_t tp = 0, fp = 0, fn = 0, tn = 0;

    double precision() const { return tp + fp == 0 ? 1.0 : double(tp) / double(tp + fp); }
    double recall() const { return tp + fn == 0 ? 1.0 : double(tp) / double(tp + fn); }
};

inline AgreementCounts proxy_vs_mesh_agreement(const TriangleMesh& mesh_a,
                                               const TriangleMesh& mesh_b,
                                               const PosedBody& proxies_a,
                                               const PosedBody& proxies_b, double resolution) {
    if (resolution <= 0) throw std::invalid_argument("agreement: resolution must be positive");
    const auto [lo_a, hi_a] = mesh_a.bounds();
    const auto [lo_b, hi_b] = mesh_b.bounds();
    // Collisions can only happen where the two bodies' boxes overlap.
    const Vector3d lo = lo_a.cwiseMax(lo_b);
    const Vector3d hi = hi_a.cwiseMin(hi_b);

    const auto inside_proxies = [](const PosedBody& body, const Vector3d& p) {
        for (const PosedPrimitive& prim : body.placed.primitives)
            if (prim.contains(p)) return true;
        return false;
    };

    AgreementCounts counts;
    if ((hi - lo).minCoeff() <= 0) return counts;
    for (double x = lo.x() + 0.5 * resolution; x < hi.x(); x += resolution) {
        for (double y = lo.y() + 0.5 * resolution; y < hi.y(); y += resolution) {
            for (double z = lo.z() + 0.5 * resolution; z < hi.z(); z += resolution) {
                const Vector3d p(x, y, z);
                const bool proxy_hit = inside_proxies(proxies_a, p) && inside_proxies(proxies_b, p);
                const bool mesh_hit = mesh_contains(mesh_a, p) && mesh_contains(mesh_b, p);
                if (proxy_hit && mesh_hit) ++counts.tp;
                else if (proxy_hit) ++counts.fp;
                else if (mesh_hit) ++counts.fn;
                else ++counts.tn;
            }
        }
    }
    return counts;
}

}  // namespace proxycoll
