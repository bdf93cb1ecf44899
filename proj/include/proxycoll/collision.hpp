#pragma once

#include <map>
#include <utility>
#include <vector>

#include "proxycoll/motion.hpp"
#include "proxycoll/parallel.hpp"
#include "proxycoll/skeleton.hpp"

namespace proxycoll {

// One surface sample of `host_person` found strictly inside a primitive of the
// other person. A sample inside several containers yields one point per
// container.
struct CollisionPoint {
    Vector3d p_world = Vector3d::Zero();
    int host_person = 0;
    int host_segment = -1;
    int sample_index = -1;
    int container_segment = -1;
    double depth = 0.0;  // penetration depth inside the container
};

struct CollisionReport {
    int frame_index = 0;
    std::vector<CollisionPoint> points;

    bool empty() const { return points.empty(); }

    // (host_person, host_segment) -> container_segment -> point indices.
    // Built on demand; always partitions `points`.
    std::map<std::pair<int, int>, std::map<int, std::vector<int>>> groups() const {
        std::map<std::pair<int, int>, std::map<int, std::vector<int>>> g;
        for (size_t i = 0; i < points.size(); ++i) {
            const CollisionPoint& cp = points[i];
            g[{cp.host_person, cp.host_segment}][cp.container_segment].push_back(int(i));
        }
        return g;
    }
};

// Skeleton-bound proxy parameters plus the per-segment sample layouts.
// Layout allocation is area weighted, so the segment lengths of a reference
// pose are needed once at build time; the layouts themselves are
// dimension-free and reused across all frames.
struct BodyModel {
    const Skeleton* skeleton = nullptr;
    ProxyParams params;
    std::vector<SamplePattern> patterns;

    static BodyModel build(const Skeleton& skel, ProxyParams params,
                           std::span<const Vector3d> reference_joints, uint64_t seed) {
        params.validate_against(skel);
        BodyModel m;
        m.skeleton = &skel;
        m.params = std::move(params);
        const std::vector<SegmentFrame> frames = segment_frames(skel, reference_joints);
        m.patterns.reserve(skel.segment_count());
        for (int i = 0; i < skel.segment_count(); ++i) {
            const SegmentProxy& proxy = m.params.segments[i];
            const uint64_t seg_seed = splitmix64(seed ^ (0x5eedULL + uint64_t(i)));
            if (proxy.kind == PrimitiveKind::cylinder) {
                const double href = proxy.h_scale * std::max(frames[i].length, 1e-3);
                m.patterns.push_back(cylinder_pattern(proxy.radius, href,
                                                      m.params.samples_per_cylinder, seg_seed));
            } else {
                m.patterns.push_back(cuboid_pattern(proxy.half_extents,
                                                    m.params.samples_per_cuboid, seg_seed));
            }
        }
        return m;
    }
};

// One person in one frame: placed primitives plus their world-space samples.
struct PosedBody {
    PlacedBody placed;
    std::vector<std::vector<Vector3d>> world_samples;  // per segment, empty if degenerate
};

inline PosedBody pose_body(const BodyModel& model, std::span<const Vector3d> joints) {
    PosedBody out;
    const std::vector<SegmentFrame> frames = segment_frames(*model.skeleton, joints);
    out.placed = place_proxies(model.params, frames);
    out.world_samples.resize(frames.size());
    for (size_t s = 0; s < frames.size(); ++s) {
        if (frames[s].degenerate) continue;
        const SamplePattern& pat = model.patterns[s];
        auto& pts = out.world_samples[s];
        pts.reserve(pat.unit.size());
        for (const Vector3d& u : pat.unit)
            pts.push_back(sample_world(model.params.segments[s], frames[s], u));
    }
    return out;
}

namespace detail {

inline void detect_one_side(const PosedBody& host, const PosedBody& container, int host_person,
                            bool broad_phase, CollisionReport* report) {
    for (const PosedPrimitive& hp : host.placed.primitives) {
        const auto& samples = host.world_samples[hp.segment];
        for (const PosedPrimitive& cp : container.placed.primitives) {
            if (broad_phase) {
                const double gap = (hp.bounding_center() - cp.bounding_center()).norm();
                if (gap > hp.bounding_radius() + cp.bounding_radius()) continue;
            }
            for (size_t i = 0; i < samples.size(); ++i) {
                if (!cp.contains(samples[i])) continue;
                CollisionPoint pt;
                pt.p_world = samples[i];
                pt.host_person = host_person;
                pt.host_segment = hp.segment;
                pt.sample_index = int(i);
                pt.container_segment = cp.segment;
                pt.depth = cp.interior_depth(samples[i]);
                report->points.push_back(pt);
            }
        }
    }
}

}  // namespace detail

// Tests every sample of person A against every primitive of person B and vice
// versa. The bounding-sphere cull never changes the result: a contained sample
// lies inside both spheres, so culled pairs cannot produce points.
inline CollisionReport detect_frame(const PosedBody& a, const PosedBody& b,
                                    bool broad_phase = true) {
    CollisionReport report;
    detail::detect_one_side(a, b, 0, broad_phase, &report);
    detail::detect_one_side(b, a, 1, broad_phase, &report);
    return report;
}

inline std::vector<CollisionReport> detect_sequence(const MotionSequence& motion,
                                                    const BodyModel& body_a,
                                                    const BodyModel& body_b, int threads = 1,
                                                    bool broad_phase = true) {
    motion.validate();
    std::vector<CollisionReport> reports(motion.frames);
    parallel_for(motion.frames, threads, [&](int f) {
        const PosedBody pa = pose_body(body_a, motion.person_frame(f, 0));
        const PosedBody pb = pose_body(body_b, motion.person_frame(f, 1));
        reports[f] = detect_frame(pa, pb, broad_phase);
        reports[f].frame_index = f;
    });
    return reports;
}

}  // namespace proxycoll
