#pragma once

#include <optional>
#include <vector>

#include "proxycoll/collision.hpp"

namespace proxycoll {

// Which primitive the antipodal target is reflected on: the one hosting the
// colliding sample (default, a retraction direction) or the container it
// penetrated.
enum class AntipodalOn { host, container };

enum class LossMode {
    per_point,   // every point keeps its own unit direction
    aggregated,  // host segments colliding with several containers share one direction
};

// Unit escape direction for one collision point: d = (q - p) / |q - p| where
// q is the antipodal target.
struct GuidanceVector {
    Vector3d d = Vector3d::Zero();
    int point_ref = -1;
    Vector3d q_world = Vector3d::Zero();
};

namespace detail {

inline const PosedPrimitive* find_primitive(const PosedBody& body, int segment) {
    for (const PosedPrimitive& p : body.placed.primitives)
        if (p.segment == segment) return &p;
    return nullptr;
}

inline std::optional<Vector3d> antipodal_target(const PosedPrimitive& prim, const Vector3d& p) {
    if (prim.kind == PrimitiveKind::cylinder) {
        const Vector3d rel = p - prim.cyl.bottom;
        const Vector3d radial = rel - rel.dot(prim.cyl.axis) * prim.cyl.axis;
        if (radial.norm() < kBoundaryEps) return std::nullopt;  // undefined antipodal
        return p - 2.0 * radial;
    }
    return prim.box.reflect_through_center(p);
}

}  // namespace detail

// Guidance for a single collision point. Returns nullopt for points whose
// antipodal is undefined (samples on a cylinder axis); callers skip those.
inline std::optional<GuidanceVector> guidance_vector(const CollisionPoint& cp, int point_index,
                                                     const PosedBody& host_body,
                                                     const PosedBody& container_body,
                                                     AntipodalOn on = AntipodalOn::host) {
    const PosedPrimitive* prim =
        on == AntipodalOn::host ? detail::find_primitive(host_body, cp.host_segment)
                                : detail::find_primitive(container_body, cp.container_segment);
    if (!prim) return std::nullopt;
    const auto q = detail::antipodal_target(*prim, cp.p_world);
    if (!q) return std::nullopt;
    const Vector3d delta = *q - cp.p_world;
    const double len = delta.norm();
    if (len < kBoundaryEps) return std::nullopt;
    GuidanceVector g;
    g.d = delta / len;
    g.point_ref = point_index;
    g.q_world = *q;
    return g;
}

inline std::vector<std::optional<GuidanceVector>> guidance_vectors(
    const CollisionReport& report, const PosedBody& body_a, const PosedBody& body_b,
    AntipodalOn on = AntipodalOn::host) {
    std::vector<std::optional<GuidanceVector>> out(report.points.size());
    for (size_t i = 0; i < report.points.size(); ++i) {
        const CollisionPoint& cp = report.points[i];
        const PosedBody& host = cp.host_person == 0 ? body_a : body_b;
        const PosedBody& container = cp.host_person == 0 ? body_b : body_a;
        out[i] = guidance_vector(cp, int(i), host, container, on);
    }
    return out;
}

// One colliding region: how many points it holds and its mean unit direction.
struct GroupDirection {
    int count = 0;
    Vector3d d = Vector3d::Zero();
};

// Count-weighted mean of the group directions, not renormalized.
inline Vector3d aggregate_directions(const std::vector<GroupDirection>& groups) {
    if (groups.empty()) throw std::invalid_argument("aggregate_directions: no groups");
    Vector3d sum = Vector3d::Zero();
    double total = 0.0;
    for (const GroupDirection& g : groups) {
        sum += double(g.count) * g.d;
        total += double(g.count);
    }
    if (total <= 0.0) throw std::invalid_argument("aggregate_directions: empty groups");
    return sum / total;
}

// Collision loss with stop-gradient semantics: each point's target
// p + d_eff is treated as a constant, so value = sum |d_eff|^2 and the
// gradient with respect to the point is -2 * d_eff.
struct LossOutput {
    struct Term {
        int point = -1;
        Vector3d d_eff = Vector3d::Zero();
        Vector3d grad = Vector3d::Zero();
    };
    double value = 0.0;
    std::vector<Term> terms;  // only points with a defined direction
};

inline LossOutput collision_loss(const CollisionReport& report,
                                 const std::vector<std::optional<GuidanceVector>>& guidance,
                                 LossMode mode = LossMode::per_point) {
    LossOutput out;
    // Group means over included points, keyed by host segment then container.
    std::map<std::pair<int, int>, std::vector<GroupDirection>> segment_groups;
    if (mode == LossMode::aggregated) {
        std::map<std::pair<int, int>, std::map<int, GroupDirection>> acc;
        for (size_t i = 0; i < report.points.size(); ++i) {
            if (!guidance[i]) continue;
            const CollisionPoint& cp = report.points[i];
            GroupDirection& g = acc[{cp.host_person, cp.host_segment}][cp.container_segment];
            ++g.count;
            g.d += guidance[i]->d;
        }
        for (auto& [key, by_container] : acc) {
            auto& list = segment_groups[key];
            for (auto& [container, g] : by_container) {
                const double norm = g.d.norm();
                g.d = norm > 1e-12 ? Vector3d(g.d / norm) : Vector3d::Zero();
                list.push_back(g);
            }
        }
    }

    for (size_t i = 0; i < report.points.size(); ++i) {
        if (!guidance[i]) continue;
        const CollisionPoint& cp = report.points[i];
        Vector3d d_eff = guidance[i]->d;
        if (mode == LossMode::aggregated) {
            const auto& groups = segment_groups[{cp.host_person, cp.host_segment}];
            if (groups.size() >= 2) d_eff = aggregate_directions(groups);
        }
        LossOutput::Term term;
        term.point = int(i);
        term.d_eff = d_eff;
        term.grad = -2.0 * d_eff;
        out.value += d_eff.squaredNorm();
        out.terms.push_back(term);
    }
    return out;
}

// Gradient of the collision loss over joint positions of both persons.
struct JointGradients {
    std::array<std::vector<Vector3d>, 2> per_person;

    static JointGradients zeros(int joints) {
        JointGradients g;
        g.per_person[0].assign(joints, Vector3d::Zero());
        g.per_person[1].assign(joints, Vector3d::Zero());
        return g;
    }
};

// Chains sample-space gradients through the rigid placement map:
// dL/dJ = sum_i (dp_i/dJ)^T * grad_i. Degenerate segments contribute nothing
// (they host no samples).
inline void chain_to_joints(const CollisionReport& report, const LossOutput& loss,
                            const BodyModel& model_a, const PosedBody& posed_a,
                            std::span<const Vector3d> joints_a, const BodyModel& model_b,
                            const PosedBody& posed_b, std::span<const Vector3d> joints_b,
                            JointGradients* out) {
    for (const LossOutput::Term& term : loss.terms) {
        const CollisionPoint& cp = report.points[term.point];
        const BodyModel& model = cp.host_person == 0 ? model_a : model_b;
        const PosedBody& posed = cp.host_person == 0 ? posed_a : posed_b;
        const auto joints = cp.host_person == 0 ? joints_a : joints_b;

        const Segment& seg = model.skeleton->segments[cp.host_segment];
        const SegmentFrame& frame = posed.placed.frames[cp.host_segment];
        const Vector3d& unit = model.patterns[cp.host_segment].unit[cp.sample_index];
        const SampleJacobian jac =
            sample_jacobian(*model.skeleton, cp.host_segment,
                            model.params.segments[cp.host_segment], frame, joints, unit);

        auto& g = out->per_person[cp.host_person];
        g[seg.joint_a] += jac.da.transpose() * term.grad;
        g[seg.joint_b] += jac.db.transpose() * term.grad;
        if (jac.has_ref) g[seg.ref_joint] += jac.dc.transpose() * term.grad;
    }
}

}  // namespace proxycoll
