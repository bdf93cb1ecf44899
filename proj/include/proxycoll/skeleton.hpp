#pragma once

#include <span>
#include <string>
#include <vector>

#include "proxycoll/math.hpp"
#include "proxycoll/primitives.hpp"
#include "proxycoll/sampling.hpp"

namespace proxycoll {

struct Joint {
    std::string name;
    int parent = -1;  // -1 marks the root
};

struct Segment {
    std::string name;
    int joint_a = -1;
    int joint_b = -1;
    PrimitiveKind kind = PrimitiveKind::cylinder;
    // Third joint used to pin the frame's rotation about the segment axis:
    // the parent of joint_a when it exists, otherwise the lowest-index child
    // of joint_a other than joint_b. -1 when the topology offers neither.
    int ref_joint = -1;
};

// Articulated body model: a joint tree plus the segments that carry proxies.
struct Skeleton {
    std::vector<Joint> joints;
    std::vector<Segment> segments;
    int root = -1;

    int joint_count() const { return int(joints.size()); }
    int segment_count() const { return int(segments.size()); }

    int joint_index(const std::string& name) const {
        for (int i = 0; i < joint_count(); ++i)
            if (joints[i].name == name) return i;
        return -1;
    }

    // Validates the tree, resolves per-segment reference joints.
    void finalize() {
        const int n = joint_count();
        if (n == 0) throw std::invalid_argument("skeleton: no joints");
        root = -1;
        for (int i = 0; i < n; ++i) {
            const int p = joints[i].parent;
            if (p == i)
                throw std::invalid_argument("skeleton: cycle in parent links (joint '" +
                                            joints[i].name + "' is its own parent)");
            if (p == -1) {
                if (root != -1) throw std::invalid_argument("skeleton: more than one root");
                root = i;
            } else if (p < 0 || p >= n) {
                throw std::invalid_argument("skeleton: parent index out of range for joint '" +
                                            joints[i].name + "'");
            }
        }
        if (root == -1) throw std::invalid_argument("skeleton: no root joint");
        // Walk each parent chain; revisiting a joint within one walk means a cycle.
        for (int i = 0; i < n; ++i) {
            int steps = 0;
            for (int j = i; j != -1; j = joints[j].parent) {
                if (++steps > n) throw std::invalid_argument("skeleton: cycle in parent links");
            }
        }
        for (Segment& s : segments) {
            if (s.joint_a < 0 || s.joint_a >= n || s.joint_b < 0 || s.joint_b >= n)
                throw std::invalid_argument("skeleton: segment '" + s.name +
                                            "' references missing joint");
            if (s.joint_a == s.joint_b)
                throw std::invalid_argument("skeleton: segment '" + s.name +
                                            "' joints must be distinct");
            s.ref_joint = joints[s.joint_a].parent;
            if (s.ref_joint == -1 || s.ref_joint == s.joint_b) {
                s.ref_joint = -1;
                for (int j = 0; j < n; ++j) {
                    if (joints[j].parent == s.joint_a && j != s.joint_b) {
                        s.ref_joint = j;
                        break;
                    }
                }
            }
        }
    }
};

// Rigid frame of one segment in one pose. Basis columns are [u1, u2, axis],
// right-handed orthonormal.
struct SegmentFrame {
    Vector3d origin = Vector3d::Zero();
    Vector3d axis = Vector3d::UnitZ();
    double length = 0.0;
    Matrix3d basis = Matrix3d::Identity();
    bool degenerate = false;
    // True when the rotation about the axis came from the fixed world-axis
    // rule instead of a usable reference joint.
    bool world_fallback = false;
};

namespace detail {

inline int least_aligned_world_axis(const Vector3d& axis) {
    int best = 0;
    double best_dot = std::abs(axis.x());
    for (int k = 1; k < 3; ++k) {
        const double d = std::abs(axis[k]);
        if (d < best_dot) {
            best_dot = d;
            best = k;
        }
    }
    return best;
}

}  // namespace detail

inline std::vector<SegmentFrame> segment_frames(const Skeleton& skel,
                                                std::span<const Vector3d> joints) {
    if (int(joints.size()) != skel.joint_count())
        throw std::invalid_argument("segment_frames: joint count mismatch");
    for (const Vector3d& p : joints)
        if (!finite(p)) throw std::invalid_argument("segment_frames: non-finite joint position");

    std::vector<SegmentFrame> frames(skel.segments.size());
    for (size_t i = 0; i < skel.segments.size(); ++i) {
        const Segment& seg = skel.segments[i];
        SegmentFrame& f = frames[i];
        const Vector3d a = joints[seg.joint_a];
        const Vector3d b = joints[seg.joint_b];
        f.origin = a;
        f.length = (b - a).norm();
        if (f.length <= kDegenerateLength) {
            f.degenerate = true;
            f.length = 0.0;
            continue;
        }
        f.axis = (b - a) / f.length;

        Vector3d u1;
        f.world_fallback = true;
        if (seg.ref_joint >= 0) {
            const Vector3d u_ref = joints[seg.ref_joint] - a;
            const Vector3d raw = u_ref - u_ref.dot(f.axis) * f.axis;
            if (raw.norm() > 1e-9 * std::max(u_ref.norm(), 1e-300)) {
                u1 = raw.normalized();
                f.world_fallback = false;
            }
        }
        if (f.world_fallback) {
            const int k = detail::least_aligned_world_axis(f.axis);
            u1 = Vector3d::Unit(k).cross(f.axis).normalized();
        }
        const Vector3d u2 = f.axis.cross(u1);
        f.basis.col(0) = u1;
        f.basis.col(1) = u2;
        f.basis.col(2) = f.axis;
    }
    return frames;
}

// Per-segment proxy dimensions for one body shape. Cylinders stretch with the
// segment (height = h_scale * segment length) while the radius stays fixed;
// cuboid half extents are fixed lengths.
struct SegmentProxy {
    PrimitiveKind kind = PrimitiveKind::cylinder;
    double radius = 0.05;
    double h_scale = 1.0;
    Vector3d half_extents = Vector3d(0.05, 0.05, 0.05);
};

struct ProxyParams {
    std::vector<SegmentProxy> segments;
    int samples_per_cylinder = 30;
    int samples_per_cuboid = 36;

    void validate_against(const Skeleton& skel) const {
        if (int(segments.size()) != skel.segment_count())
            throw std::invalid_argument("proxy params: segment count mismatch");
        for (size_t i = 0; i < segments.size(); ++i) {
            if (segments[i].kind != skel.segments[i].kind)
                throw std::invalid_argument("proxy params: primitive kind mismatch on segment '" +
                                            skel.segments[i].name + "'");
        }
        if (samples_per_cylinder < 1 || samples_per_cuboid < 1)
            throw std::invalid_argument("proxy params: sample counts must be positive");
    }
};

// One primitive rigidly attached to a posed segment.
struct PosedPrimitive {
    PrimitiveKind kind = PrimitiveKind::cylinder;
    int segment = -1;
    Cylinder cyl;
    Cuboid box;

    bool contains(const Vector3d& p) const {
        return kind == PrimitiveKind::cylinder ? cyl.contains(p) : box.contains(p);
    }
    double interior_depth(const Vector3d& p) const {
        return kind == PrimitiveKind::cylinder ? cyl.interior_depth(p) : box.interior_depth(p);
    }
    Vector3d bounding_center() const {
        return kind == PrimitiveKind::cylinder ? cyl.bounding_center() : box.bounding_center();
    }
    double bounding_radius() const {
        return kind == PrimitiveKind::cylinder ? cyl.bounding_radius() : box.bounding_radius();
    }
};

struct PlacedBody {
    std::vector<SegmentFrame> frames;       // one per segment
    std::vector<PosedPrimitive> primitives; // degenerate segments omitted
    std::vector<int> skipped_segments;      // segments without a primitive
};

inline PosedPrimitive make_posed(const SegmentProxy& proxy, const SegmentFrame& f, int segment) {
    PosedPrimitive p;
    p.kind = proxy.kind;
    p.segment = segment;
    if (proxy.kind == PrimitiveKind::cylinder) {
        p.cyl.bottom = f.origin;
        p.cyl.axis = f.axis;
        p.cyl.height = proxy.h_scale * f.length;
        p.cyl.radius = proxy.radius;
    } else {
        const Vector3d center = f.origin + 0.5 * f.length * f.axis;
        p.box = Cuboid::make(center, f.basis, proxy.half_extents);
    }
    return p;
}

inline PlacedBody place_proxies(const ProxyParams& params,
                                const std::vector<SegmentFrame>& frames) {
    if (params.segments.size() != frames.size())
        throw std::invalid_argument("place_proxies: params/frames size mismatch");
    PlacedBody body;
    body.frames = frames;
    body.primitives.reserve(frames.size());
    for (size_t i = 0; i < frames.size(); ++i) {
        if (frames[i].degenerate) {
            body.skipped_segments.push_back(int(i));
            continue;
        }
        body.primitives.push_back(make_posed(params.segments[i], frames[i], int(i)));
    }
    return body;
}

// World position of a pattern point on a posed segment.
inline Vector3d sample_world(const SegmentProxy& proxy, const SegmentFrame& f,
                             const Vector3d& unit) {
    if (proxy.kind == PrimitiveKind::cylinder) {
        return f.origin + proxy.radius * (unit.x() * f.basis.col(0) + unit.y() * f.basis.col(1)) +
               unit.z() * proxy.h_scale * f.length * f.axis;
    }
    const Vector3d center = f.origin + 0.5 * f.length * f.axis;
    const Vector3d s = proxy.half_extents.cwiseProduct(unit);
    return center + f.basis * s;
}

// Derivatives of a sample's world position with respect to the three joint
// positions that define its segment frame (joint_a, joint_b, reference).
struct SampleJacobian {
    Matrix3d da = Matrix3d::Zero();
    Matrix3d db = Matrix3d::Zero();
    Matrix3d dc = Matrix3d::Zero();
    bool has_ref = false;
};

// Analytic Jacobian of sample_world. The axial cylinder term uses
// d(length*axis) = d(b-a) exactly; the perpendicular directions differentiate
// through the Gram-Schmidt construction of the frame.
inline SampleJacobian sample_jacobian(const Skeleton& skel, int segment,
                                      const SegmentProxy& proxy, const SegmentFrame& f,
                                      std::span<const Vector3d> joints, const Vector3d& unit) {
    SampleJacobian jac;
    if (f.degenerate) return jac;

    const Segment& seg = skel.segments[segment];
    const Vector3d u1 = f.basis.col(0);
    const Vector3d u2 = f.basis.col(1);
    const Vector3d axis = f.axis;
    const Matrix3d I = Matrix3d::Identity();
    const Matrix3d Av = (I - axis * axis.transpose()) / f.length;  // d(axis)/d(b-a)

    // d(u1) expressed against d(axis) and d(u_ref).
    Matrix3d du1_dv, du1_dref;
    const Matrix3d P1 = I - u1 * u1.transpose();
    if (f.world_fallback) {
        const Vector3d e = Vector3d::Unit(detail::least_aligned_world_axis(axis));
        const double w = e.cross(axis).norm();
        du1_dv = P1 * cross_matrix(e) / w;
        du1_dref = Matrix3d::Zero();
    } else {
        const Vector3d u_ref = joints[seg.ref_joint] - joints[seg.joint_a];
        const Vector3d raw = u_ref - u_ref.dot(axis) * axis;
        const double w = raw.norm();
        const Matrix3d Pv = I - axis * axis.transpose();
        const Matrix3d B = axis * u_ref.transpose() + u_ref.dot(axis) * I;
        du1_dv = -P1 * B / w;
        du1_dref = P1 * Pv / w;
        jac.has_ref = true;
    }
    const Matrix3d du2_dv = -cross_matrix(u1) + cross_matrix(axis) * du1_dv;
    const Matrix3d du2_dref = cross_matrix(axis) * du1_dref;

    if (proxy.kind == PrimitiveKind::cylinder) {
        const double s1 = proxy.radius * unit.x();
        const double s2 = proxy.radius * unit.y();
        const double axial = unit.z() * proxy.h_scale;
        const Matrix3d Mv = (s1 * du1_dv + s2 * du2_dv) * Av;
        const Matrix3d Mr = s1 * du1_dref + s2 * du2_dref;
        jac.db = Mv + axial * I;
        jac.dc = Mr;
        jac.da = I - jac.db - jac.dc;
    } else {
        const Vector3d s = proxy.half_extents.cwiseProduct(unit);
        const Matrix3d Mv = (s.x() * du1_dv + s.y() * du2_dv + s.z() * I) * Av;
        const Matrix3d Mr = s.x() * du1_dref + s.y() * du2_dref;
        jac.db = 0.5 * I + Mv;
        jac.dc = Mr;
        jac.da = I - jac.db - jac.dc;
    }
    return jac;
}

}  // namespace proxycoll
