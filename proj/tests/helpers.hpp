#pragma once

// Shared test fixtures: independent oracles, synthetic meshes and
// interpenetration scenes. Everything here is deliberately written against
// the math directly (not through the library's fast paths) so it can serve
// as a reference.

#include <map>
#include <random>
#include <vector>

#include "proxycoll/proxycoll.hpp"

namespace testing {

using namespace proxycoll;

// --- random utilities ---------------------------------------------------------

inline std::mt19937_64 rng(uint64_t seed) { return std::mt19937_64(seed); }

inline Vector3d random_unit(std::mt19937_64& gen) {
    std::normal_distribution<double> n(0.0, 1.0);
    Vector3d v;
    do {
        v = Vector3d(n(gen), n(gen), n(gen));
    } while (v.norm() < 1e-6);
    return v.normalized();
}

inline Matrix3d random_rotation(std::mt19937_64& gen) {
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::Quaterniond q(n(gen), n(gen), n(gen), n(gen));
    q.normalize();
    return q.toRotationMatrix();
}

inline Vector3d random_in_box(std::mt19937_64& gen, const Vector3d& lo, const Vector3d& hi) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    return Vector3d(lo.x() + u(gen) * (hi.x() - lo.x()), lo.y() + u(gen) * (hi.y() - lo.y()),
                    lo.z() + u(gen) * (hi.z() - lo.z()));
}

// --- containment oracles --------------------------------------------------------

// Componentwise half-space test in the box frame.
inline bool cuboid_oracle(const Cuboid& c, const Vector3d& p) {
    const Vector3d local = c.basis.transpose() * (p - c.center);
    return std::abs(local.x()) < c.half_extents.x() &&
           std::abs(local.y()) < c.half_extents.y() && std::abs(local.z()) < c.half_extents.z();
}

// Distance of `p` from the box boundary; positive inside, negative outside.
inline double cuboid_boundary_margin(const Cuboid& c, const Vector3d& p) {
    const Vector3d local = c.basis.transpose() * (p - c.center);
    double margin = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 3; ++k)
        margin = std::min(margin, c.half_extents[k] - std::abs(local[k]));
    return margin;
}

// Independent cylinder test: squared radial distance via the Pythagorean
// identity rather than vector rejection.
inline bool cylinder_oracle(const Cylinder& c, const Vector3d& p) {
    const Vector3d rel = p - c.bottom;
    const double t = rel.dot(c.axis);
    const double radial2 = rel.squaredNorm() - t * t;
    return radial2 < c.radius * c.radius && t >= 0.0 && t <= c.height;
}

inline double cylinder_boundary_margin(const Cylinder& c, const Vector3d& p) {
    const Vector3d rel = p - c.bottom;
    const double t = rel.dot(c.axis);
    const double radial = std::sqrt(std::max(rel.squaredNorm() - t * t, 0.0));
    return std::min({c.radius - radial, t, c.height - t});
}

// --- synthetic meshes -----------------------------------------------------------

// Watertight tube: cylindrical wall with fan-capped ends.
inline TriangleMesh make_tube_mesh(const Vector3d& a, const Vector3d& b, double radius,
                                   int rings = 24, int slices = 48) {
    TriangleMesh mesh;
    const Vector3d axis = (b - a).normalized();
    const Vector3d u1 = axis.unitOrthogonal();
    const Vector3d u2 = axis.cross(u1);
    const double length = (b - a).norm();
    for (int r = 0; r < rings; ++r) {
        const double t = double(r) / double(rings - 1);
        const Vector3d center = a + t * length * axis;
        for (int s = 0; s < slices; ++s) {
            const double th = 2.0 * M_PI * double(s) / double(slices);
            mesh.vertices.push_back(center +
                                    radius * (std::cos(th) * u1 + std::sin(th) * u2));
        }
    }
    const int bottom_center = int(mesh.vertices.size());
    mesh.vertices.push_back(a);
    const int top_center = bottom_center + 1;
    mesh.vertices.push_back(b);
    for (int r = 0; r + 1 < rings; ++r) {
        for (int s = 0; s < slices; ++s) {
            const int s2 = (s + 1) % slices;
            const int i00 = r * slices + s, i01 = r * slices + s2;
            const int i10 = (r + 1) * slices + s, i11 = (r + 1) * slices + s2;
            mesh.faces.push_back({i00, i10, i01});
            mesh.faces.push_back({i01, i10, i11});
        }
    }
    for (int s = 0; s < slices; ++s) {
        const int s2 = (s + 1) % slices;
        mesh.faces.push_back({bottom_center, s, s2});
        mesh.faces.push_back({top_center, (rings - 1) * slices + s2, (rings - 1) * slices + s});
    }
    return mesh;
}

// Appends unconnected vertices covering a disk; fitting only reads vertices,
// so this densifies cap coverage without touching the face list.
inline void add_disk_vertices(TriangleMesh* mesh, const Vector3d& center, const Vector3d& axis,
                              double radius, int rings = 6, int slices = 24) {
    const Vector3d u1 = axis.normalized().unitOrthogonal();
    const Vector3d u2 = axis.normalized().cross(u1);
    mesh->vertices.push_back(center);
    for (int k = 1; k <= rings; ++k) {
        const double r = radius * double(k) / double(rings);
        for (int s = 0; s < slices; ++s) {
            const double th = 2.0 * M_PI * double(s) / double(slices);
            mesh->vertices.push_back(center + r * (std::cos(th) * u1 + std::sin(th) * u2));
        }
    }
}

// Vertex cloud on the surface of an oriented box (no faces).
inline TriangleMesh make_box_cloud(const Vector3d& center, const Matrix3d& basis,
                                   const Vector3d& half_extents, int grid = 9) {
    TriangleMesh mesh;
    for (int axis = 0; axis < 3; ++axis) {
        for (int side = -1; side <= 1; side += 2) {
            const int u_axis = (axis + 1) % 3, v_axis = (axis + 2) % 3;
            for (int i = 0; i < grid; ++i) {
                for (int j = 0; j < grid; ++j) {
                    Vector3d local = Vector3d::Zero();
                    local[axis] = side * half_extents[axis];
                    local[u_axis] = half_extents[u_axis] * (2.0 * i / (grid - 1) - 1.0);
                    local[v_axis] = half_extents[v_axis] * (2.0 * j / (grid - 1) - 1.0);
                    mesh.vertices.push_back(center + basis * local);
                }
            }
        }
    }
    return mesh;
}

inline TriangleMesh make_icosphere(const Vector3d& center, double radius, int subdivisions = 2) {
    const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
    std::vector<Vector3d> verts = {{-1, phi, 0}, {1, phi, 0},   {-1, -phi, 0}, {1, -phi, 0},
                                   {0, -1, phi}, {0, 1, phi},   {0, -1, -phi}, {0, 1, -phi},
                                   {phi, 0, -1}, {phi, 0, 1},   {-phi, 0, -1}, {-phi, 0, 1}};
    std::vector<std::array<int, 3>> faces = {
        {0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9},  {5, 11, 4},
        {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6},  {3, 6, 8},
        {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
    for (int step = 0; step < subdivisions; ++step) {
        std::map<std::pair<int, int>, int> midpoint;
        const auto mid = [&](int a, int b) {
            const auto key = std::minmax(a, b);
            const auto it = midpoint.find(key);
            if (it != midpoint.end()) return it->second;
            verts.push_back((verts[a] + verts[b]).normalized() * verts[a].norm());
            midpoint[key] = int(verts.size()) - 1;
            return int(verts.size()) - 1;
        };
        std::vector<std::array<int, 3>> next;
        for (const auto& f : faces) {
            const int ab = mid(f[0], f[1]), bc = mid(f[1], f[2]), ca = mid(f[2], f[0]);
            next.push_back({f[0], ab, ca});
            next.push_back({f[1], bc, ab});
            next.push_back({f[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        faces.swap(next);
    }
    TriangleMesh mesh;
    for (const Vector3d& v : verts) mesh.vertices.push_back(center + radius * v.normalized());
    mesh.faces = faces;
    return mesh;
}

// --- small skeletons --------------------------------------------------------------

// Chain of `segments` cylinders along +y with a lateral child off the root so
// every segment has a usable reference joint.
inline Skeleton chain_skeleton(int segments, PrimitiveKind kind = PrimitiveKind::cylinder) {
    Skeleton s;
    s.joints.push_back({"j0", -1});
    s.joints.push_back({"ref", 0});
    for (int i = 0; i < segments; ++i)
        s.joints.push_back({"j" + std::to_string(i + 1), i == 0 ? 0 : i + 1});
    for (int i = 0; i < segments; ++i) {
        Segment seg;
        seg.name = "seg" + std::to_string(i);
        seg.joint_a = i == 0 ? 0 : i + 1;
        seg.joint_b = i + 2;
        seg.kind = kind;
        s.segments.push_back(seg);
    }
    s.finalize();
    return s;
}

inline std::vector<Vector3d> chain_rest_pose(int segments, double length = 0.3) {
    std::vector<Vector3d> pose;
    pose.push_back({0, 0, 0});
    pose.push_back({0.2, 0, 0});
    for (int i = 0; i < segments; ++i) pose.push_back({0, length * (i + 1), 0});
    return pose;
}

inline ProxyParams uniform_params(const Skeleton& skel, double radius = 0.05,
                                  const Vector3d& half_extents = Vector3d(0.06, 0.05, 0.16),
                                  int n_cyl = 30, int n_box = 36) {
    ProxyParams p;
    p.samples_per_cylinder = n_cyl;
    p.samples_per_cuboid = n_box;
    p.segments.resize(skel.segment_count());
    for (int i = 0; i < skel.segment_count(); ++i) {
        p.segments[i].kind = skel.segments[i].kind;
        p.segments[i].radius = radius;
        p.segments[i].half_extents = half_extents;
    }
    return p;
}

// --- interpenetration scenes -------------------------------------------------------

struct Scene {
    std::string name;
    Skeleton skeleton;
    MotionSequence motion;
    ProxyParams params_a;
    ProxyParams params_b;
};

// Motion that repeats a two-person pose with a small vertical bob.
inline MotionSequence posed_motion(const Skeleton& skel, const std::vector<Vector3d>& pose_a,
                                   const std::vector<Vector3d>& pose_b, int frames,
                                   double bob = 0.0) {
    MotionSequence m = MotionSequence::zeros(frames, skel.joint_count());
    for (int f = 0; f < frames; ++f) {
        const double dy = bob * std::sin(2.0 * M_PI * double(f) / std::max(frames - 1, 1));
        for (int j = 0; j < skel.joint_count(); ++j) {
            m.at(f, 0, j) = pose_a[j] + Vector3d(0, dy, 0);
            m.at(f, 1, j) = pose_b[j] - Vector3d(0, dy, 0);
        }
    }
    return m;
}

inline std::vector<Vector3d> translated(const std::vector<Vector3d>& pose, const Vector3d& t) {
    std::vector<Vector3d> out = pose;
    for (Vector3d& p : out) p += t;
    return out;
}

// Two default bodies facing the same way, person B shifted so that A's left
// forearm and B's right forearm run parallel over their full length, axes
// 6 cm apart: a 2 cm radial interpenetration (forearm radii 4 cm each).
inline Scene scene_arms_cross(int frames = 30) {
    Scene s;
    s.name = "arms_cross";
    s.skeleton = default_skeleton();
    s.params_a = default_proxy_params();
    s.params_b = s.params_a;
    const auto rest = default_rest_pose();
    const Vector3d offset(1.15, 0.0, 0.06);
    s.motion = posed_motion(s.skeleton, rest, translated(rest, offset), frames, 0.005);
    return s;
}

// B stands directly behind A; only the torso cuboids overlap, by ~1 cm.
inline Scene scene_torso_brush(int frames = 60) {
    Scene s;
    s.name = "torso_brush";
    s.skeleton = default_skeleton();
    s.params_a = default_proxy_params();
    s.params_b = s.params_a;
    const auto rest = default_rest_pose();
    const Vector3d offset(0.0, 0.0, 0.17);
    s.motion = posed_motion(s.skeleton, rest, translated(rest, offset), frames, 0.01);
    return s;
}

// Side-by-side pair leaning together: upper arms, forearms and one clavicle
// interpenetrate by 2-4 cm. All contacts are cylinder against cylinder.
inline Scene scene_arm_lean(int frames = 40) {
    Scene s;
    s.name = "arm_lean";
    s.skeleton = default_skeleton();
    s.params_a = default_proxy_params();
    s.params_b = s.params_a;
    const auto rest = default_rest_pose();
    const Vector3d offset(0.80, 0.0, 0.06);
    s.motion = posed_motion(s.skeleton, rest, translated(rest, offset), frames, 0.008);
    return s;
}

// B stands behind A with the right knee swung forward, grazing A's right
// thigh by a couple of centimeters.
inline Scene scene_thigh_brush(int frames = 90) {
    Scene s;
    s.name = "thigh_brush";
    s.skeleton = default_skeleton();
    s.params_a = default_proxy_params();
    s.params_b = s.params_a;
    const auto rest = default_rest_pose();
    std::vector<Vector3d> pose_b = translated(rest, Vector3d(0.0, 0.0, -0.25));
    pose_b[5] = Vector3d(-0.10, 0.50, -0.11);  // right knee forward
    pose_b[8] = Vector3d(-0.10, 0.10, -0.08);  // right ankle
    pose_b[11] = Vector3d(-0.10, 0.03, 0.04);  // right foot
    s.motion = posed_motion(s.skeleton, rest, pose_b, frames, 0.005);
    return s;
}

// B stands behind A with the right leg swung forward through A's right thigh.
inline Scene scene_leg_tangle(int frames = 90) {
    Scene s;
    s.name = "leg_tangle";
    s.skeleton = default_skeleton();
    s.params_a = default_proxy_params();
    s.params_b = s.params_a;
    const auto rest = default_rest_pose();
    std::vector<Vector3d> pose_b = translated(rest, Vector3d(0.0, 0.0, -0.25));
    pose_b[5] = Vector3d(-0.10, 0.50, 0.10);   // right knee forward
    pose_b[8] = Vector3d(-0.10, 0.10, 0.15);   // right ankle
    pose_b[11] = Vector3d(-0.10, 0.03, 0.27);  // right foot
    s.motion = posed_motion(s.skeleton, rest, pose_b, frames, 0.005);
    return s;
}

// Long sequence; the forearm gap breathes between 2 and 10 cm so roughly two
// thirds of the frames interpenetrate.
inline Scene scene_slow_drift(int frames = 300) {
    Scene s;
    s.name = "slow_drift";
    s.skeleton = default_skeleton();
    s.params_a = default_proxy_params();
    s.params_b = s.params_a;
    const auto rest = default_rest_pose();
    s.motion = MotionSequence::zeros(frames, s.skeleton.joint_count());
    for (int f = 0; f < frames; ++f) {
        const double t = double(f) / double(frames - 1);
        const double gap = 0.06 + 0.04 * std::cos(2.0 * M_PI * t);
        const Vector3d offset(1.15, 0.0, gap);
        for (int j = 0; j < s.skeleton.joint_count(); ++j) {
            s.motion.at(f, 0, j) = rest[j];
            s.motion.at(f, 1, j) = rest[j] + offset;
        }
    }
    return s;
}

// Small torso+arm bodies; person B's forearm penetrates person A's waist box
// and A's hanging forearm at the same time (one host segment, two container
// regions).
inline Skeleton torso_arm_skeleton() {
    Skeleton s;
    s.joints = {{"pelvis", -1}, {"chest", 0},   {"shoulder", 1},
                {"elbow", 2},   {"wrist", 3},   {"hip", 0}};
    Segment waist{"waist", 0, 1, PrimitiveKind::cuboid};
    Segment link{"shoulder_link", 1, 2, PrimitiveKind::cylinder};
    Segment upper{"upper_arm", 2, 3, PrimitiveKind::cylinder};
    Segment fore{"forearm", 3, 4, PrimitiveKind::cylinder};
    s.segments = {waist, link, upper, fore};
    s.finalize();
    return s;
}

inline Scene scene_hug_waist(int frames = 45) {
    Scene s;
    s.name = "hug_waist";
    s.skeleton = torso_arm_skeleton();
    ProxyParams p;
    p.samples_per_cylinder = 30;
    p.samples_per_cuboid = 36;
    p.segments.resize(4);
    p.segments[0] = {PrimitiveKind::cuboid, 0.05, 1.0, Vector3d(0.14, 0.10, 0.18)};
    p.segments[1] = {PrimitiveKind::cylinder, 0.04, 1.0, Vector3d::Zero()};
    p.segments[2] = {PrimitiveKind::cylinder, 0.045, 1.0, Vector3d::Zero()};
    p.segments[3] = {PrimitiveKind::cylinder, 0.045, 1.0, Vector3d::Zero()};
    s.params_a = p;
    s.params_b = p;

    const std::vector<Vector3d> pose_a = {
        {0.00, 0.90, 0.00},  // pelvis
        {0.00, 1.25, 0.00},  // chest
        {0.18, 1.25, 0.00},  // shoulder
        {0.20, 1.20, 0.00},  // elbow
        {0.20, 0.90, 0.12},  // wrist (forearm hangs down and forward)
        {0.10, 0.90, 0.00},  // hip
    };
    const std::vector<Vector3d> pose_b = {
        {0.60, 0.90, 0.06},   // pelvis, off to the side
        {0.60, 1.25, 0.06},   // chest
        {0.45, 1.20, 0.06},   // shoulder
        {0.38, 1.05, 0.06},   // elbow
        {-0.15, 1.05, 0.06},  // wrist: forearm sweeps through A's waist and forearm
        {0.70, 0.90, 0.06},   // hip
    };
    s.motion = posed_motion(s.skeleton, pose_a, pose_b, frames, 0.0);
    return s;
}

// The acceptance scenes stay in the method's characteristic regime:
// centimeter-scale incidental interpenetration, predominantly cylinder
// contacts. Deeper or cuboid-on-cuboid configurations live in the stress
// tests (scene_torso_brush, scene_leg_tangle).
inline std::vector<Scene> interpenetration_suite() {
    return {scene_arms_cross(), scene_arm_lean(), scene_hug_waist(), scene_thigh_brush(),
            scene_slow_drift()};
}

// --- gradients ----------------------------------------------------------------------

// Central finite differences of the frozen-target collision objective
// f(J) = sum_i |c_i - p_i(J)|^2 over every joint coordinate of both persons.
struct FrozenObjective {
    const Skeleton* skel;
    const BodyModel* body_a;
    const BodyModel* body_b;
    struct Point {
        int person, segment, sample;
        Vector3d target;
    };
    std::vector<Point> points;

    double eval(std::span<const Vector3d> joints_a, std::span<const Vector3d> joints_b) const {
        const std::array<std::vector<SegmentFrame>, 2> frames = {segment_frames(*skel, joints_a),
                                                                 segment_frames(*skel, joints_b)};
        double total = 0.0;
        for (const Point& pt : points) {
            const BodyModel& model = pt.person == 0 ? *body_a : *body_b;
            const SegmentFrame& f = frames[pt.person][pt.segment];
            const Vector3d p = sample_world(model.params.segments[pt.segment], f,
                                            model.patterns[pt.segment].unit[pt.sample]);
            total += (pt.target - p).squaredNorm();
        }
        return total;
    }
};

inline FrozenObjective freeze_objective(const Skeleton& skel, const BodyModel& a,
                                        const BodyModel& b, const CollisionReport& report,
                                        const LossOutput& loss) {
    FrozenObjective obj;
    obj.skel = &skel;
    obj.body_a = &a;
    obj.body_b = &b;
    for (const LossOutput::Term& t : loss.terms) {
        const CollisionPoint& cp = report.points[t.point];
        obj.points.push_back(
            {cp.host_person, cp.host_segment, cp.sample_index, cp.p_world + t.d_eff});
    }
    return obj;
}

inline JointGradients finite_difference(const FrozenObjective& obj,
                                        std::vector<Vector3d> joints_a,
                                        std::vector<Vector3d> joints_b, double h = 1e-6) {
    JointGradients grads = JointGradients::zeros(int(joints_a.size()));
    for (int person = 0; person < 2; ++person) {
        auto& joints = person == 0 ? joints_a : joints_b;
        for (size_t j = 0; j < joints.size(); ++j) {
            for (int k = 0; k < 3; ++k) {
                const double saved = joints[j][k];
                joints[j][k] = saved + h;
                const double up = obj.eval(joints_a, joints_b);
                joints[j][k] = saved - h;
                const double down = obj.eval(joints_a, joints_b);
                joints[j][k] = saved;
                grads.per_person[person][j][k] = (up - down) / (2.0 * h);
            }
        }
    }
    return grads;
}

}  // namespace testing
