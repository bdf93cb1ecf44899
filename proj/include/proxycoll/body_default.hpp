#pragma once

#include <vector>

#include "proxycoll/skeleton.hpp"

namespace proxycoll {

// Default 22-joint body with 19 proxy-carrying segments. The joint list
// follows the common mocap ordering (pelvis root, y up); the segment list is
// this project's reconstruction of a 19-primitive cover: three torso cuboids
// plus cylinders for neck, head, hips and limbs.
inline Skeleton default_skeleton() {
    Skeleton s;
    const auto J = [&](const char* name, int parent) { s.joints.push_back({name, parent}); };
    J("pelvis", -1);        // 0
    J("left_hip", 0);       // 1
    J("right_hip", 0);      // 2
    J("spine1", 0);         // 3
    J("left_knee", 1);      // 4
    J("right_knee", 2);     // 5
    J("spine2", 3);         // 6
    J("left_ankle", 4);     // 7
    J("right_ankle", 5);    // 8
    J("spine3", 6);         // 9
    J("left_foot", 7);      // 10
    J("right_foot", 8);     // 11
    J("neck", 9);           // 12
    J("left_collar", 9);    // 13
    J("right_collar", 9);   // 14
    J("head", 12);          // 15
    J("left_shoulder", 13); // 16
    J("right_shoulder", 14);// 17
    J("left_elbow", 16);    // 18
    J("right_elbow", 17);   // 19
    J("left_wrist", 18);    // 20
    J("right_wrist", 19);   // 21

    const auto S = [&](const char* name, int a, int b, PrimitiveKind kind) {
        Segment seg;
        seg.name = name;
        seg.joint_a = a;
        seg.joint_b = b;
        seg.kind = kind;
        s.segments.push_back(seg);
    };
    const auto cyl = PrimitiveKind::cylinder;
    const auto box = PrimitiveKind::cuboid;
    S("torso_lower", 0, 3, box);
    S("torso_mid", 3, 6, box);
    S("torso_upper", 6, 9, box);
    S("left_pelvis", 0, 1, cyl);
    S("right_pelvis", 0, 2, cyl);
    S("left_thigh", 1, 4, cyl);
    S("right_thigh", 2, 5, cyl);
    S("left_shin", 4, 7, cyl);
    S("right_shin", 5, 8, cyl);
    S("left_foot", 7, 10, cyl);
    S("right_foot", 8, 11, cyl);
    S("neck", 9, 12, cyl);
    S("head", 12, 15, cyl);
    S("left_clavicle", 13, 16, cyl);
    S("right_clavicle", 14, 17, cyl);
    S("left_upper_arm", 16, 18, cyl);
    S("right_upper_arm", 17, 19, cyl);
    S("left_forearm", 18, 20, cyl);
    S("right_forearm", 19, 21, cyl);
    s.finalize();
    return s;
}

// Neutral standing pose matching default_skeleton (T-pose, arms along +-x,
// y up, meters).
inline std::vector<Vector3d> default_rest_pose() {
    return {
        {0.00, 0.95, 0.00},   // pelvis
        {0.09, 0.91, 0.00},   // left_hip
        {-0.09, 0.91, 0.00},  // right_hip
        {0.00, 1.07, 0.00},   // spine1
        {0.10, 0.50, 0.00},   // left_knee
        {-0.10, 0.50, 0.00},  // right_knee
        {0.00, 1.19, 0.00},   // spine2
        {0.10, 0.10, 0.00},   // left_ankle
        {-0.10, 0.10, 0.00},  // right_ankle
        {0.00, 1.31, 0.00},   // spine3
        {0.10, 0.03, 0.12},   // left_foot
        {-0.10, 0.03, 0.12},  // right_foot
        {0.00, 1.43, 0.00},   // neck
        {0.06, 1.39, 0.00},   // left_collar
        {-0.06, 1.39, 0.00},  // right_collar
        {0.00, 1.58, 0.00},   // head
        {0.17, 1.40, 0.00},   // left_shoulder
        {-0.17, 1.40, 0.00},  // right_shoulder
        {0.45, 1.40, 0.00},   // left_elbow
        {-0.45, 1.40, 0.00},  // right_elbow
        {0.70, 1.40, 0.00},   // left_wrist
        {-0.70, 1.40, 0.00},  // right_wrist
    };
}

// Hand-set plausible dimensions for the default body; fitting replaces these
// with per-shape values.
inline ProxyParams default_proxy_params() {
    const Skeleton skel = default_skeleton();
    ProxyParams params;
    params.segments.resize(skel.segment_count());
    for (int i = 0; i < skel.segment_count(); ++i) {
        SegmentProxy& p = params.segments[i];
        p.kind = skel.segments[i].kind;
        const std::string& name = skel.segments[i].name;
        if (p.kind == PrimitiveKind::cuboid) {
            p.half_extents = Vector3d(0.13, 0.09, 0.07);
        } else if (name.find("thigh") != std::string::npos) {
            p.radius = 0.07;
        } else if (name.find("shin") != std::string::npos) {
            p.radius = 0.05;
        } else if (name.find("pelvis") != std::string::npos) {
            p.radius = 0.07;
        } else if (name == "head") {
            p.radius = 0.09;
        } else if (name == "neck") {
            p.radius = 0.05;
        } else if (name.find("foot") != std::string::npos) {
            p.radius = 0.04;
        } else if (name.find("clavicle") != std::string::npos) {
            p.radius = 0.05;
        } else if (name.find("upper_arm") != std::string::npos) {
            p.radius = 0.045;
        } else {
            p.radius = 0.04;  // forearms
        }
    }
    return params;
}

}  // namespace proxycoll
