#pragma once

#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "proxycoll/motion.hpp"
#include "proxycoll/skeleton.hpp"

namespace proxycoll {

using nlohmann::json;

// Rejects configuration objects carrying keys outside the allowed set; the
// diagnostic names the offending key.
inline void require_known_keys(const json& obj, std::initializer_list<const char*> allowed,
                               const std::string& context) {
    for (const auto& [key, value] : obj.items()) {
        bool known = false;
        for (const char* a : allowed)
            if (key == a) {
                known = true;
                break;
            }
        if (!known)
            throw std::invalid_argument(context + ": unknown key '" + key + "'");
    }
}

// --- skeleton ----------------------------------------------------------------

inline Skeleton skeleton_from_json(const json& doc) {
    Skeleton s;
    if (!doc.contains("joints") || !doc.contains("segments"))
        throw std::invalid_argument("skeleton: missing 'joints' or 'segments'");
    for (const json& j : doc.at("joints")) {
        Joint joint;
        joint.name = j.at("name").get<std::string>();
        joint.parent = j.at("parent").is_null() ? -1 : j.at("parent").get<int>();
        s.joints.push_back(joint);
    }
    for (const json& j : doc.at("segments")) {
        Segment seg;
        seg.name = j.at("name").get<std::string>();
        seg.joint_a = j.at("joint_a").get<int>();
        seg.joint_b = j.at("joint_b").get<int>();
        const std::string kind = j.at("primitive").get<std::string>();
        if (kind == "cylinder") seg.kind = PrimitiveKind::cylinder;
        else if (kind == "cuboid") seg.kind = PrimitiveKind::cuboid;
        else throw std::invalid_argument("skeleton: unknown primitive kind '" + kind + "'");
        s.segments.push_back(seg);
    }
    s.finalize();
    return s;
}

inline json skeleton_to_json(const Skeleton& s) {
    json joints = json::array();
    for (const Joint& j : s.joints)
        joints.push_back({{"name", j.name},
                          {"parent", j.parent < 0 ? json(nullptr) : json(j.parent)}});
    json segments = json::array();
    for (const Segment& seg : s.segments)
        segments.push_back({{"name", seg.name},
                            {"joint_a", seg.joint_a},
                            {"joint_b", seg.joint_b},
                            {"primitive", kind_name(seg.kind)}});
    return {{"joints", joints}, {"segments", segments}};
}

// --- proxy parameters ---------------------------------------------------------

inline ProxyParams params_from_json(const json& doc) {
    ProxyParams p;
    for (const json& j : doc.at("segments")) {
        SegmentProxy seg;
        const std::string kind = j.at("kind").get<std::string>();
        if (kind == "cylinder") {
            seg.kind = PrimitiveKind::cylinder;
            seg.radius = j.at("r").get<double>();
            seg.h_scale = j.at("h_scale").get<double>();
        } else if (kind == "cuboid") {
            seg.kind = PrimitiveKind::cuboid;
            const auto he = j.at("half_extents");
            if (he.size() != 3)
                throw std::invalid_argument("proxy params: half_extents needs 3 values");
            seg.half_extents = Vector3d(he[0].get<double>(), he[1].get<double>(),
                                        he[2].get<double>());
        } else {
            throw std::invalid_argument("proxy params: unknown kind '" + kind + "'");
        }
        p.segments.push_back(seg);
    }
    p.samples_per_cylinder = doc.value("samples_per_cylinder", 30);
    p.samples_per_cuboid = doc.value("samples_per_cuboid", 36);
    return p;
}

inline json params_to_json(const ProxyParams& p) {
    json segments = json::array();
    for (const SegmentProxy& seg : p.segments) {
        if (seg.kind == PrimitiveKind::cylinder) {
            segments.push_back({{"kind", "cylinder"}, {"r", seg.radius},
                                {"h_scale", seg.h_scale}});
        } else {
            segments.push_back({{"kind", "cuboid"},
                                {"half_extents", {seg.half_extents.x(), seg.half_extents.y(),
                                                  seg.half_extents.z()}}});
        }
    }
    return {{"segments", segments},
            {"samples_per_cylinder", p.samples_per_cylinder},
            {"samples_per_cuboid", p.samples_per_cuboid}};
}

// --- motion -------------------------------------------------------------------

inline MotionSequence motion_from_json(const json& doc) {
    MotionSequence m;
    if (doc.value("persons", 0) != 2)
        throw std::invalid_argument("motion: 'persons' must be 2");
    m.frames = doc.at("frames").get<int>();
    m.joints = doc.at("joints").get<int>();
    const json& pos = doc.at("positions");
    const size_t expected = size_t(m.frames) * 2 * m.joints * 3;
    if (pos.size() != expected)
        throw std::invalid_argument("motion: positions length " + std::to_string(pos.size()) +
                                    " does not match frames*2*joints*3");
    m.data.resize(expected / 3);
    for (size_t i = 0; i < m.data.size(); ++i)
        m.data[i] = Vector3d(pos[3 * i].get<double>(), pos[3 * i + 1].get<double>(),
                             pos[3 * i + 2].get<double>());
    m.validate();
    return m;
}

inline json motion_to_json(const MotionSequence& m) {
    json pos = json::array();
    for (const Vector3d& p : m.data) {
        pos.push_back(p.x());
        pos.push_back(p.y());
        pos.push_back(p.z());
    }
    return {{"persons", 2}, {"frames", m.frames}, {"joints", m.joints}, {"positions", pos}};
}

namespace detail {

constexpr char kMotionMagic[4] = {'P', 'C', 'M', 'O'};

inline uint32_t read_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    return uint32_t(b[0]) | (uint32_t(b[1]) << 8) | (uint32_t(b[2]) << 16) |
           (uint32_t(b[3]) << 24);
}

inline void write_u32(std::ostream& out, uint32_t v) {
    const unsigned char b[4] = {(unsigned char)(v & 0xff), (unsigned char)((v >> 8) & 0xff),
                                (unsigned char)((v >> 16) & 0xff),
                                (unsigned char)((v >> 24) & 0xff)};
    out.write(reinterpret_cast<const char*>(b), 4);
}

}  // namespace detail

// Binary layout: "PCMO", u32 frames, u32 joints, u32 persons, then
// frames*persons*joints*3 little-endian float64.
inline MotionSequence motion_from_binary(std::istream& in) {
    char magic[4];
    in.read(magic, 4);
    if (!in || std::memcmp(magic, detail::kMotionMagic, 4) != 0)
        throw std::invalid_argument("motion: bad binary magic");
    MotionSequence m;
    m.frames = int(detail::read_u32(in));
    m.joints = int(detail::read_u32(in));
    const uint32_t persons = detail::read_u32(in);
    if (persons != 2) throw std::invalid_argument("motion: 'persons' must be 2");
    m.data.resize(size_t(m.frames) * 2 * m.joints);
    for (Vector3d& p : m.data) {
        double xyz[3];
        in.read(reinterpret_cast<char*>(xyz), sizeof xyz);
        p = Vector3d(xyz[0], xyz[1], xyz[2]);
    }
    if (!in) throw std::invalid_argument("motion: truncated binary payload");
    m.validate();
    return m;
}

inline void motion_to_binary(const MotionSequence& m, std::ostream& out) {
    out.write(detail::kMotionMagic, 4);
    detail::write_u32(out, uint32_t(m.frames));
    detail::write_u32(out, uint32_t(m.joints));
    detail::write_u32(out, 2);
    for (const Vector3d& p : m.data) {
        const double xyz[3] = {p.x(), p.y(), p.z()};
        out.write(reinterpret_cast<const char*>(xyz), sizeof xyz);
    }
}

// --- files --------------------------------------------------------------------

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);
    json doc;
    in >> doc;
    return doc;
}

inline void save_json_file(const json& doc, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::invalid_argument("cannot write " + path);
    out << doc.dump(2) << '\n';
}

inline Skeleton load_skeleton_file(const std::string& path) {
    return skeleton_from_json(load_json_file(path));
}

inline ProxyParams load_params_file(const std::string& path) {
    return params_from_json(load_json_file(path));
}

// Sniffs the magic bytes to pick the binary or JSON reader.
inline MotionSequence load_motion_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::invalid_argument("cannot open " + path);
    char magic[4] = {0, 0, 0, 0};
    in.read(magic, 4);
    in.seekg(0);
    if (std::memcmp(magic, detail::kMotionMagic, 4) == 0) return motion_from_binary(in);
    json doc;
    in >> doc;
    return motion_from_json(doc);
}

inline void save_motion_file(const MotionSequence& m, const std::string& path,
                             bool binary = false) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot write " + path);
    if (binary) {
        motion_to_binary(m, out);
    } else {
        out << motion_to_json(m).dump() << '\n';
    }
}

// Single-pose file: {"joints": N, "positions": [N*3 floats]}.
inline std::vector<Vector3d> pose_from_json(const json& doc) {
    const int joints = doc.at("joints").get<int>();
    const json& pos = doc.at("positions");
    if (int(pos.size()) != joints * 3)
        throw std::invalid_argument("pose: positions length does not match joints*3");
    std::vector<Vector3d> out(joints);
    for (int i = 0; i < joints; ++i)
        out[i] = Vector3d(pos[3 * i].get<double>(), pos[3 * i + 1].get<double>(),
                          pos[3 * i + 2].get<double>());
    return out;
}

inline std::vector<Vector3d> load_pose_file(const std::string& path) {
    return pose_from_json(load_json_file(path));
}

}  // namespace proxycoll
