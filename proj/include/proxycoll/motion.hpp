#pragma once

#include <span>
#include <vector>

#include "proxycoll/math.hpp"

namespace proxycoll {

// Two-person motion: world joint positions indexed [frame][person][joint].
struct MotionSequence {
    static constexpr int kPersons = 2;
    int frames = 0;
    int joints = 0;
    std::vector<Vector3d> data;

    static MotionSequence zeros(int frames, int joints) {
        MotionSequence m;
        m.frames = frames;
        m.joints = joints;
        m.data.assign(size_t(frames) * kPersons * joints, Vector3d::Zero());
        return m;
    }

    Vector3d& at(int frame, int person, int joint) {
        return data[(size_t(frame) * kPersons + person) * joints + joint];
    }
    const Vector3d& at(int frame, int person, int joint) const {
        return data[(size_t(frame) * kPersons + person) * joints + joint];
    }

    std::span<const Vector3d> person_frame(int frame, int person) const {
        return {&data[(size_t(frame) * kPersons + person) * joints], size_t(joints)};
    }
    std::span<Vector3d> person_frame(int frame, int person) {
        return {&data[(size_t(frame) * kPersons + person) * joints], size_t(joints)};
    }

    void validate() const {
        if (frames < 1) throw std::invalid_argument("motion: frame count must be >= 1");
        if (joints < 1) throw std::invalid_argument("motion: joint count must be >= 1");
        if (data.size() != size_t(frames) * kPersons * joints)
            throw std::invalid_argument("motion: position array size mismatch");
        for (const Vector3d& p : data)
            if (!finite(p)) throw std::invalid_argument("motion: non-finite joint position");
    }
};

}  // namespace proxycoll
