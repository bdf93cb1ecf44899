#pragma once

#include <chrono>
#include <sys/resource.h>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "proxycoll/body_default.hpp"
#include "proxycoll/guidance.hpp"
#include "proxycoll/metrics.hpp"

namespace proxycoll {

struct BenchConfig {
    std::vector<int> sample_counts = {10, 30, 50};          // per primitive
    std::vector<int> mesh_vertex_counts = {128, 1024, 6890};  // baseline sizes
    int frames = 300;  // one "batch"
    int repetitions = 20;
    uint64_t seed = 0;
    int threads = 1;

    void validate() const {
        if (frames < 1 || repetitions < 5)
            throw std::invalid_argument("bench config: frames >= 1 and repetitions >= 5 required");
        for (int n : sample_counts)
            if (n < 1) throw std::invalid_argument("bench config: sample count must be positive");
        for (int n : mesh_vertex_counts)
            if (n < 1) throw std::invalid_argument("bench config: vertex count must be positive");
    }
};

struct BenchEntry {
    std::string label;
    int n = 0;
    double median_s = 0.0, p10_s = 0.0, p90_s = 0.0;
    std::vector<double> times_s;
};

struct BenchReport {
    std::vector<BenchEntry> proxy;
    std::vector<BenchEntry> proxy_parallel;  // populated when threads > 1
    std::vector<BenchEntry> baseline;
    double proxy_scaling_exponent = 0.0;
    double baseline_scaling_exponent = 0.0;
    double peak_rss_mb = 0.0;
};

// Deterministic two-person workload: person 1 walks through person 0, with a
// small limb sway on both, so a contiguous chunk of frames interpenetrates.
inline MotionSequence bench_scene(uint64_t seed, int frames) {
    const Skeleton skel = default_skeleton();
    const std::vector<Vector3d> rest = default_rest_pose();
    std::mt19937_64 rng(splitmix64(seed));
    std::uniform_real_distribution<double> jitter(-0.02, 0.02);

    MotionSequence motion = MotionSequence::zeros(frames, skel.joint_count());
    std::vector<Vector3d> noise(skel.joint_count());
    for (Vector3d& v : noise) v = Vector3d(jitter(rng), jitter(rng), jitter(rng));

    for (int f = 0; f < frames; ++f) {
        const double t = frames > 1 ? double(f) / double(frames - 1) : 0.0;
        const double sway = 0.05 * std::sin(2.0 * M_PI * t * 3.0);
        for (int j = 0; j < skel.joint_count(); ++j) {
            const Vector3d wobble = noise[j] * std::sin(2.0 * M_PI * t * 2.0 + j);
            motion.at(f, 0, j) = rest[j] + Vector3d(sway, 0, 0) + wobble;
            // person 1 crosses person 0 along x, passing through at t = 0.5
            const double cross = 1.2 - 2.4 * t;
            motion.at(f, 1, j) = rest[j] + Vector3d(cross - sway, 0, 0.05) - wobble;
        }
    }
    return motion;
}

namespace detail {

inline double peak_rss_mb() {
    std::ifstream status("/proc/self/status");
    std::string line;
    while (std::getline(status, line)) {
        if (line.rfind("VmHWM:", 0) == 0) {
            long kb = 0;
            std::sscanf(line.c_str(), "VmHWM: %ld", &kb);
            return double(kb) / 1024.0;
        }
    }
    rusage usage{};
    if (getrusage(RUSAGE_SELF, &usage) == 0) return double(usage.ru_maxrss) / 1024.0;
    return 0.0;
}

inline void summarize(BenchEntry* e) {
    std::vector<double> sorted = e->times_s;
    std::sort(sorted.begin(), sorted.end());
    const size_t n = sorted.size();
    e->median_s = sorted[n / 2];
    e->p10_s = sorted[size_t(0.1 * double(n - 1))];
    e->p90_s = sorted[size_t(0.9 * double(n - 1))];
}

// Least-squares slope of log(time) against log(n).
inline double fit_exponent(const std::vector<BenchEntry>& entries) {
    if (entries.size() < 2) return 0.0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const BenchEntry& e : entries) {
        const double x = std::log(double(e.n)), y = std::log(std::max(e.median_s, 1e-12));
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = double(entries.size());
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

template <typename Fn>
inline BenchEntry time_batches(const std::string& label, int n, int reps, Fn&& run) {
    BenchEntry e;
    e.label = label;
    e.n = n;
    run();  // warm-up, not recorded
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        run();
        const auto t1 = std::chrono::steady_clock::now();
        e.times_s.push_back(std::chrono::duration<double>(t1 - t0).count());
    }
    summarize(&e);
    return e;
}

// Fixed surface points standing in for mesh vertices, rigidly attached to the
// segments like the proxy samples are.
struct BaselineBody {
    std::vector<SamplePattern> patterns;  // per segment, truncated to V total

    static BaselineBody build(const Skeleton& skel, const ProxyParams& params,
                              std::span<const Vector3d> reference, int total_vertices,
                              uint64_t seed) {
        BaselineBody b;
        const auto frames = segment_frames(skel, reference);
        const int segs = skel.segment_count();
        int remaining = total_vertices;
        b.patterns.reserve(segs);
        for (int s = 0; s < segs; ++s) {
            const int share = std::max(1, (total_vertices + segs - 1) / segs);
            const int count = std::min(share, std::max(remaining, 1));
            const SegmentProxy& proxy = params.segments[s];
            const uint64_t seg_seed = splitmix64(seed ^ (0xbeefULL + uint64_t(s)));
            if (proxy.kind == PrimitiveKind::cylinder) {
                const double href = proxy.h_scale * std::max(frames[s].length, 1e-3);
                b.patterns.push_back(cylinder_pattern(proxy.radius, href, count, seg_seed));
            } else {
                b.patterns.push_back(cuboid_pattern(proxy.half_extents, count, seg_seed));
            }
            remaining -= count;
            if (remaining <= 0) remaining = 0;
        }
        return b;
    }

    std::vector<Vector3d> pose(const Skeleton& skel, const ProxyParams& params,
                               std::span<const Vector3d> joints) const {
        const auto frames = segment_frames(skel, joints);
        std::vector<Vector3d> out;
        for (size_t s = 0; s < patterns.size(); ++s) {
            if (frames[s].degenerate) continue;
            for (const Vector3d& u : patterns[s].unit)
                out.push_back(sample_world(params.segments[s], frames[s], u));
        }
        return out;
    }
};

}  // namespace detail

// Times the proxy collision pipeline (detect + guidance loss + joint
// gradients) against an all-pairs vertex-distance baseline on identical
// scenes.
inline BenchReport run_bench(const BenchConfig& config) {
    config.validate();
    const Skeleton skel = default_skeleton();
    const std::vector<Vector3d> rest = default_rest_pose();
    const MotionSequence motion = bench_scene(config.seed, config.frames);

    BenchReport report;
    for (int n : config.sample_counts) {
        ProxyParams params = default_proxy_params();
        params.samples_per_cylinder = n;
        params.samples_per_cuboid = n;
        const BodyModel body_a = BodyModel::build(skel, params, motion.person_frame(0, 0),
                                                  config.seed);
        const BodyModel body_b = BodyModel::build(skel, params, motion.person_frame(0, 1),
                                                  splitmix64(config.seed + 1));
        const auto run = [&] {
            double sink = 0.0;
            for (int f = 0; f < motion.frames; ++f) {
                const PosedBody pa = pose_body(body_a, motion.person_frame(f, 0));
                const PosedBody pb = pose_body(body_b, motion.person_frame(f, 1));
                CollisionReport rep = detect_frame(pa, pb);
                if (rep.points.empty()) continue;
                const auto guide = guidance_vectors(rep, pa, pb);
                const LossOutput loss = collision_loss(rep, guide, LossMode::aggregated);
                JointGradients grads = JointGradients::zeros(skel.joint_count());
                chain_to_joints(rep, loss, body_a, pa, motion.person_frame(f, 0), body_b, pb,
                                motion.person_frame(f, 1), &grads);
                sink += loss.value;
            }
            volatile double keep = sink;
            (void)keep;
        };
        report.proxy.push_back(detail::time_batches("proxy_" + std::to_string(n) + "x" +
                                                        std::to_string(skel.segment_count()),
                                                    n * skel.segment_count(), config.repetitions,
                                                    run));
        if (config.threads > 1) {
            // parallel mode is reported separately so the single-threaded
            // numbers stay interpretable
            const auto run_parallel = [&] {
                std::vector<double> sink(motion.frames, 0.0);
                parallel_for(motion.frames, config.threads, [&](int f) {
                    const PosedBody pa = pose_body(body_a, motion.person_frame(f, 0));
                    const PosedBody pb = pose_body(body_b, motion.person_frame(f, 1));
                    CollisionReport rep = detect_frame(pa, pb);
                    if (rep.points.empty()) return;
                    const auto guide = guidance_vectors(rep, pa, pb);
                    const LossOutput loss = collision_loss(rep, guide, LossMode::aggregated);
                    JointGradients grads = JointGradients::zeros(skel.joint_count());
                    chain_to_joints(rep, loss, body_a, pa, motion.person_frame(f, 0), body_b,
                                    pb, motion.person_frame(f, 1), &grads);
                    sink[f] = loss.value;
                });
                volatile double keep = sink.empty() ? 0.0 : sink[0];
                (void)keep;
            };
            report.proxy_parallel.push_back(detail::time_batches(
                "proxy_" + std::to_string(n) + "x" + std::to_string(skel.segment_count()) +
                    "_mt" + std::to_string(config.threads),
                n * skel.segment_count(), config.repetitions, run_parallel));
        }
    }

    const ProxyParams base_params = default_proxy_params();
    for (int v : config.mesh_vertex_counts) {
        const auto body_a = detail::BaselineBody::build(skel, base_params,
                                                        motion.person_frame(0, 0), v, config.seed);
        const auto body_b = detail::BaselineBody::build(
            skel, base_params, motion.person_frame(0, 1), v, splitmix64(config.seed + 1));
        const auto run = [&] {
            double sink = 0.0;
            for (int f = 0; f < motion.frames; ++f) {
                const auto pts_a = body_a.pose(skel, base_params, motion.person_frame(f, 0));
                const auto pts_b = body_b.pose(skel, base_params, motion.person_frame(f, 1));
                for (const Vector3d& p : pts_a) {
                    double best = std::numeric_limits<double>::infinity();
                    for (const Vector3d& q : pts_b) best = std::min(best, (p - q).squaredNorm());
                    sink += best;
                }
            }
            volatile double keep = sink;
            (void)keep;
        };
        report.baseline.push_back(
            detail::time_batches("vertex_" + std::to_string(v), v, config.repetitions, run));
    }

    report.proxy_scaling_exponent = detail::fit_exponent(report.proxy);
    report.baseline_scaling_exponent = detail::fit_exponent(report.baseline);
    report.peak_rss_mb = detail::peak_rss_mb();
    return report;
}

}  // namespace proxycoll
