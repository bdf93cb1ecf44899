#pragma once

#include <unordered_map>
#include <vector>

#include "proxycoll/collision.hpp"
#include "proxycoll/mesh.hpp"
#include "proxycoll/parallel.hpp"
#include "proxycoll/skeleton.hpp"

namespace proxycoll {

// Maps every mesh vertex to the segment whose joint line is nearest.
struct RegionAssignment {
    std::vector<int> region_of_vertex;
    int region_count = 0;
};

namespace detail {

inline double point_segment_dist2(const Vector3d& p, const Vector3d& a, const Vector3d& b) {
    const Vector3d ab = b - a;
    const double len2 = ab.squaredNorm();
    if (len2 < kDegenerateLength * kDegenerateLength) return (p - a).squaredNorm();
    const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
    return (p - (a + t * ab)).squaredNorm();
}

// Exact nearest-neighbor queries over a static point set. Cells are scanned in
// expanding Chebyshev shells; the search stops once the best squared distance
// is within the bound no unscanned cell can beat.
class PointGrid {
public:
    void build(const std::vector<Vector3d>& points) {
        pts_ = &points;
        Vector3d lo = points.front(), hi = points.front();
        for (const Vector3d& p : points) {
            lo = lo.cwiseMin(p);
            hi = hi.cwiseMax(p);
        }
        origin_ = lo;
        const double extent = (hi - lo).maxCoeff();
        const double target_cells = std::cbrt(double(points.size()));
        cell_ = std::max(extent / std::max(target_cells, 1.0), 1e-6);
        cells_.clear();
        for (size_t i = 0; i < points.size(); ++i) cells_[key_of(points[i])].push_back(int(i));
    }

    std::pair<int, double> nearest(const Vector3d& q) const {
        const auto [qi, qj, qk] = cell_coords(q);
        int best = -1;
        double best_d2 = std::numeric_limits<double>::infinity();
        for (int radius = 0;; ++radius) {
            scan_shell(q, qi, qj, qk, radius, &best, &best_d2);
            // Cells at Chebyshev distance > radius hold points at least
            // radius*cell away from q's cell border.
            const double bound = double(radius) * cell_;
            if (best >= 0 && best_d2 <= bound * bound) break;
            if (best >= 0 && radius > max_radius_guard()) break;
        }
        return {best, best_d2};
    }

private:
    static constexpr int64_t kOffset = 1 << 20;

    std::tuple<int64_t, int64_t, int64_t> cell_coords(const Vector3d& p) const {
        return {int64_t(std::floor((p.x() - origin_.x()) / cell_)),
                int64_t(std::floor((p.y() - origin_.y()) / cell_)),
                int64_t(std::floor((p.z() - origin_.z()) / cell_))};
    }

    uint64_t key_of(const Vector3d& p) const {
        const auto [i, j, k] = cell_coords(p);
        return pack(i, j, k);
    }

    static uint64_t pack(int64_t i, int64_t j, int64_t k) {
        return (uint64_t(i + kOffset) << 42) | (uint64_t(j + kOffset) << 21) |
               uint64_t(k + kOffset);
    }

    int max_radius_guard() const { return 4 << 10; }

    void scan_shell(const Vector3d& q, int64_t qi, int64_t qj, int64_t qk, int radius, int* best,
                    double* best_d2) const {
        for (int64_t di = -radius; di <= radius; ++di) {
            for (int64_t dj = -radius; dj <= radius; ++dj) {
                for (int64_t dk = -radius; dk <= radius; ++dk) {
                    if (std::max({std::abs(di), std::abs(dj), std::abs(dk)}) != radius) continue;
                    const auto it = cells_.find(pack(qi + di, qj + dj, qk + dk));
                    if (it == cells_.end()) continue;
                    for (int idx : it->second) {
                        const double d2 = ((*pts_)[idx] - q).squaredNorm();
                        if (d2 < *best_d2) {
                            *best_d2 = d2;
                            *best = idx;
                        }
                    }
                }
            }
        }
    }

    const std::vector<Vector3d>* pts_ = nullptr;
    Vector3d origin_ = Vector3d::Zero();
    double cell_ = 1.0;
    std::unordered_map<uint64_t, std::vector<int>> cells_;
};

}  // namespace detail

inline RegionAssignment assign_regions(const TriangleMesh& mesh, const Skeleton& skel,
                                       std::span<const Vector3d> rest_pose) {
    mesh.validate();
    if (mesh.vertices.empty()) throw std::invalid_argument("assign_regions: empty mesh");
    if (int(rest_pose.size()) != skel.joint_count())
        throw std::invalid_argument("assign_regions: pose/skeleton mismatch");

    RegionAssignment out;
    out.region_count = skel.segment_count();
    out.region_of_vertex.resize(mesh.vertices.size());
    for (size_t v = 0; v < mesh.vertices.size(); ++v) {
        int best = 0;
        double best_d2 = std::numeric_limits<double>::infinity();
        for (int s = 0; s < skel.segment_count(); ++s) {
            const Segment& seg = skel.segments[s];
            const double d2 = detail::point_segment_dist2(
                mesh.vertices[v], rest_pose[seg.joint_a], rest_pose[seg.joint_b]);
            if (d2 < best_d2) {  // strict: ties keep the lower segment index
                best_d2 = d2;
                best = s;
            }
        }
        out.region_of_vertex[v] = best;
    }
    return out;
}

struct FitConfig {
    double learning_rate = 1e-2;
    int max_iters = 2000;
    double convergence_tol = 1e-8;
    int samples_per_cylinder = 30;
    int samples_per_cuboid = 36;
    uint64_t seed = 0;

    void validate() const {
        if (learning_rate <= 0 || convergence_tol <= 0 || max_iters < 0 ||
            samples_per_cylinder < 1 || samples_per_cuboid < 1)
            throw std::invalid_argument("fit config: values must be positive");
    }
};

struct FitReport {
    double final_loss = 0.0;
    int iters = 0;
    std::vector<double> loss_history;
    std::vector<std::string> warnings;
};

namespace detail {

struct RegionPoints {
    std::vector<Vector3d> points;
    PointGrid grid;
};

inline std::vector<RegionPoints> collect_regions(const TriangleMesh& mesh,
                                                 const RegionAssignment& regions) {
    std::vector<RegionPoints> out(regions.region_count);
    for (size_t v = 0; v < mesh.vertices.size(); ++v)
        out[regions.region_of_vertex[v]].points.push_back(mesh.vertices[v]);
    for (RegionPoints& r : out)
        if (!r.points.empty()) r.grid.build(r.points);
    return out;
}

}  // namespace detail

// Fitting loss of the proxy set against the mesh: for every surface sample of
// every primitive, the squared distance to the nearest mesh point of that
// primitive's region, summed. Empty regions contribute zero.
inline double fit_loss(const ProxyParams& params, const TriangleMesh& mesh,
                       const RegionAssignment& regions, const Skeleton& skel,
                       std::span<const Vector3d> rest_pose, uint64_t seed = 0,
                       std::vector<std::string>* warnings = nullptr) {
    params.validate_against(skel);
    if (int(mesh.vertices.size()) != int(regions.region_of_vertex.size()))
        throw std::invalid_argument("fit_loss: regions inconsistent with mesh");
    const auto region_pts = detail::collect_regions(mesh, regions);
    const BodyModel model = BodyModel::build(skel, params, rest_pose, seed);
    const PosedBody posed = pose_body(model, rest_pose);

    double loss = 0.0;
    for (int s = 0; s < skel.segment_count(); ++s) {
        if (posed.world_samples[s].empty()) {
            if (warnings) warnings->push_back("segment " + skel.segments[s].name +
                                              ": degenerate in rest pose, skipped");
            continue;
        }
        if (region_pts[s].points.empty()) {
            if (warnings)
                warnings->push_back("segment " + skel.segments[s].name + ": empty mesh region");
            continue;
        }
        for (const Vector3d& q : posed.world_samples[s])
            loss += region_pts[s].grid.nearest(q).second;
    }
    return loss;
}

// Builds a starting point for the optimizer from per-region point statistics.
inline ProxyParams initial_proxy_guess(const TriangleMesh& mesh, const RegionAssignment& regions,
                                       const Skeleton& skel,
                                       std::span<const Vector3d> rest_pose,
                                       int samples_per_cylinder = 30,
                                       int samples_per_cuboid = 36) {
    const auto frames = segment_frames(skel, rest_pose);
    ProxyParams params;
    params.samples_per_cylinder = samples_per_cylinder;
    params.samples_per_cuboid = samples_per_cuboid;
    params.segments.resize(skel.segment_count());
    std::vector<double> radial_sum(skel.segment_count(), 0.0);
    std::vector<Vector3d> extent(skel.segment_count(), Vector3d::Zero());
    std::vector<int> count(skel.segment_count(), 0);
    for (size_t v = 0; v < mesh.vertices.size(); ++v) {
        const int s = regions.region_of_vertex[v];
        const SegmentFrame& f = frames[s];
        if (f.degenerate) continue;
        const Vector3d local = f.basis.transpose() * (mesh.vertices[v] - f.origin);
        radial_sum[s] += std::hypot(local.x(), local.y());
        const Vector3d centered(local.x(), local.y(), local.z() - 0.5 * f.length);
        extent[s] = extent[s].cwiseMax(centered.cwiseAbs());
        ++count[s];
    }
    for (int s = 0; s < skel.segment_count(); ++s) {
        SegmentProxy& p = params.segments[s];
        p.kind = skel.segments[s].kind;
        if (count[s] == 0) continue;
        if (p.kind == PrimitiveKind::cylinder) {
            p.radius = std::max(radial_sum[s] / count[s], 1e-3);
            p.h_scale = 1.0;
        } else {
            p.half_extents = extent[s].cwiseMax(Vector3d::Constant(1e-3));
        }
    }
    return params;
}

// Gradient descent on primitive dimensions. The sample layout is frozen from
// the starting dimensions; nearest mesh points are refreshed every iteration
// and held fixed inside it (subgradient of the min term).
inline ProxyParams fit_proxies(const TriangleMesh& mesh, const Skeleton& skel,
                               std::span<const Vector3d> rest_pose, const FitConfig& config,
                               FitReport* report, const ProxyParams* init = nullptr) {
    config.validate();
    const RegionAssignment regions = assign_regions(mesh, skel, rest_pose);
    const auto region_pts = detail::collect_regions(mesh, regions);
    ProxyParams params = init ? *init
                              : initial_proxy_guess(mesh, regions, skel, rest_pose,
                                                    config.samples_per_cylinder,
                                                    config.samples_per_cuboid);
    params.samples_per_cylinder = config.samples_per_cylinder;
    params.samples_per_cuboid = config.samples_per_cuboid;
    params.validate_against(skel);

    const auto [lo, hi] = mesh.bounds();
    const double max_dim = (hi - lo).norm();
    const double min_dim = 1e-3;  // 1 mm floor

    const auto frames = segment_frames(skel, rest_pose);
    const BodyModel model = BodyModel::build(skel, params, rest_pose, config.seed);

    FitReport rep;
    for (int s = 0; s < skel.segment_count(); ++s) {
        if (frames[s].degenerate)
            rep.warnings.push_back("segment " + skel.segments[s].name +
                                   ": degenerate in rest pose, skipped");
        else if (region_pts[s].points.empty())
            rep.warnings.push_back("segment " + skel.segments[s].name + ": empty mesh region");
    }
    const auto eval = [&](const ProxyParams& p, bool with_grad,
                          std::vector<std::array<double, 3>>* grad) -> double {
        double loss = 0.0;
        for (int s = 0; s < skel.segment_count(); ++s) {
            if (frames[s].degenerate || region_pts[s].points.empty()) continue;
            const SegmentProxy& proxy = p.segments[s];
            const SegmentFrame& f = frames[s];
            for (const Vector3d& unit : model.patterns[s].unit) {
                const Vector3d q = sample_world(proxy, f, unit);
                const auto [idx, d2] = region_pts[s].grid.nearest(q);
                loss += d2;
                if (!with_grad) continue;
                const Vector3d diff = 2.0 * (q - region_pts[s].points[idx]);
                auto& g = (*grad)[s];
                if (proxy.kind == PrimitiveKind::cylinder) {
                    const Vector3d dq_dr = unit.x() * f.basis.col(0) + unit.y() * f.basis.col(1);
                    g[0] += diff.dot(dq_dr);
                    g[1] += diff.dot(unit.z() * f.length * f.axis);
                } else {
                    for (int k = 0; k < 3; ++k) g[k] += diff.dot(unit[k] * f.basis.col(k));
                }
            }
        }
        return loss;
    };

    double loss = eval(params, false, nullptr);
    rep.loss_history.push_back(loss);
    int flat_streak = 0;
    for (int iter = 0; iter < config.max_iters; ++iter) {
        std::vector<std::array<double, 3>> grad(skel.segment_count(), {0.0, 0.0, 0.0});
        const double before = eval(params, true, &grad);
        if (!std::isfinite(before))
            throw numerical_error("fit_proxies: non-finite loss at iteration " +
                                  std::to_string(iter));
        for (int s = 0; s < skel.segment_count(); ++s) {
            SegmentProxy& proxy = params.segments[s];
            if (proxy.kind == PrimitiveKind::cylinder) {
                proxy.radius = std::clamp(proxy.radius - config.learning_rate * grad[s][0],
                                          min_dim, max_dim);
                proxy.h_scale = std::clamp(proxy.h_scale - config.learning_rate * grad[s][1],
                                           min_dim, max_dim);
            } else {
                for (int k = 0; k < 3; ++k)
                    proxy.half_extents[k] =
                        std::clamp(proxy.half_extents[k] - config.learning_rate * grad[s][k],
                                   min_dim, max_dim);
            }
        }
        const double after = eval(params, false, nullptr);
        if (!std::isfinite(after))
            throw numerical_error("fit_proxies: non-finite loss at iteration " +
                                  std::to_string(iter));
        rep.loss_history.push_back(after);
        rep.iters = iter + 1;
        flat_streak = (std::abs(after - loss) < config.convergence_tol) ? flat_streak + 1 : 0;
        loss = after;
        if (flat_streak >= 10) break;
    }
    rep.final_loss = loss;
    if (report) *report = std::move(rep);
    return params;
}

}  // namespace proxycoll
