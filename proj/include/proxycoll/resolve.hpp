#pragma once

#include <string>
#include <vector>

#include "proxycoll/guidance.hpp"
#include "proxycoll/metrics.hpp"
#include "proxycoll/motion.hpp"

namespace proxycoll {

struct ResolveConfig {
    double lambda_coll = 10.0;    // adaption-mode weight
    double lambda_anchor = 1.0;   // pose fidelity
    double lambda_bone = 100.0;   // bone-length preservation
    double lambda_smooth = 30.0;  // temporal velocity preservation
    double learning_rate = 5e-3;
    // Trust-region cap: no joint moves farther than this in one iteration.
    // The collision gradient scales with the number of colliding samples, so
    // an uncapped first step can tear the pose apart before the regularizers
    // react.
    double max_step = 0.001;
    int max_iters = 500;
    uint64_t seed = 0;
    LossMode loss_mode = LossMode::aggregated;
    AntipodalOn antipodal_on = AntipodalOn::host;
    int threads = 1;
    bool step_halving = true;

    void validate() const {
        if (lambda_coll < 0 || lambda_anchor < 0 || lambda_bone < 0 || lambda_smooth < 0)
            throw std::invalid_argument("resolve config: weights must be >= 0");
        if (learning_rate <= 0) throw std::invalid_argument("resolve config: learning rate");
        if (max_iters < 0) throw std::invalid_argument("resolve config: max_iters");
    }

    static ResolveConfig preset(const std::string& name) {
        ResolveConfig c;
        if (name == "adaption") {
            c.lambda_coll = 10.0;
        } else if (name == "scratch") {
            c.lambda_coll = 0.1;
        } else {
            throw std::invalid_argument("unknown preset '" + name + "'");
        }
        return c;
    }
};

struct ResolveIterate {
    int iter = 0;
    double total = 0.0, coll = 0.0, anchor = 0.0, bone = 0.0, smooth = 0.0;
    int collision_points = 0;
    double lr = 0.0;
    bool accepted = true;
};

struct ResolveReport {
    int iterations = 0;
    int accepted_steps = 0;
    std::vector<ResolveIterate> loss_curve;
    double coll_dis_before = 0.0, coll_dis_after = 0.0;
    double coll_ro_before = 0.0, coll_ro_after = 0.0;
    double max_bone_drift_pct = 0.0;
    double max_joint_displacement = 0.0;
    int transient_increases = 0;  // re-detected loss rose between iterations
    std::string stop_reason;
};

namespace detail {

// Per-frame snapshot of the frozen collision state for one optimizer step.
struct FrozenFrame {
    struct Point {
        int host_person, host_segment, sample_index;
        Vector3d target;  // p + d_eff at freeze time
        Vector3d d_eff;
    };
    std::vector<Point> points;
};

struct RegularizerTerms {
    double anchor = 0.0, bone = 0.0, smooth = 0.0;
};

struct BoneEdge {
    int child, parent;
};

inline std::vector<BoneEdge> bone_edges(const Skeleton& skel) {
    std::vector<BoneEdge> edges;
    for (int j = 0; j < skel.joint_count(); ++j)
        if (skel.joints[j].parent >= 0) edges.push_back({j, skel.joints[j].parent});
    return edges;
}

}  // namespace detail

// Gradient descent on all joint positions of both persons: collision loss
// (targets re-frozen each iteration) plus anchor/bone/velocity regularizers
// against the input sequence. Steps that would increase the frozen objective
// are rejected and the step size halved; the re-detected loss may still rise
// transiently, which the report counts.
inline MotionSequence resolve_sequence(const MotionSequence& input, const ProxyParams& params_a,
                                       const ProxyParams& params_b, const Skeleton& skel,
                                       const ResolveConfig& config, ResolveReport* report) {
    config.validate();
    input.validate();
    if (input.joints != skel.joint_count())
        throw std::invalid_argument("resolve: motion/skeleton joint count mismatch");

    const BodyModel body_a = BodyModel::build(skel, params_a, input.person_frame(0, 0), config.seed);
    const BodyModel body_b =
        BodyModel::build(skel, params_b, input.person_frame(0, 1), splitmix64(config.seed + 1));

    const auto edges = detail::bone_edges(skel);
    const int F = input.frames, J = input.joints;

    // Reference quantities from the input sequence.
    std::vector<double> bone_init(size_t(F) * 2 * edges.size());
    for (int f = 0; f < F; ++f)
        for (int p = 0; p < 2; ++p)
            for (size_t e = 0; e < edges.size(); ++e)
                bone_init[(size_t(f) * 2 + p) * edges.size() + e] =
                    (input.at(f, p, edges[e].child) - input.at(f, p, edges[e].parent)).norm();

    MotionSequence x = input;
    ResolveReport rep;
    rep.coll_dis_before = 0.0;
    {
        const PlausibilityMetrics before = coll_metrics(input, body_a, body_b, config.threads);
        rep.coll_dis_before = before.coll_dis;
        rep.coll_ro_before = before.coll_ro;
    }

    const auto regularizers = [&](const MotionSequence& m, detail::RegularizerTerms* terms,
                                  std::vector<Vector3d>* grad) {
        terms->anchor = terms->bone = terms->smooth = 0.0;
        for (int f = 0; f < F; ++f) {
            for (int p = 0; p < 2; ++p) {
                for (int j = 0; j < J; ++j) {
                    const size_t idx = (size_t(f) * 2 + p) * J + j;
                    const Vector3d diff = m.data[idx] - input.data[idx];
                    terms->anchor += diff.squaredNorm();
                    if (grad) (*grad)[idx] += 2.0 * config.lambda_anchor * diff;
                }
                for (size_t e = 0; e < edges.size(); ++e) {
                    const Vector3d bone = m.at(f, p, edges[e].child) - m.at(f, p, edges[e].parent);
                    const double len = bone.norm();
                    const double ref = bone_init[(size_t(f) * 2 + p) * edges.size() + e];
                    const double drift = len - ref;
                    terms->bone += drift * drift;
                    if (grad && len > 1e-12) {
                        const Vector3d g = 2.0 * config.lambda_bone * drift * bone / len;
                        (*grad)[(size_t(f) * 2 + p) * J + edges[e].child] += g;
                        (*grad)[(size_t(f) * 2 + p) * J + edges[e].parent] -= g;
                    }
                }
                if (f > 0) {
                    for (int j = 0; j < J; ++j) {
                        const size_t cur = (size_t(f) * 2 + p) * J + j;
                        const size_t prev = (size_t(f - 1) * 2 + p) * J + j;
                        const Vector3d vel = m.data[cur] - m.data[prev];
                        const Vector3d vel0 = input.data[cur] - input.data[prev];
                        const Vector3d diff = vel - vel0;
                        terms->smooth += diff.squaredNorm();
                        if (grad) {
                            (*grad)[cur] += 2.0 * config.lambda_smooth * diff;
                            (*grad)[prev] -= 2.0 * config.lambda_smooth * diff;
                        }
                    }
                }
            }
        }
    };

    // Frozen collision quadratic: sum over frozen points of |target - p(x)|^2.
    const auto frozen_coll = [&](const MotionSequence& m,
                                 const std::vector<detail::FrozenFrame>& frozen) {
        double total = 0.0;
        for (int f = 0; f < F; ++f) {
            if (frozen[f].points.empty()) continue;
            std::array<std::vector<SegmentFrame>, 2> frames = {
                segment_frames(skel, m.person_frame(f, 0)),
                segment_frames(skel, m.person_frame(f, 1))};
            for (const auto& pt : frozen[f].points) {
                const BodyModel& model = pt.host_person == 0 ? body_a : body_b;
                const SegmentFrame& frame = frames[pt.host_person][pt.host_segment];
                if (frame.degenerate) continue;
                const Vector3d p =
                    sample_world(model.params.segments[pt.host_segment], frame,
                                 model.patterns[pt.host_segment].unit[pt.sample_index]);
                total += (pt.target - p).squaredNorm();
            }
        }
        return total;
    };

    double lr = config.learning_rate;
    // Per-frame step factors (a positive diagonal preconditioner): frames
    // clear contact at different times, and one shared rate would let a
    // frame's boundary flicker strangle another frame's progress.
    std::vector<double> frame_factor(F, 1.0);
    std::vector<int> prev_count(F, std::numeric_limits<int>::max());
    int zero_streak = 0;
    double prev_total = std::numeric_limits<double>::infinity();
    MotionSequence best = x;
    auto best_key = std::make_pair(std::numeric_limits<int>::max(),
                                   std::numeric_limits<double>::infinity());
    rep.stop_reason = "max_iters";

    for (int iter = 0; iter < config.max_iters; ++iter) {
        // Detect, freeze targets, and accumulate collision gradients per frame.
        std::vector<detail::FrozenFrame> frozen(F);
        std::vector<double> coll_value(F, 0.0);
        std::vector<JointGradients> coll_grads(F);
        std::vector<int> point_count(F, 0);
        parallel_for(F, config.threads, [&](int f) {
            const PosedBody pa = pose_body(body_a, x.person_frame(f, 0));
            const PosedBody pb = pose_body(body_b, x.person_frame(f, 1));
            CollisionReport report_f = detect_frame(pa, pb);
            report_f.frame_index = f;
            point_count[f] = int(report_f.points.size());
            if (report_f.points.empty()) return;
            const auto guide = guidance_vectors(report_f, pa, pb, config.antipodal_on);
            const LossOutput loss = collision_loss(report_f, guide, config.loss_mode);
            coll_value[f] = loss.value;
            coll_grads[f] = JointGradients::zeros(J);
            chain_to_joints(report_f, loss, body_a, pa, x.person_frame(f, 0), body_b, pb,
                            x.person_frame(f, 1), &coll_grads[f]);
            for (const LossOutput::Term& t : loss.terms) {
                const CollisionPoint& cp = report_f.points[t.point];
                frozen[f].points.push_back({cp.host_person, cp.host_segment, cp.sample_index,
                                            cp.p_world + t.d_eff, t.d_eff});
            }
        });

        double coll_total = 0.0;
        int points_total = 0;
        for (int f = 0; f < F; ++f) {
            coll_total += coll_value[f];
            points_total += point_count[f];
        }

        detail::RegularizerTerms terms;
        std::vector<Vector3d> grad(x.data.size(), Vector3d::Zero());
        regularizers(x, &terms, &grad);

        const double total = config.lambda_coll * coll_total + config.lambda_anchor * terms.anchor +
                             config.lambda_bone * terms.bone + config.lambda_smooth * terms.smooth;
        if (!std::isfinite(total)) {
            rep.stop_reason = "non_finite_loss";
            break;
        }
        if (total > prev_total + 1e-12) ++rep.transient_increases;
        // Unit-magnitude repulsion against the anchor pull produces a limit
        // cycle at each frame's contact boundary. Decaying a frame's step on
        // re-entry from a clean state contracts its cycle; the floor keeps
        // the push-out large against the anchor's pull-back rate. Shrinking
        // counts mean progress and earn the rate back.
        for (int f = 0; f < F; ++f) {
            if (prev_count[f] == 0 && point_count[f] > 0) {
                frame_factor[f] = std::max(frame_factor[f] * 0.5, 1e-3);
            } else if (point_count[f] < prev_count[f]) {
                frame_factor[f] = std::min(frame_factor[f] * 1.2, 1.0);
            }
            prev_count[f] = point_count[f];
        }
        prev_total = total;
        const auto key = std::make_pair(points_total, total);
        if (key < best_key) {
            best_key = key;
            best = x;
        }

        ResolveIterate it;
        it.iter = iter;
        it.total = total;
        it.coll = config.lambda_coll * coll_total;
        it.anchor = config.lambda_anchor * terms.anchor;
        it.bone = config.lambda_bone * terms.bone;
        it.smooth = config.lambda_smooth * terms.smooth;
        it.collision_points = points_total;
        it.lr = lr;
        rep.loss_curve.push_back(it);
        rep.iterations = iter + 1;

        zero_streak = (points_total == 0) ? zero_streak + 1 : 0;
        if (zero_streak >= 5) {
            rep.stop_reason = "no_collisions";
            break;
        }

        // Candidate step against the frozen objective. Joints are clipped
        // individually: clipping the whole step by its largest mover would
        // also slow the joints racing to keep bone lengths, and the bones
        // would stretch until their gradients rival the collision pull.
        MotionSequence candidate = x;
        for (int f = 0; f < F; ++f) {
            const bool has_coll = !coll_grads[f].per_person[0].empty();
            for (int p = 0; p < 2; ++p) {
                for (int j = 0; j < J; ++j) {
                    const size_t i = (size_t(f) * 2 + p) * J + j;
                    Vector3d g = grad[i];
                    if (has_coll)
                        g += config.lambda_coll * coll_grads[f].per_person[p][j];
                    Vector3d step = lr * frame_factor[f] * g;
                    const double len = step.norm();
                    if (config.max_step > 0 && len > config.max_step)
                        step *= config.max_step / len;
                    candidate.data[i] -= step;
                }
            }
        }
        bool accepted = true;
        if (config.step_halving) {
            detail::RegularizerTerms cand_terms;
            regularizers(candidate, &cand_terms, nullptr);
            const double frozen_before = total;
            const double frozen_after =
                config.lambda_coll * frozen_coll(candidate, frozen) +
                config.lambda_anchor * cand_terms.anchor + config.lambda_bone * cand_terms.bone +
                config.lambda_smooth * cand_terms.smooth;
            if (!std::isfinite(frozen_after) || frozen_after > frozen_before + 1e-12) {
                accepted = false;
                lr *= 0.5;
                rep.loss_curve.back().accepted = false;
                if (lr < 1e-12) {
                    rep.stop_reason = "stalled";
                    break;
                }
            }
        }
        if (accepted) {
            x = std::move(candidate);
            ++rep.accepted_steps;
        }
    }

    // The optimizer may end mid-cycle; return the best iterate seen
    // (fewest collision points, then lowest total loss), comparing the final
    // state by the same key.
    {
        const auto reports = detect_sequence(x, body_a, body_b, config.threads);
        int final_points = 0;
        for (const auto& r : reports) final_points += int(r.points.size());
        detail::RegularizerTerms terms;
        regularizers(x, &terms, nullptr);
        double final_coll = 0.0;
        for (int f = 0; f < F; ++f) {
            if (reports[f].points.empty()) continue;
            const PosedBody pa = pose_body(body_a, x.person_frame(f, 0));
            const PosedBody pb = pose_body(body_b, x.person_frame(f, 1));
            const auto guide = guidance_vectors(reports[f], pa, pb, config.antipodal_on);
            final_coll += collision_loss(reports[f], guide, config.loss_mode).value;
        }
        const double final_total = config.lambda_coll * final_coll +
                                   config.lambda_anchor * terms.anchor +
                                   config.lambda_bone * terms.bone +
                                   config.lambda_smooth * terms.smooth;
        if (std::isfinite(final_total) &&
            std::make_pair(final_points, final_total) < best_key)
            best = x;
    }
    x = std::move(best);
    {
        const PlausibilityMetrics after = coll_metrics(x, body_a, body_b, config.threads);
        rep.coll_dis_after = after.coll_dis;
        rep.coll_ro_after = after.coll_ro;
    }
    for (int f = 0; f < F; ++f) {
        for (int p = 0; p < 2; ++p) {
            for (size_t e = 0; e < edges.size(); ++e) {
                const double ref = bone_init[(size_t(f) * 2 + p) * edges.size() + e];
                if (ref < 1e-9) continue;
                const double len =
                    (x.at(f, p, edges[e].child) - x.at(f, p, edges[e].parent)).norm();
                rep.max_bone_drift_pct =
                    std::max(rep.max_bone_drift_pct, 100.0 * std::abs(len - ref) / ref);
            }
            for (int j = 0; j < J; ++j)
                rep.max_joint_displacement =
                    std::max(rep.max_joint_displacement,
                             (x.at(f, p, j) - input.at(f, p, j)).norm());
        }
    }
    if (report) *report = std::move(rep);
    return x;
}

}  // namespace proxycoll
