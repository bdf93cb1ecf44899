#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace proxycoll;
using namespace testing;
using Catch::Approx;

TEST_CASE("collision-free input is a fixed point") {
    const Skeleton skel = default_skeleton();
    const ProxyParams params = default_proxy_params();
    const auto rest = default_rest_pose();
    const MotionSequence motion =
        posed_motion(skel, rest, translated(rest, Vector3d(10, 0, 0)), 8, 0.01);

    ResolveConfig config = ResolveConfig::preset("adaption");
    ResolveReport report;
    const MotionSequence out = resolve_sequence(motion, params, params, skel, config, &report);
    CHECK(report.stop_reason == "no_collisions");
    CHECK(report.coll_dis_before == 0.0);
    CHECK(report.coll_dis_after == 0.0);
    double max_drift = 0.0;
    for (size_t i = 0; i < out.data.size(); ++i)
        max_drift = std::max(max_drift, (out.data[i] - motion.data[i]).norm());
    CHECK(max_drift < 1e-9);
    CHECK(report.max_joint_displacement < 1e-9);
}

TEST_CASE("interpenetrating forearms are resolved") {
    const Scene scene = scene_arms_cross(10);
    ResolveConfig config = ResolveConfig::preset("adaption");
    config.threads = 2;
    ResolveReport report;
    const MotionSequence out = resolve_sequence(scene.motion, scene.params_a, scene.params_b,
                                                scene.skeleton, config, &report);

    CHECK(report.coll_dis_before > 0.0);
    CHECK(report.coll_dis_after <= 0.5 * report.coll_dis_before);
    CHECK(report.coll_ro_after < report.coll_ro_before);
    CHECK(report.max_bone_drift_pct < 1.0);

    // report metrics are recomputed from the sequences, not optimizer state
    const BodyModel body_a = BodyModel::build(scene.skeleton, scene.params_a,
                                              scene.motion.person_frame(0, 0), config.seed);
    const BodyModel body_b =
        BodyModel::build(scene.skeleton, scene.params_b, scene.motion.person_frame(0, 1),
                         splitmix64(config.seed + 1));
    const PlausibilityMetrics before = coll_metrics(scene.motion, body_a, body_b);
    const PlausibilityMetrics after = coll_metrics(out, body_a, body_b);
    CHECK(report.coll_dis_before == Approx(before.coll_dis).epsilon(1e-12));
    CHECK(report.coll_dis_after == Approx(after.coll_dis).margin(1e-12));
}

TEST_CASE("iteration accounting is consistent") {
    const Scene scene = scene_arms_cross(6);
    ResolveConfig config = ResolveConfig::preset("adaption");
    config.max_iters = 60;
    ResolveReport report;
    resolve_sequence(scene.motion, scene.params_a, scene.params_b, scene.skeleton, config,
                     &report);
    REQUIRE_FALSE(report.loss_curve.empty());
    CHECK(report.transient_increases >= 0);
    int rejected = 0;
    for (const ResolveIterate& it : report.loss_curve)
        if (!it.accepted) ++rejected;
    CHECK(report.accepted_steps + rejected >= report.iterations - 1);
    CHECK(report.loss_curve.front().collision_points > 0);
}

TEST_CASE("mirror-image scenes resolve to mirror-image outputs") {
    // bent two-segment chains with joint-driven frames; r=0.02, h~0.41 keeps
    // all 10 samples on the lateral wall, so the sample clouds mirror exactly
    Skeleton chain = chain_skeleton(2);
    ProxyParams params = uniform_params(chain, 0.02);
    params.samples_per_cylinder = 10;

    const std::vector<Vector3d> pose_a = {
        {0.00, 0.00, 0.00}, {0.20, 0.00, 0.00}, {0.00, 0.40, 0.10}, {0.00, 0.80, 0.00}};
    const std::vector<Vector3d> pose_b = translated(pose_a, Vector3d(0.03, 0, 0));
    MotionSequence motion = MotionSequence::zeros(4, chain.joint_count());
    for (int f = 0; f < motion.frames; ++f)
        for (int j = 0; j < chain.joint_count(); ++j) {
            motion.at(f, 0, j) = pose_a[j];
            motion.at(f, 1, j) = pose_b[j];
        }

    // preconditions for exact mirroring: joint-driven frames, lateral-only
    // even-count sample layouts
    const auto frames = segment_frames(chain, pose_a);
    for (const auto& f : frames) REQUIRE_FALSE(f.world_fallback);
    const BodyModel probe = BodyModel::build(chain, params, pose_a, 0);
    for (const auto& pat : probe.patterns) {
        REQUIRE(pat.count() % 2 == 0);
        for (const Vector3d& u : pat.unit) REQUIRE((u.z() > 0.0 && u.z() < 1.0));
    }

    MotionSequence mirrored = motion;
    for (Vector3d& p : mirrored.data) p.x() = -p.x();

    ResolveConfig config = ResolveConfig::preset("adaption");
    ResolveReport rep1, rep2;
    const MotionSequence out = resolve_sequence(motion, params, params, chain, config, &rep1);
    const MotionSequence out_m =
        resolve_sequence(mirrored, params, params, chain, config, &rep2);

    REQUIRE(rep1.coll_dis_before > 0.0);
    CHECK(rep1.iterations == rep2.iterations);
    for (size_t i = 0; i < out.data.size(); ++i) {
        const Vector3d expect(-out.data[i].x(), out.data[i].y(), out.data[i].z());
        CHECK((out_m.data[i] - expect).norm() < 1e-8);
    }
}

TEST_CASE("presets set the collision weight") {
    CHECK(ResolveConfig::preset("adaption").lambda_coll == 10.0);
    CHECK(ResolveConfig::preset("scratch").lambda_coll == 0.1);
    CHECK_THROWS_WITH(ResolveConfig::preset("bogus"),
                      Catch::Matchers::ContainsSubstring("preset"));
}

TEST_CASE("config validation") {
    ResolveConfig config;
    config.lambda_coll = -1;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
    config = ResolveConfig{};
    config.learning_rate = 0;
    CHECK_THROWS_AS(config.validate(), std::invalid_argument);
}

TEST_CASE("stress: deep or box-on-box contact stays within documented bounds") {
    // these configurations sit at the method's limits: box-face hosts get
    // tangential escape directions, and deep displacements keep the anchor
    // pulling back into contact, so only the weaker guarantees hold
    for (const Scene& scene : {scene_torso_brush(30), scene_leg_tangle(45)}) {
        ResolveConfig config = ResolveConfig::preset("adaption");
        config.threads = 2;
        ResolveReport report;
        resolve_sequence(scene.motion, scene.params_a, scene.params_b, scene.skeleton, config,
                         &report);
        INFO(scene.name);
        CHECK(report.coll_dis_before > 0.0);
        CHECK(report.coll_dis_after <= 0.5 * report.coll_dis_before);
        CHECK(report.coll_ro_after < report.coll_ro_before);
        CHECK(report.max_bone_drift_pct < 25.0);
    }
}
