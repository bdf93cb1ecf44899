// proxycoll: fit proxies, detect interpenetration, resolve it, and benchmark
// the pipeline on two-person motion files.

#include <CLI11.hpp>

#include <filesystem>
#include <iomanip>
#include <iostream>

#include "proxycoll/proxycoll.hpp"

namespace fs = std::filesystem;
using namespace proxycoll;

namespace {

constexpr const char* kSchema = "proxycoll/1";

json config_echo(const json& options, uint64_t seed) {
    return {{"schema", kSchema}, {"seed", seed}, {"config", options}};
}

AntipodalOn parse_antipodal(const std::string& s) {
    if (s == "host") return AntipodalOn::host;
    if (s == "container") return AntipodalOn::container;
    throw std::invalid_argument("antipodal-on must be 'host' or 'container'");
}

LossMode parse_mode(const std::string& s) {
    if (s == "per_point") return LossMode::per_point;
    if (s == "aggregated") return LossMode::aggregated;
    throw std::invalid_argument("mode must be 'per_point' or 'aggregated'");
}

// --- fit ---------------------------------------------------------------------

struct FitArgs {
    std::string mesh_path, skeleton_path, rest_pose_path, motion_path, init_path;
    std::string out_path, report_path;
    int person = 0;
    FitConfig config;
};

int run_fit(const FitArgs& args) {
    const Skeleton skel = load_skeleton_file(args.skeleton_path);
    const TriangleMesh mesh = load_obj_file(args.mesh_path);
    std::vector<Vector3d> rest;
    if (!args.rest_pose_path.empty()) {
        rest = load_pose_file(args.rest_pose_path);
    } else if (!args.motion_path.empty()) {
        const MotionSequence motion = load_motion_file(args.motion_path);
        const auto span = motion.person_frame(0, args.person);
        rest.assign(span.begin(), span.end());
    } else {
        throw std::invalid_argument("fit: provide --rest-pose or --motion");
    }

    FitReport report;
    ProxyParams init;
    const ProxyParams* init_ptr = nullptr;
    if (!args.init_path.empty()) {
        init = load_params_file(args.init_path);
        init_ptr = &init;
    }
    const ProxyParams fitted = fit_proxies(mesh, skel, rest, args.config, &report, init_ptr);

    json params_doc = params_to_json(fitted);
    params_doc.update(config_echo({{"mesh", args.mesh_path},
                                   {"skeleton", args.skeleton_path},
                                   {"learning_rate", args.config.learning_rate},
                                   {"max_iters", args.config.max_iters},
                                   {"convergence_tol", args.config.convergence_tol}},
                                  args.config.seed));
    save_json_file(params_doc, args.out_path);

    if (!args.report_path.empty()) {
        json rep{{"final_loss", report.final_loss},
                 {"iters", report.iters},
                 {"loss_history", report.loss_history},
                 {"warnings", report.warnings}};
        rep.update(config_echo(json::object(), args.config.seed));
        save_json_file(rep, args.report_path);
    }
    for (const std::string& w : report.warnings) std::cerr << "warning: " << w << '\n';
    std::cout << "fit: final loss " << report.final_loss << " after " << report.iters
              << " iterations -> " << args.out_path << '\n';
    return 0;
}

// --- detect ------------------------------------------------------------------

struct DetectArgs {
    std::string motion_path, skeleton_path, out_path;
    std::vector<std::string> proxies;
    bool with_guidance = false;
    std::string antipodal_on = "host";
    uint64_t seed = 0;
    int threads = 0;
};

int run_detect(const DetectArgs& args) {
    const Skeleton skel = load_skeleton_file(args.skeleton_path);
    const MotionSequence motion = load_motion_file(args.motion_path);
    if (motion.joints != skel.joint_count())
        throw std::invalid_argument("detect: motion joint count does not match skeleton");
    const BodyModel body_a =
        BodyModel::build(skel, load_params_file(args.proxies[0]), motion.person_frame(0, 0),
                         args.seed);
    const BodyModel body_b =
        BodyModel::build(skel, load_params_file(args.proxies[1]), motion.person_frame(0, 1),
                         splitmix64(args.seed + 1));
    const int threads = resolve_threads(args.threads);
    const auto reports = detect_sequence(motion, body_a, body_b, threads);

    json frames = json::array();
    for (const CollisionReport& rep : reports) {
        json points = json::array();
        std::vector<std::optional<GuidanceVector>> guide;
        if (args.with_guidance && !rep.points.empty()) {
            const PosedBody pa = pose_body(body_a, motion.person_frame(rep.frame_index, 0));
            const PosedBody pb = pose_body(body_b, motion.person_frame(rep.frame_index, 1));
            guide = guidance_vectors(rep, pa, pb, parse_antipodal(args.antipodal_on));
        }
        for (size_t i = 0; i < rep.points.size(); ++i) {
            const CollisionPoint& p = rep.points[i];
            json pt{{"person", p.host_person},
                    {"segment", p.host_segment},
                    {"sample", p.sample_index},
                    {"container", p.container_segment},
                    {"depth", p.depth},
                    {"xyz", {p.p_world.x(), p.p_world.y(), p.p_world.z()}}};
            if (args.with_guidance) {
                if (i < guide.size() && guide[i]) {
                    pt["d"] = {guide[i]->d.x(), guide[i]->d.y(), guide[i]->d.z()};
                    pt["q"] = {guide[i]->q_world.x(), guide[i]->q_world.y(),
                               guide[i]->q_world.z()};
                } else {
                    pt["d"] = nullptr;  // undefined antipodal, point skipped by the loss
                }
            }
            points.push_back(pt);
        }
        frames.push_back({{"frame", rep.frame_index}, {"points", points}});
    }
    json doc{{"frames", frames}};
    doc.update(config_echo({{"in", args.motion_path},
                            {"skeleton", args.skeleton_path},
                            {"proxies", args.proxies},
                            {"with_guidance", args.with_guidance},
                            {"antipodal_on", args.antipodal_on},
                            {"threads", threads}},
                           args.seed));
    save_json_file(doc, args.out_path);

    size_t total = 0;
    for (const auto& r : reports) total += r.points.size();
    std::cout << "detect: " << total << " collision points over " << motion.frames
              << " frames -> " << args.out_path << '\n';
    return 0;
}

// --- resolve -------------------------------------------------------------------

struct ResolveArgs {
    std::string motion_path, skeleton_path;
    std::vector<std::string> proxies;
    std::string out_path, report_path;
    std::string preset = "adaption";
    std::string mode = "aggregated";
    std::string antipodal_on = "host";
    ResolveConfig config;
    bool binary_out = false;
    bool lambda_coll_set = false;
};

int run_resolve(const ResolveArgs& args) {
    const Skeleton skel = load_skeleton_file(args.skeleton_path);
    const MotionSequence motion = load_motion_file(args.motion_path);
    const ProxyParams params_a = load_params_file(args.proxies[0]);
    const ProxyParams params_b = load_params_file(args.proxies[1]);

    ResolveConfig config = ResolveConfig::preset(args.preset);
    config.lambda_anchor = args.config.lambda_anchor;
    config.lambda_bone = args.config.lambda_bone;
    config.lambda_smooth = args.config.lambda_smooth;
    config.learning_rate = args.config.learning_rate;
    config.max_iters = args.config.max_iters;
    config.seed = args.config.seed;
    config.threads = resolve_threads(args.config.threads);
    config.loss_mode = parse_mode(args.mode);
    config.antipodal_on = parse_antipodal(args.antipodal_on);
    if (args.lambda_coll_set) config.lambda_coll = args.config.lambda_coll;

    ResolveReport report;
    const MotionSequence refined =
        resolve_sequence(motion, params_a, params_b, skel, config, &report);
    save_motion_file(refined, args.out_path, args.binary_out);

    if (!args.report_path.empty()) {
        json curve = json::array();
        for (const ResolveIterate& it : report.loss_curve)
            curve.push_back({{"iter", it.iter},
                             {"total", it.total},
                             {"coll", it.coll},
                             {"anchor", it.anchor},
                             {"bone", it.bone},
                             {"smooth", it.smooth},
                             {"collision_points", it.collision_points},
                             {"lr", it.lr},
                             {"accepted", it.accepted}});
        json rep{{"iterations", report.iterations},
                 {"accepted_steps", report.accepted_steps},
                 {"coll_dis_before", report.coll_dis_before},
                 {"coll_dis_after", report.coll_dis_after},
                 {"coll_ro_before", report.coll_ro_before},
                 {"coll_ro_after", report.coll_ro_after},
                 {"max_bone_drift_pct", report.max_bone_drift_pct},
                 {"max_joint_displacement", report.max_joint_displacement},
                 {"transient_increases", report.transient_increases},
                 {"stop_reason", report.stop_reason},
                 {"loss_curve", curve}};
        rep.update(config_echo({{"preset", args.preset},
                                {"lambda_coll", config.lambda_coll},
                                {"lambda_anchor", config.lambda_anchor},
                                {"lambda_bone", config.lambda_bone},
                                {"lambda_smooth", config.lambda_smooth},
                                {"learning_rate", config.learning_rate},
                                {"max_iters", config.max_iters},
                                {"mode", args.mode},
                                {"antipodal_on", args.antipodal_on},
                                {"threads", config.threads}},
                               config.seed));
        save_json_file(rep, args.report_path);
    }
    std::cout << "resolve: coll_dis " << report.coll_dis_before << " -> "
              << report.coll_dis_after << ", coll_ro " << report.coll_ro_before << " -> "
              << report.coll_ro_after << " (" << report.stop_reason << ", "
              << report.iterations << " iterations)\n";
    if (report.stop_reason == "non_finite_loss") {
        std::cerr << "error: loss became non-finite; wrote last finite iterate\n";
        return 2;
    }
    return 0;
}

// --- metrics -------------------------------------------------------------------

struct MetricsArgs {
    std::string motion_path, skeleton_path, out_path;
    std::vector<std::string> proxies;
    uint64_t seed = 0;
    int threads = 0;
};

int run_metrics(const MetricsArgs& args) {
    const Skeleton skel = load_skeleton_file(args.skeleton_path);
    const MotionSequence motion = load_motion_file(args.motion_path);
    const BodyModel body_a =
        BodyModel::build(skel, load_params_file(args.proxies[0]), motion.person_frame(0, 0),
                         args.seed);
    const BodyModel body_b =
        BodyModel::build(skel, load_params_file(args.proxies[1]), motion.person_frame(0, 1),
                         splitmix64(args.seed + 1));
    const int threads = resolve_threads(args.threads);
    const PlausibilityMetrics m = coll_metrics(motion, body_a, body_b, threads);

    json doc{{"coll_dis", m.coll_dis},
             {"coll_ro", m.coll_ro},
             {"per_frame_depth", m.per_frame_depth}};
    doc.update(config_echo({{"in", args.motion_path},
                            {"skeleton", args.skeleton_path},
                            {"proxies", args.proxies},
                            {"threads", threads}},
                           args.seed));
    save_json_file(doc, args.out_path);
    std::cout << "metrics: coll_dis " << m.coll_dis << " m, coll_ro " << m.coll_ro << " -> "
              << args.out_path << '\n';
    return 0;
}

// --- bench ---------------------------------------------------------------------

struct BenchArgs {
    std::string config_path, out_path;
    int threads = 1;
};

int run_bench_cmd(const BenchArgs& args) {
    BenchConfig config;
    if (!args.config_path.empty()) {
        const json doc = load_json_file(args.config_path);
        require_known_keys(doc,
                           {"sample_counts", "mesh_vertex_counts", "frames", "repetitions",
                            "seed"},
                           "bench config");
        if (doc.contains("sample_counts"))
            config.sample_counts = doc["sample_counts"].get<std::vector<int>>();
        if (doc.contains("mesh_vertex_counts"))
            config.mesh_vertex_counts = doc["mesh_vertex_counts"].get<std::vector<int>>();
        config.frames = doc.value("frames", config.frames);
        config.repetitions = doc.value("repetitions", config.repetitions);
        config.seed = doc.value("seed", config.seed);
    }
    config.threads = args.threads;  // single-threaded by default so timings are interpretable
    const BenchReport report = run_bench(config);

    const auto entry_json = [](const BenchEntry& e) {
        return json{{"label", e.label},
                    {"n", e.n},
                    {"median_s", e.median_s},
                    {"p10_s", e.p10_s},
                    {"p90_s", e.p90_s},
                    {"times_s", e.times_s}};
    };
    json proxy = json::array(), proxy_parallel = json::array(), baseline = json::array();
    for (const auto& e : report.proxy) proxy.push_back(entry_json(e));
    for (const auto& e : report.proxy_parallel) proxy_parallel.push_back(entry_json(e));
    for (const auto& e : report.baseline) baseline.push_back(entry_json(e));
    json doc{{"proxy", proxy},
             {"proxy_parallel", proxy_parallel},
             {"baseline", baseline},
             {"proxy_scaling_exponent", report.proxy_scaling_exponent},
             {"baseline_scaling_exponent", report.baseline_scaling_exponent},
             {"peak_rss_mb", report.peak_rss_mb}};
    doc.update(config_echo({{"frames", config.frames},
                            {"repetitions", config.repetitions},
                            {"threads", config.threads}},
                           config.seed));
    save_json_file(doc, args.out_path);

    std::cout << std::left << std::setw(18) << "configuration" << std::right << std::setw(12)
              << "median [s]" << std::setw(12) << "p10 [s]" << std::setw(12) << "p90 [s]"
              << '\n';
    for (const auto& e : report.proxy)
        std::cout << std::left << std::setw(18) << e.label << std::right << std::fixed
                  << std::setprecision(4) << std::setw(12) << e.median_s << std::setw(12)
                  << e.p10_s << std::setw(12) << e.p90_s << '\n';
    for (const auto& e : report.proxy_parallel)
        std::cout << std::left << std::setw(18) << e.label << std::right << std::fixed
                  << std::setprecision(4) << std::setw(12) << e.median_s << std::setw(12)
                  << e.p10_s << std::setw(12) << e.p90_s << '\n';
    for (const auto& e : report.baseline)
        std::cout << std::left << std::setw(18) << e.label << std::right << std::fixed
                  << std::setprecision(4) << std::setw(12) << e.median_s << std::setw(12)
                  << e.p10_s << std::setw(12) << e.p90_s << '\n';
    std::cout << "proxy scaling exponent " << std::setprecision(3)
              << report.proxy_scaling_exponent << ", baseline "
              << report.baseline_scaling_exponent << ", peak RSS " << std::setprecision(1)
              << report.peak_rss_mb << " MB\n";
    return 0;
}

// --- export-frames ---------------------------------------------------------------

struct ExportArgs {
    std::string motion_path, skeleton_path, out_dir;
    std::vector<std::string> proxies;
    std::string format = "json";
    uint64_t seed = 0;
};

TriangleMesh tessellate(const PosedPrimitive& prim) {
    TriangleMesh mesh;
    if (prim.kind == PrimitiveKind::cuboid) {
        const Cuboid& b = prim.box;
        for (int i = 0; i < 8; ++i) {
            const Vector3d corner((i & 1) ? 1 : -1, (i & 2) ? 1 : -1, (i & 4) ? 1 : -1);
            mesh.vertices.push_back(b.center +
                                    b.basis * b.half_extents.cwiseProduct(corner));
        }
        const int quads[6][4] = {{0, 2, 3, 1}, {4, 5, 7, 6}, {0, 1, 5, 4},
                                 {2, 6, 7, 3}, {0, 4, 6, 2}, {1, 3, 7, 5}};
        for (const auto& q : quads) {
            mesh.faces.push_back({q[0], q[1], q[2]});
            mesh.faces.push_back({q[0], q[2], q[3]});
        }
        return mesh;
    }
    constexpr int k = 24;
    const Cylinder& c = prim.cyl;
    Vector3d u1 = c.axis.unitOrthogonal();
    Vector3d u2 = c.axis.cross(u1);
    for (int ring = 0; ring < 2; ++ring) {
        const Vector3d base = c.bottom + double(ring) * c.height * c.axis;
        for (int i = 0; i < k; ++i) {
            const double th = 2.0 * M_PI * double(i) / k;
            mesh.vertices.push_back(base + c.radius * (std::cos(th) * u1 + std::sin(th) * u2));
        }
    }
    mesh.vertices.push_back(c.bottom);                       // 2k
    mesh.vertices.push_back(c.bottom + c.height * c.axis);   // 2k+1
    for (int i = 0; i < k; ++i) {
        const int j = (i + 1) % k;
        mesh.faces.push_back({i, j, k + i});
        mesh.faces.push_back({j, k + j, k + i});
        mesh.faces.push_back({2 * k, j, i});
        mesh.faces.push_back({2 * k + 1, k + i, k + j});
    }
    return mesh;
}

int run_export(const ExportArgs& args) {
    if (args.format != "json" && args.format != "obj")
        throw std::invalid_argument("export-frames: format must be 'json' or 'obj'");
    const Skeleton skel = load_skeleton_file(args.skeleton_path);
    const MotionSequence motion = load_motion_file(args.motion_path);
    const BodyModel body_a =
        BodyModel::build(skel, load_params_file(args.proxies[0]), motion.person_frame(0, 0),
                         args.seed);
    const BodyModel body_b =
        BodyModel::build(skel, load_params_file(args.proxies[1]), motion.person_frame(0, 1),
                         splitmix64(args.seed + 1));
    fs::create_directories(args.out_dir);

    for (int f = 0; f < motion.frames; ++f) {
        const std::array<PosedBody, 2> posed = {pose_body(body_a, motion.person_frame(f, 0)),
                                                pose_body(body_b, motion.person_frame(f, 1))};
        char name[32];
        std::snprintf(name, sizeof name, "frame_%05d.%s", f, args.format.c_str());
        const fs::path path = fs::path(args.out_dir) / name;
        if (args.format == "json") {
            json persons = json::array();
            for (int p = 0; p < 2; ++p) {
                json prims = json::array();
                for (const PosedPrimitive& prim : posed[p].placed.primitives) {
                    json entry{{"segment", prim.segment},
                               {"name", skel.segments[prim.segment].name},
                               {"kind", kind_name(prim.kind)}};
                    if (prim.kind == PrimitiveKind::cylinder) {
                        entry["bottom"] = {prim.cyl.bottom.x(), prim.cyl.bottom.y(),
                                           prim.cyl.bottom.z()};
                        entry["axis"] = {prim.cyl.axis.x(), prim.cyl.axis.y(),
                                         prim.cyl.axis.z()};
                        entry["h"] = prim.cyl.height;
                        entry["r"] = prim.cyl.radius;
                    } else {
                        entry["center"] = {prim.box.center.x(), prim.box.center.y(),
                                           prim.box.center.z()};
                        json basis = json::array();
                        for (int r = 0; r < 3; ++r)
                            for (int c = 0; c < 3; ++c) basis.push_back(prim.box.basis(r, c));
                        entry["basis"] = basis;
                        entry["half_extents"] = {prim.box.half_extents.x(),
                                                 prim.box.half_extents.y(),
                                                 prim.box.half_extents.z()};
                    }
                    prims.push_back(entry);
                }
                persons.push_back({{"person", p}, {"primitives", prims}});
            }
            save_json_file(json{{"frame", f}, {"persons", persons}}, path.string());
        } else {
            std::ofstream out(path);
            if (!out) throw std::invalid_argument("cannot write " + path.string());
            int vertex_base = 0;
            for (int p = 0; p < 2; ++p) {
                for (const PosedPrimitive& prim : posed[p].placed.primitives) {
                    const TriangleMesh mesh = tessellate(prim);
                    out << "o person" << p << '_' << skel.segments[prim.segment].name << '\n';
                    for (const Vector3d& v : mesh.vertices)
                        out << "v " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
                    for (const auto& face : mesh.faces)
                        out << "f " << vertex_base + face[0] + 1 << ' '
                            << vertex_base + face[1] + 1 << ' ' << vertex_base + face[2] + 1
                            << '\n';
                    vertex_base += int(mesh.vertices.size());
                }
            }
        }
    }
    std::cout << "export-frames: wrote " << motion.frames << " " << args.format
              << " files to " << args.out_dir << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Collision-aware geometric proxies for two-person motion"};
    app.require_subcommand(1);

    FitArgs fit;
    CLI::App* fit_cmd = app.add_subcommand("fit", "Fit proxy dimensions to a body mesh");
    fit_cmd->add_option("--mesh", fit.mesh_path, "Body mesh (OBJ, triangles)")->required();
    fit_cmd->add_option("--skeleton", fit.skeleton_path, "Skeleton JSON")->required();
    fit_cmd->add_option("--rest-pose", fit.rest_pose_path, "Rest pose JSON");
    fit_cmd->add_option("--motion", fit.motion_path, "Motion file; frame 0 is the rest pose");
    fit_cmd->add_option("--person", fit.person, "Person index when using --motion");
    fit_cmd->add_option("--init", fit.init_path, "Initial proxy parameters JSON");
    fit_cmd->add_option("--out", fit.out_path, "Output proxyparams.json")->required();
    fit_cmd->add_option("--report", fit.report_path, "Output fitreport.json");
    fit_cmd->add_option("--lr", fit.config.learning_rate, "Learning rate");
    fit_cmd->add_option("--max-iters", fit.config.max_iters, "Iteration cap");
    fit_cmd->add_option("--tol", fit.config.convergence_tol, "Convergence tolerance");
    fit_cmd->add_option("--samples-cylinder", fit.config.samples_per_cylinder,
                        "Samples per cylinder");
    fit_cmd->add_option("--samples-cuboid", fit.config.samples_per_cuboid,
                        "Samples per cuboid");
    fit_cmd->add_option("--seed", fit.config.seed, "Sampling seed");

    DetectArgs detect;
    CLI::App* detect_cmd = app.add_subcommand("detect", "Detect inter-person collision points");
    detect_cmd->add_option("--in", detect.motion_path, "Motion file")->required();
    detect_cmd->add_option("--skeleton", detect.skeleton_path, "Skeleton JSON")->required();
    detect_cmd->add_option("--proxies", detect.proxies, "Proxy params for person A [and B]")
        ->required()
        ->expected(1, 2);
    detect_cmd->add_option("--out", detect.out_path, "Output collisions.json")->required();
    detect_cmd->add_flag("--with-guidance", detect.with_guidance,
                         "Attach guidance vectors and targets per point");
    detect_cmd->add_option("--antipodal-on", detect.antipodal_on, "host|container");
    detect_cmd->add_option("--seed", detect.seed, "Sampling seed");
    detect_cmd->add_option("--threads", detect.threads, "Worker threads (0 = all cores)");

    ResolveArgs resolve;
    CLI::App* resolve_cmd =
        app.add_subcommand("resolve", "Reduce interpenetration by refining joint positions");
    resolve_cmd->add_option("--in", resolve.motion_path, "Motion file")->required();
    resolve_cmd->add_option("--skeleton", resolve.skeleton_path, "Skeleton JSON")->required();
    resolve_cmd->add_option("--proxies", resolve.proxies, "Proxy params for person A [and B]")
        ->required()
        ->expected(1, 2);
    resolve_cmd->add_option("--preset", resolve.preset, "adaption|scratch");
    resolve_cmd->add_option("--lambda-coll", resolve.config.lambda_coll,
                            "Collision weight override");
    resolve_cmd->add_option("--lambda-anchor", resolve.config.lambda_anchor, "Anchor weight");
    resolve_cmd->add_option("--lambda-bone", resolve.config.lambda_bone, "Bone-length weight");
    resolve_cmd->add_option("--lambda-smooth", resolve.config.lambda_smooth,
                            "Velocity weight");
    resolve_cmd->add_option("--lr", resolve.config.learning_rate, "Learning rate");
    resolve_cmd->add_option("--max-iters", resolve.config.max_iters, "Iteration cap");
    resolve_cmd->add_option("--mode", resolve.mode, "per_point|aggregated");
    resolve_cmd->add_option("--antipodal-on", resolve.antipodal_on, "host|container");
    resolve_cmd->add_option("--seed", resolve.config.seed, "Sampling seed");
    resolve_cmd->add_option("--threads", resolve.config.threads, "Worker threads (0 = all)");
    resolve_cmd->add_option("--out", resolve.out_path, "Refined motion file")->required();
    resolve_cmd->add_option("--report", resolve.report_path, "Resolve report JSON");
    resolve_cmd->add_flag("--binary-out", resolve.binary_out, "Write binary motion output");

    MetricsArgs metrics;
    CLI::App* metrics_cmd = app.add_subcommand("metrics", "Compute coll_dis / coll_ro");
    metrics_cmd->add_option("--in", metrics.motion_path, "Motion file")->required();
    metrics_cmd->add_option("--skeleton", metrics.skeleton_path, "Skeleton JSON")->required();
    metrics_cmd->add_option("--proxies", metrics.proxies, "Proxy params for person A [and B]")
        ->required()
        ->expected(1, 2);
    metrics_cmd->add_option("--out", metrics.out_path, "Output metrics.json")->required();
    metrics_cmd->add_option("--seed", metrics.seed, "Sampling seed");
    metrics_cmd->add_option("--threads", metrics.threads, "Worker threads (0 = all cores)");

    BenchArgs bench;
    CLI::App* bench_cmd = app.add_subcommand("bench", "Time the pipeline against a baseline");
    bench_cmd->add_option("--config", bench.config_path, "Bench config JSON");
    bench_cmd->add_option("--out", bench.out_path, "Output bench_report.json")->required();
    bench_cmd->add_option("--threads", bench.threads, "Worker threads (default 1)");

    ExportArgs exp;
    CLI::App* export_cmd =
        app.add_subcommand("export-frames", "Dump per-frame posed primitives for viewers");
    export_cmd->add_option("--in", exp.motion_path, "Motion file")->required();
    export_cmd->add_option("--skeleton", exp.skeleton_path, "Skeleton JSON")->required();
    export_cmd->add_option("--proxies", exp.proxies, "Proxy params for person A [and B]")
        ->required()
        ->expected(1, 2);
    export_cmd->add_option("--out", exp.out_dir, "Output directory")->required();
    export_cmd->add_option("--format", exp.format, "json|obj");
    export_cmd->add_option("--seed", exp.seed, "Sampling seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*fit_cmd) return run_fit(fit);
        if (*detect_cmd) {
            if (detect.proxies.size() == 1) detect.proxies.push_back(detect.proxies[0]);
            return run_detect(detect);
        }
        if (*resolve_cmd) {
            if (resolve.proxies.size() == 1) resolve.proxies.push_back(resolve.proxies[0]);
            resolve.lambda_coll_set = resolve_cmd->count("--lambda-coll") > 0;
            return run_resolve(resolve);
        }
        if (*metrics_cmd) {
            if (metrics.proxies.size() == 1) metrics.proxies.push_back(metrics.proxies[0]);
            return run_metrics(metrics);
        }
        if (*bench_cmd) return run_bench_cmd(bench);
        if (*export_cmd) {
            if (exp.proxies.size() == 1) exp.proxies.push_back(exp.proxies[0]);
            return run_export(exp);
        }
    } catch (const numerical_error& e) {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
