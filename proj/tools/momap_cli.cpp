// Command-line front end: synthesize oracle cases, decompose flow/depth into
// motion maps, estimate trajectories, and evaluate them against ground truth.

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "momap/estimator.hpp"
#include "momap/geometry.hpp"
#include "momap/io.hpp"
#include "momap/metrics.hpp"
#include "momap/oracle.hpp"

namespace fs = std::filesystem;

namespace {

momap::Dof parse_dof(const std::string& name) {
    if (name == "tx") return momap::Dof::kTx;
    if (name == "ty") return momap::Dof::kTy;
    if (name == "tz") return momap::Dof::kTz;
    if (name == "rx") return momap::Dof::kRx;
    if (name == "ry") return momap::Dof::kRy;
    return momap::Dof::kRz;
}

momap::SceneKind parse_scene(const std::string& name) {
    if (name == "plane") return momap::SceneKind::kPlane;
    if (name == "slant") return momap::SceneKind::kSlantedPlane;
    return momap::SceneKind::kHills;
}

momap::AggregationConfig parse_aggregation(const std::string& strategy,
                                           const std::string& tz_fusion, double min_valid) {
    momap::AggregationConfig config;
    if (strategy == "mean") {
        config.strategy = momap::AggregationStrategy::kMean;
    } else if (strategy == "median") {
        config.strategy = momap::AggregationStrategy::kMedian;
    } else if (strategy.rfind("trimmed:", 0) == 0) {
        config.strategy = momap::AggregationStrategy::kTrimmedMean;
        try {
            config.trim_fraction = std::stod(strategy.substr(8));
        } catch (const std::exception&) {
            throw std::runtime_error("invalid strategy: " + strategy +
                                     " (expected trimmed:<fraction>)");
        }
    } else {
        throw std::runtime_error("invalid strategy: " + strategy +
                                 " (expected mean, median, or trimmed:<fraction>)");
    }
    if (tz_fusion == "weighted") {
        config.tz_fusion = momap::TzFusion::kPooled;
    } else if (tz_fusion == "x-only") {
        config.tz_fusion = momap::TzFusion::kXOnly;
    } else if (tz_fusion == "y-only") {
        config.tz_fusion = momap::TzFusion::kYOnly;
    } else {
        throw std::runtime_error("invalid t_z fusion: " + tz_fusion +
                                 " (expected weighted, x-only, or y-only)");
    }
    config.min_valid_fraction = min_valid;
    return config;
}

void negate_stack(momap::MotionMapStack& stack) {
    for (int channel = 0; channel < momap::kMapChannelCount; ++channel) {
        momap::RasterMap& map = stack[channel];
        for (int row = 0; row < map.height(); ++row) {
            for (int col = 0; col < map.width(); ++col) {
                if (map.is_valid(row, col)) {
                    map.at(row, col) = -map.at(row, col);
                }
            }
        }
    }
}

struct SynthOptions {
    std::string dof;
    double magnitude = 0.0;
    std::string scene = "plane";
    std::uint64_t seed = 0;
    std::string out_dir;
    int width = 128;
    int height = 96;
    double fx = 0.5792;
    double fy = 1.9119;
    double scene_depth = 5.0;
};

int run_synth(const SynthOptions& opt) {
    momap::CameraModel camera{opt.fx, opt.fy, opt.width, opt.height};
    const momap::OracleCase oracle = momap::generate_case(
        parse_dof(opt.dof), opt.magnitude, parse_scene(opt.scene), opt.seed, camera,
        opt.scene_depth);
    const fs::path dir(opt.out_dir);
    fs::create_directories(dir);
    momap::io::write_flow_file(dir / "flow.flo", oracle.flow_x, oracle.flow_y);
    momap::io::write_raster_file(dir / "depth.fmap", oracle.depth);
    momap::io::write_camera_file(dir / "camera.txt", camera);
    const momap::TransformSE3 camera_motion =
        momap::inverse(momap::se3_from_6dof(oracle.ground_truth));
    const momap::TransformSE3 poses[2] = {momap::TransformSE3::identity(), camera_motion};
    momap::io::write_pose_file(dir / "pose_gt.txt", poses);
    std::cout << "wrote " << (dir / "flow.flo").string() << ", depth.fmap, camera.txt, "
              << "pose_gt.txt (" << opt.dof << "=" << opt.magnitude << ", scene " << opt.scene
              << ", seed " << opt.seed << ")\n";
    return 0;
}

struct DecomposeOptions {
    std::string flow;
    std::string depth;
    std::optional<double> fx;
    std::optional<double> fy;
    std::string camera_file;
    std::string out;
    std::string convention = "scene";
};

momap::CameraModel resolve_camera(const std::optional<double>& fx,
                                  const std::optional<double>& fy,
                                  const std::string& camera_file, int width, int height) {
    if (!camera_file.empty()) {
        momap::CameraModel camera = momap::io::read_camera_file(camera_file);
        if (camera.width != width || camera.height != height) {
            throw std::runtime_error("camera file dimensions " + std::to_string(camera.width) +
                                     "x" + std::to_string(camera.height) +
                                     " do not match the flow dimensions " +
                                     std::to_string(width) + "x" + std::to_string(height));
        }
        return camera;
    }
    if (!fx || !fy) {
        throw std::runtime_error("intrinsics required: pass --fx and --fy or --camera");
    }
    return momap::CameraModel{*fx, *fy, width, height};
}

int run_decompose(const DecomposeOptions& opt) {
    auto [flow_x, flow_y] = momap::io::read_flow_file(opt.flow);
    const momap::RasterMap depth = momap::io::read_raster_file(opt.depth);
    const momap::CameraModel camera =
        resolve_camera(opt.fx, opt.fy, opt.camera_file, flow_x.width(), flow_x.height());
    momap::MotionMapStack stack = momap::decompose(flow_x, flow_y, depth, camera);
    if (opt.convention == "camera") {
        negate_stack(stack);
    }
    momap::io::write_map_stack(opt.out, stack);
    std::cout << "wrote " << opt.out << " (" << stack.width() << "x" << stack.height()
              << ", 7 channels, " << opt.convention << " convention)\n";
    return 0;
}

struct EstimateOptions {
    std::vector<std::string> maps;
    std::vector<std::string> flow;
    std::vector<std::string> depth;
    std::optional<double> fx;
    std::optional<double> fy;
    std::string camera_file;
    std::string strategy = "median";
    std::string tz_fusion = "weighted";
    double min_valid = 0.1;
    std::string convention = "scene";
    std::string out_poses;
};

int run_estimate(const EstimateOptions& opt) {
    const momap::AggregationConfig config =
        parse_aggregation(opt.strategy, opt.tz_fusion, opt.min_valid);
    std::vector<momap::MotionMapStack> stacks;
    if (!opt.maps.empty()) {
        for (const std::string& path : opt.maps) {
            stacks.push_back(momap::io::read_map_stack(path));
        }
    } else {
        if (opt.flow.empty()) {
            throw std::runtime_error("no input: pass --maps or --flow with --depth");
        }
        if (opt.flow.size() != opt.depth.size()) {
            throw std::runtime_error("--flow and --depth must list the same number of files");
        }
        for (std::size_t i = 0; i < opt.flow.size(); ++i) {
            auto [flow_x, flow_y] = momap::io::read_flow_file(opt.flow[i]);
            const momap::RasterMap depth = momap::io::read_raster_file(opt.depth[i]);
            const momap::CameraModel camera = resolve_camera(opt.fx, opt.fy, opt.camera_file,
                                                             flow_x.width(), flow_x.height());
            stacks.push_back(momap::decompose(flow_x, flow_y, depth, camera));
        }
    }
    std::vector<momap::Pose6DoF> motions;
    motions.reserve(stacks.size());
    std::printf("pair,tx,ty,tz,rx,ry,rz\n");
    for (std::size_t i = 0; i < stacks.size(); ++i) {
        const momap::Pose6DoF pose = momap::estimate_6dof(stacks[i], config);
        std::printf("%zu,%.9g,%.9g,%.9g,%.9g,%.9g,%.9g\n", i, pose.tx, pose.ty, pose.tz,
                    pose.rx, pose.ry, pose.rz);
        motions.push_back(pose);
    }
    const momap::MotionConvention convention = (opt.convention == "camera")
                                                   ? momap::MotionConvention::kCameraMotion
                                                   : momap::MotionConvention::kSceneMotion;
    const momap::Trajectory trajectory = momap::integrate_trajectory(motions, convention);
    momap::io::write_pose_file(opt.out_poses, trajectory.poses);
    std::cout << "wrote " << opt.out_poses << " (" << trajectory.size() << " poses)\n";
    return 0;
}

struct EvalOptions {
    std::vector<std::string> gt;
    std::vector<std::string> est;
    std::vector<std::string> metrics{"all"};
    std::vector<double> lengths;
    double length_scale = 1.0;
    int runs = 1;
    bool csv = false;
    std::string out;
};

int run_eval(const EvalOptions& opt) {
    const std::size_t n_seq = opt.gt.size();
    if (opt.runs < 1) {
        throw std::runtime_error("--runs must be at least 1");
    }
    if (opt.est.size() != n_seq * static_cast<std::size_t>(opt.runs)) {
        throw std::runtime_error(
            "--est must list one file per ground-truth sequence and run (" +
            std::to_string(n_seq) + " x " + std::to_string(opt.runs) + " files), got " +
            std::to_string(opt.est.size()));
    }
    bool want_ate = false;
    bool want_rmse = false;
    bool want_rpe = false;
    for (const std::string& metric : opt.metrics) {
        if (metric == "all") {
            want_ate = want_rmse = want_rpe = true;
        } else if (metric == "ate") {
            want_ate = true;
        } else if (metric == "rmse") {
            want_rmse = true;
        } else if (metric == "rpe") {
            want_rpe = true;
        } else {
            throw std::runtime_error("unknown metric: " + metric);
        }
    }
    std::vector<double> lengths =
        opt.lengths.empty() ? momap::default_segment_lengths() : opt.lengths;
    for (double& length : lengths) {
        length *= opt.length_scale;
    }

    std::vector<momap::Trajectory> gt;
    gt.reserve(n_seq);
    for (const std::string& path : opt.gt) {
        gt.push_back(momap::io::read_trajectory(path));
    }

    std::vector<double> ate_runs, rmse_t_runs, rmse_r_runs, rpe_t_runs, rpe_r_runs;
    for (int run = 0; run < opt.runs; ++run) {
        std::vector<std::vector<momap::SegmentError>> per_sequence;
        double ate_sum = 0.0;
        for (std::size_t seq = 0; seq < n_seq; ++seq) {
            const momap::Trajectory est = momap::io::read_trajectory(
                opt.est[static_cast<std::size_t>(run) * n_seq + seq]);
            if (want_ate) {
                ate_sum += momap::ate(gt[seq], est);
            }
            if (want_rmse || want_rpe) {
                per_sequence.push_back(momap::segment_errors(gt[seq], est, lengths));
            }
        }
        if (want_ate) {
            ate_runs.push_back(ate_sum / static_cast<double>(n_seq));
        }
        if (want_rmse) {
            const momap::MetricPair rmse = momap::kitti_rmse(per_sequence);
            rmse_t_runs.push_back(rmse.translation);
            rmse_r_runs.push_back(rmse.rotation);
        }
        if (want_rpe) {
            const momap::MetricPair pooled = momap::rpe(per_sequence);
            rpe_t_runs.push_back(pooled.translation);
            rpe_r_runs.push_back(pooled.rotation);
        }
    }

    // Presentation units: ATE in length units, translation segment errors in
    // percent, rotation segment errors in degrees per 100 length units.
    constexpr double kTranslationScale = 100.0;
    const double rotation_scale = 180.0 / std::numbers::pi * 100.0;
    std::vector<momap::MetricCell> cells;
    auto add_cell = [&](const std::string& name, const std::vector<double>& values,
                        double scale) {
        momap::MetricCell cell;
        cell.name = name;
        if (values.size() > 1) {
            const momap::RunStats stats = momap::aggregate_runs(values);
            cell.mean = stats.mean * scale;
            cell.stddev = stats.stddev * scale;
        } else {
            cell.mean = values.front() * scale;
        }
        cells.push_back(std::move(cell));
    };
    if (want_ate) {
        add_cell("ATE", ate_runs, 1.0);
    }
    if (want_rmse) {
        add_cell("RMSE_t", rmse_t_runs, kTranslationScale);
        add_cell("RMSE_r", rmse_r_runs, rotation_scale);
    }
    if (want_rpe) {
        add_cell("RPE_t", rpe_t_runs, kTranslationScale);
        add_cell("RPE_r", rpe_r_runs, rotation_scale);
    }
    const std::string table = opt.csv ? momap::format_metric_table_csv(cells)
                                      : momap::format_metric_table_text(cells);
    if (opt.out.empty()) {
        std::cout << table;
    } else {
        momap::io::write_text_file(opt.out, table);
        std::cout << "wrote " << opt.out << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dense-flow motion decomposition and trajectory evaluation"};
    app.require_subcommand(1);

    SynthOptions synth;
    CLI::App* synth_cmd =
        app.add_subcommand("synth", "Render an exact flow/depth pair for a known motion");
    synth_cmd->add_option("--dof", synth.dof, "Degree of freedom to excite")
        ->required()
        ->check(CLI::IsMember({"tx", "ty", "tz", "rx", "ry", "rz"}));
    synth_cmd->add_option("--magnitude", synth.magnitude,
                          "Motion magnitude (depth units or radians)")
        ->required();
    synth_cmd->add_option("--scene", synth.scene, "Scene shape (default plane)")
        ->check(CLI::IsMember({"plane", "slant", "hills"}));
    synth_cmd->add_option("--seed", synth.seed, "Scene random seed (default 0)");
    synth_cmd->add_option("--out-dir", synth.out_dir, "Output directory")->required();
    synth_cmd->add_option("--width", synth.width, "Image width (default 128)");
    synth_cmd->add_option("--height", synth.height, "Image height (default 96)");
    synth_cmd->add_option("--fx", synth.fx, "Normalized focal, x (default 0.5792)");
    synth_cmd->add_option("--fy", synth.fy, "Normalized focal, y (default 1.9119)");
    synth_cmd->add_option("--scene-depth", synth.scene_depth,
                          "Base scene depth (default 5)");

    DecomposeOptions decompose;
    CLI::App* decompose_cmd =
        app.add_subcommand("decompose", "Turn a flow/depth pair into seven motion maps");
    decompose_cmd->add_option("--flow", decompose.flow, "Flow file (.flo)")->required();
    decompose_cmd->add_option("--depth", decompose.depth, "Depth raster file")->required();
    decompose_cmd->add_option("--fx", decompose.fx, "Normalized focal, x");
    decompose_cmd->add_option("--fy", decompose.fy, "Normalized focal, y");
    decompose_cmd->add_option("--camera", decompose.camera_file,
                              "Intrinsics file (alternative to --fx/--fy)");
    decompose_cmd->add_option("--out", decompose.out, "Output map stack file")->required();
    decompose_cmd->add_option("--convention", decompose.convention,
                              "Sign convention of the maps (default scene)")
        ->check(CLI::IsMember({"scene", "camera"}));

    EstimateOptions estimate;
    CLI::App* estimate_cmd = app.add_subcommand(
        "estimate", "Aggregate motion maps into per-pair motions and a trajectory");
    estimate_cmd->add_option("--maps", estimate.maps, "Map stack files, one per frame pair");
    estimate_cmd->add_option("--flow", estimate.flow, "Flow files, one per frame pair");
    estimate_cmd->add_option("--depth", estimate.depth, "Depth files matching --flow");
    estimate_cmd->add_option("--fx", estimate.fx, "Normalized focal, x");
    estimate_cmd->add_option("--fy", estimate.fy, "Normalized focal, y");
    estimate_cmd->add_option("--camera", estimate.camera_file,
                             "Intrinsics file (alternative to --fx/--fy)");
    estimate_cmd->add_option("--strategy", estimate.strategy,
                             "mean, median, or trimmed:<fraction> (default median)");
    estimate_cmd->add_option("--tz-fusion", estimate.tz_fusion,
                             "weighted, x-only, or y-only (default weighted)");
    estimate_cmd->add_option("--min-valid", estimate.min_valid,
                             "Minimum valid-pixel fraction per map (default 0.1)");
    estimate_cmd->add_option("--convention", estimate.convention,
                             "Sign convention of the input maps (default scene)")
        ->check(CLI::IsMember({"scene", "camera"}));
    estimate_cmd->add_option("--out-poses", estimate.out_poses, "Output pose file")->required();

    EvalOptions eval;
    CLI::App* eval_cmd =
        app.add_subcommand("eval", "Compare estimated trajectories against ground truth");
    eval_cmd->add_option("--gt", eval.gt, "Ground-truth pose files, one per sequence")
        ->required();
    eval_cmd->add_option("--est", eval.est,
                         "Estimated pose files, sequences grouped run by run")
        ->required();
    eval_cmd->add_option("--metric", eval.metrics, "ate, rmse, rpe, or all (default all)");
    eval_cmd->add_option("--lengths", eval.lengths,
                         "Segment lengths (default 100 200 ... 800)");
    eval_cmd->add_option("--length-scale", eval.length_scale,
                         "Factor applied to every segment length (default 1)");
    eval_cmd->add_option("--runs", eval.runs,
                         "Number of runs in --est; reports mean and deviation when > 1");
    eval_cmd->add_flag("--csv", eval.csv, "Emit CSV instead of the aligned text table");
    eval_cmd->add_option("--out", eval.out, "Write the table to a file instead of stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth_cmd->parsed()) {
            return run_synth(synth);
        }
        if (decompose_cmd->parsed()) {
            return run_decompose(decompose);
        }
        if (estimate_cmd->parsed()) {
            return run_estimate(estimate);
        }
        return run_eval(eval);
    } catch (const std::exception& error) {
        std::cerr << "error: " << error.what() << "\n";
        return 1;
    }
}
