// posemark: annotate RSSI logs with camera-derived poses, simulate datasets,
// and score trajectories.

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "posemark/errors.hpp"
#include "posemark/evaluation.hpp"
#include "posemark/io.hpp"
#include "posemark/pipeline.hpp"
#include "posemark/plot.hpp"
#include "posemark/simulator.hpp"
#include "posemark/sync.hpp"

namespace fs = std::filesystem;
using namespace posemark;

namespace {

using io::format_real;

// Flags that mirror RunConfig keys. Values are applied after the config file.
struct ConfigFlags {
    std::map<std::string, std::string> values;
    std::vector<std::pair<std::string, CLI::Option*>> options;

    void add(CLI::App& app, const std::string& flag, const std::string& key, const std::string& help) {
        options.emplace_back(key, app.add_option(flag, values[key], help));
    }

    void apply(io::RunConfig& config) const {
        for (const auto& [key, opt] : options) {
            if (opt->count() == 0) continue;
            try {
                io::apply_config_value(config, key, values.at(key));
            } catch (const ParseError& e) {
                // drop the "line 0: " prefix, there is no file here
                std::string msg = e.what();
                if (const auto colon = msg.find(": "); colon != std::string::npos) msg = msg.substr(colon + 2);
                throw InvalidParameter(opt->get_name() + ": " + msg);
            }
        }
    }
};

void add_pipeline_flags(CLI::App& app, ConfigFlags& flags) {
    flags.add(app, "--frame-window", "frame_window", "frames per batch (F)");
    flags.add(app, "--closest", "closest", "closest-marker poses kept per batch (C), 0 disables");
    flags.add(app, "--survivors", "survivors", "poses surviving outlier elimination (U), 0 disables");
    flags.add(app, "--q", "q", "measurement noise multiplier");
    flags.add(app, "--r", "r", "process noise multiplier");
    flags.add(app, "--filter", "filter", "on | off");
}

PenaltyMode parse_penalty(const std::string& s) {
    if (s == "none") return PenaltyMode::None;
    if (s == "append") return PenaltyMode::Append;
    if (s == "accumulate") return PenaltyMode::Accumulate;
    throw InvalidParameter("penalty must be none, append or accumulate");
}

std::string penalty_name(PenaltyMode m) {
    switch (m) {
        case PenaltyMode::None: return "none";
        case PenaltyMode::Append: return "append";
        case PenaltyMode::Accumulate: return "accumulate";
    }
    return "?";
}

std::vector<FinalPose> trajectory_of(const PipelineResult& result) {
    return result.final_poses.empty() ? frame_means(result.likely) : result.final_poses;
}

// annotate ----------------------------------------------------------------

struct AnnotateArgs {
    std::string config;
    std::string detections, rssi, markers, out, trajectory_out;
    ConfigFlags flags;
};

int run_annotate(AnnotateArgs& a) {
    io::RunConfig config;
    if (!a.config.empty()) config = io::read_run_config(fs::path(a.config));
    if (!a.detections.empty()) config.detections = a.detections;
    if (!a.rssi.empty()) config.rssi = a.rssi;
    if (!a.markers.empty()) config.markers = a.markers;
    if (!a.out.empty()) config.output = a.out;
    if (!a.trajectory_out.empty()) config.trajectory_output = a.trajectory_out;
    a.flags.apply(config);
    if (config.filter) config.filter->validate();
    config.check_inputs();
    if (config.output.empty()) throw InvalidParameter("no output file given (--out or 'output' in the config)");

    const auto map_file = io::read_marker_map(config.markers);
    for (const auto& note : map_file.notes) std::cerr << "note: " << note << '\n';
    const auto observations = io::read_detections(config.detections);
    const auto rssi = io::read_rssi_log(config.rssi);

    const PipelineResult result =
        run_pipeline(observations, MarkerMap(map_file.markers), config.rig, config.pipeline());
    const auto trajectory = trajectory_of(result);
    if (trajectory.empty()) throw InvalidParameter("no poses survived; nothing to annotate");
    if (const auto n = count_near_wrap(trajectory, 0.1); n > 0) {
        std::cerr << "warning: " << n << " poses have rotation angles near pi; filtered rotations may be unreliable\n";
    }

    double rssi_release = 0.0;
    if (config.sync == io::SyncMode::Manual) {
        if (!config.sync_at) throw InvalidParameter("manual sync needs sync_at");
        rssi_release = *config.sync_at;
    } else {
        const CoverEvent ev = detect_cover_event(rssi, config.cover);
        rssi_release = ev.release_time;
        std::cout << "cover " << format_real(ev.cover_time) << " release " << format_real(ev.release_time)
                  << " confidence " << format_real(ev.confidence) << '\n';
    }
    const double offset = align_clocks(config.video_release, rssi_release);
    const AnnotationResult annotated = annotate(rssi, trajectory, offset);

    io::write_annotated(config.output, annotated.samples);
    if (!config.trajectory_output.empty()) io::write_trajectory(config.trajectory_output, trajectory);

    std::cout << "offset " << format_real(offset) << '\n'
              << "raw " << result.raw.size() << " likely " << result.likely.size() << " final "
              << trajectory.size() << '\n'
              << "annotated " << annotated.samples.size() << " dropped " << annotated.dropped << '\n';
    return 0;
}

// simulate ----------------------------------------------------------------

struct SimulateArgs {
    std::string shape = "straight";
    double speed = 0.35;
    double fps = 60.0;
    std::uint64_t seed = 1;
    std::string noise = "calibrated";
    double clock_offset = 0.0;
    double shadowing = 0.0;
    std::string out;
};

int run_simulate(const SimulateArgs& a) {
    sim::ScenarioOptions opt;
    if (a.shape == "straight") {
        opt.trajectory = sim::office_path(sim::PathShape::Straight);
    } else if (a.shape == "rectangle") {
        opt.trajectory = sim::office_path(sim::PathShape::Rectangle);
    } else if (a.shape == "zigzag") {
        opt.trajectory = sim::office_path(sim::PathShape::Zigzag);
    } else {
        throw InvalidParameter("shape must be straight, rectangle or zigzag");
    }
    opt.trajectory.speed = a.speed;
    opt.trajectory.fps = a.fps;
    if (a.noise == "calibrated") {
        opt.noise = sim::NoiseModel::calibrated(a.seed);
    } else if (a.noise == "none") {
        opt.noise = sim::NoiseModel::none();
    } else {
        throw InvalidParameter("noise must be calibrated or none");
    }
    opt.rssi.seed = a.seed;
    opt.rssi.clock_offset = a.clock_offset;
    opt.rssi.shadowing_sigma = a.shadowing;

    const sim::Dataset ds = sim::simulate(opt);

    const fs::path dir = a.out;
    fs::create_directories(dir);
    io::MarkerMapFile map;
    map.markers = ds.markers;
    io::write_marker_map(dir / "markers.txt", map);
    io::write_detections(dir / "detections.txt", ds.observations);
    io::write_rssi_log(dir / "rssi.txt", ds.rssi);
    io::write_path(dir / "path.txt", ds.path);
    std::vector<FinalPose> truth;
    truth.reserve(ds.truth.size());
    for (const auto& t : ds.truth) truth.push_back(t.pose);
    io::write_trajectory(dir / "truth.txt", truth);

    std::ofstream cfg(dir / "run.cfg");
    cfg << "# simulated " << a.shape << " run, seed " << a.seed << ", noise " << a.noise << '\n'
        << "detections = detections.txt\n"
        << "rssi = rssi.txt\n"
        << "markers = markers.txt\n"
        << "output = annotated.txt\n"
        << "trajectory_output = trajectory.txt\n"
        << "video_release = " << format_real(ds.video_release) << '\n'
        << "seed = " << a.seed << '\n';
    if (!cfg) throw IoError("failed writing " + (dir / "run.cfg").string());

    std::cout << "truth " << ds.truth.size() << " detections " << ds.observations.size() << " rssi "
              << ds.rssi.size() << '\n';
    return 0;
}

// evaluate ----------------------------------------------------------------

struct EvaluateArgs {
    std::string trajectory, path, penalty = "append", plot, plot_config, distances;
    bool planar = false;
};

int run_evaluate(const EvaluateArgs& a) {
    const auto trajectory = io::read_trajectory(fs::path(a.trajectory));
    const auto path = io::read_path(fs::path(a.path));
    EvaluationOptions opt;
    opt.planar = a.planar;
    opt.penalty = parse_penalty(a.penalty);
    const DeviationReport r = trajectory_report(trajectory, path, opt);

    std::cout << "points " << trajectory.size() << '\n'
              << "scored " << r.distances.size() << '\n'
              << "median " << format_real(r.median) << '\n'
              << "mean " << format_real(r.mean) << '\n'
              << "drag " << format_real(r.drag_penalty) << '\n'
              << "penalty " << penalty_name(opt.penalty) << '\n';

    if (!a.distances.empty()) {
        std::ostringstream ss;
        for (double d : r.distances) ss << format_real(d) << '\n';
        plot::write_text(a.distances, ss.str());
    }
    if (!a.plot.empty()) {
        const io::PlotConfig pc = a.plot_config.empty() ? io::PlotConfig{} : io::read_plot_config(fs::path(a.plot_config));
        const auto points = positions_of(trajectory);
        plot::write_text(a.plot, plot::map_svg(path, points, pc));
    }
    return 0;
}

// sweep -------------------------------------------------------------------

struct SweepArgs {
    std::vector<std::string> datasets;
    std::vector<int> frame_windows{15};
    std::vector<int> closest{20};
    std::vector<int> survivors{10};
    std::vector<std::string> q{"0.2"};
    std::vector<double> r{0.01};
    std::string penalty = "none";
    bool planar = false;
    std::string out;
    std::string plots;
};

std::string cell_label(const PipelineParams& p) {
    std::ostringstream ss;
    ss << "F" << p.frame_window << " C" << p.pruning.closest_count << " U" << p.pruning.survivors;
    if (p.filter) ss << " q" << format_real(p.filter->measurement_noise) << " r" << format_real(p.filter->process_noise);
    return ss.str();
}

int run_sweep(const SweepArgs& a) {
    if (a.datasets.empty()) throw InvalidParameter("sweep needs at least one --dataset directory");
    std::vector<EvaluationRun> runs;
    for (const auto& d : a.datasets) {
        const fs::path dir = d;
        io::RunConfig config;
        if (fs::exists(dir / "run.cfg")) config = io::read_run_config(dir / "run.cfg");
        const fs::path markers = config.markers.empty() ? dir / "markers.txt" : config.markers;
        const fs::path detections = config.detections.empty() ? dir / "detections.txt" : config.detections;
        const auto map_file = io::read_marker_map(markers);
        const auto obs = io::read_detections(detections);
        EvaluationRun run;
        run.name = dir.filename().empty() ? dir.parent_path().filename().string() : dir.filename().string();
        run.raw = raw_poses(obs, MarkerMap(map_file.markers), config.rig);
        run.path = io::read_path(dir / "path.txt");
        runs.push_back(std::move(run));
    }

    SweepGrid grid;
    grid.frame_windows = a.frame_windows;
    grid.closest_counts = a.closest;
    grid.survivor_counts = a.survivors;
    grid.r_values = a.r;
    grid.q_values.clear();
    for (const auto& q : a.q) {
        if (q == "none") {
            grid.q_values.emplace_back(std::nullopt);
        } else {
            double v = 0.0;
            const char* end = q.data() + q.size();
            const auto [ptr, ec] = std::from_chars(q.data(), end, v);
            if (ec != std::errc{} || ptr != end) throw InvalidParameter("--q: '" + q + "' is not a number or 'none'");
            grid.q_values.emplace_back(v);
        }
    }
    EvaluationOptions opt;
    opt.planar = a.planar;
    opt.penalty = parse_penalty(a.penalty);

    const auto cells = parameter_sweep(runs, grid, opt);

    std::ostringstream table;
    table << "F\tC\tU\tq\tr\trun\tscored\tmedian\tmean\tdrag\n";
    auto row = [&](const PipelineParams& p, const std::string& run, const DeviationReport& rep) {
        table << p.frame_window << '\t' << p.pruning.closest_count << '\t' << p.pruning.survivors << '\t'
              << (p.filter ? format_real(p.filter->measurement_noise) : "-") << '\t'
              << (p.filter ? format_real(p.filter->process_noise) : "-") << '\t' << run << '\t'
              << rep.distances.size() << '\t' << format_real(rep.median) << '\t' << format_real(rep.mean) << '\t'
              << format_real(rep.drag_penalty) << '\n';
    };
    for (const auto& c : cells) {
        row(c.params, "pooled", c.pooled);
        for (std::size_t i = 0; i < c.per_run.size(); ++i) row(c.params, runs[i].name, c.per_run[i]);
    }
    if (a.out.empty()) {
        std::cout << table.str();
    } else {
        plot::write_text(a.out, table.str());
    }

    if (!a.plots.empty()) {
        fs::create_directories(a.plots);
        std::vector<plot::Series> pooled;
        for (const auto& c : cells) pooled.push_back({cell_label(c.params), c.pooled.distances});
        plot::write_text(fs::path(a.plots) / "pooled.svg", plot::boxplot_svg(pooled, "pooled deviations"));
        for (std::size_t i = 0; i < runs.size(); ++i) {
            std::vector<plot::Series> per;
            for (const auto& c : cells) per.push_back({cell_label(c.params), c.per_run[i].distances});
            plot::write_text(fs::path(a.plots) / (runs[i].name + ".svg"),
                             plot::boxplot_svg(per, "deviations: " + runs[i].name));
        }
    }
    return 0;
}

// sync-detect -------------------------------------------------------------

struct SyncArgs {
    std::string rssi;
    CoverDetectParams cover;
};

int run_sync_detect(const SyncArgs& a) {
    const auto samples = io::read_rssi_log(fs::path(a.rssi));
    const CoverEvent ev = detect_cover_event(samples, a.cover);
    std::cout << "cover " << format_real(ev.cover_time) << '\n'
              << "release " << format_real(ev.release_time) << '\n'
              << "confidence " << format_real(ev.confidence) << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"posemark: pose-annotated RSSI datasets from fiducial-marker video"};
    app.require_subcommand(1);

    AnnotateArgs ann;
    auto* annotate_cmd = app.add_subcommand("annotate", "detections + RSSI + marker map -> annotated RSSI file");
    annotate_cmd->add_option("--config", ann.config, "run configuration (key = value)");
    annotate_cmd->add_option("--detections", ann.detections, "marker detections file");
    annotate_cmd->add_option("--rssi", ann.rssi, "RSSI log");
    annotate_cmd->add_option("--markers", ann.markers, "marker map");
    annotate_cmd->add_option("--out", ann.out, "annotated output file");
    annotate_cmd->add_option("--trajectory-out", ann.trajectory_out, "also write the final trajectory here");
    add_pipeline_flags(*annotate_cmd, ann.flags);
    ann.flags.add(*annotate_cmd, "--sync-at", "sync_at", "RSSI-clock release time; skips cover detection");
    ann.flags.add(*annotate_cmd, "--video-release", "video_release", "video-clock release time");
    ann.flags.add(*annotate_cmd, "--band-low", "band_low", "strong band lower edge, dBm");
    ann.flags.add(*annotate_cmd, "--band-high", "band_high", "strong band upper edge, dBm");
    ann.flags.add(*annotate_cmd, "--window", "window", "cover detection window, seconds");
    ann.flags.add(*annotate_cmd, "--threshold", "threshold", "dip level as a fraction of the baseline");

    SimulateArgs simargs;
    auto* simulate_cmd = app.add_subcommand("simulate", "write a synthetic dataset for the reference office");
    simulate_cmd->add_option("--shape", simargs.shape, "straight | rectangle | zigzag")->capture_default_str();
    simulate_cmd->add_option("--speed", simargs.speed, "m/s")->capture_default_str();
    simulate_cmd->add_option("--fps", simargs.fps, "per camera")->capture_default_str();
    simulate_cmd->add_option("--seed", simargs.seed)->capture_default_str();
    simulate_cmd->add_option("--noise", simargs.noise, "calibrated | none")->capture_default_str();
    simulate_cmd->add_option("--clock-offset", simargs.clock_offset, "RSSI clock minus video clock, s");
    simulate_cmd->add_option("--shadowing", simargs.shadowing, "RSSI shadowing sigma, dB");
    simulate_cmd->add_option("--out", simargs.out, "output directory")->required();

    EvaluateArgs ev;
    auto* evaluate_cmd = app.add_subcommand("evaluate", "deviation of a trajectory from its path");
    evaluate_cmd->add_option("--trajectory", ev.trajectory)->required();
    evaluate_cmd->add_option("--path", ev.path)->required();
    evaluate_cmd->add_flag("--planar", ev.planar, "ignore height");
    evaluate_cmd->add_option("--penalty", ev.penalty, "none | append | accumulate")->capture_default_str();
    evaluate_cmd->add_option("--distances", ev.distances, "write per-point distances here");
    evaluate_cmd->add_option("--plot", ev.plot, "write a top-down SVG map here");
    evaluate_cmd->add_option("--plot-config", ev.plot_config, "map scale settings");

    SweepArgs sw;
    auto* sweep_cmd = app.add_subcommand("sweep", "pipeline parameter grid over recorded runs");
    sweep_cmd->add_option("--dataset", sw.datasets, "run directory (simulate output layout), repeatable")->required();
    sweep_cmd->add_option("--frame-window", sw.frame_windows)->delimiter(',');
    sweep_cmd->add_option("--closest", sw.closest, "0 disables")->delimiter(',');
    sweep_cmd->add_option("--survivors", sw.survivors, "0 disables")->delimiter(',');
    sweep_cmd->add_option("--q", sw.q, "'none' disables the filter")->delimiter(',');
    sweep_cmd->add_option("--r", sw.r)->delimiter(',');
    sweep_cmd->add_option("--penalty", sw.penalty, "none | append | accumulate")->capture_default_str();
    sweep_cmd->add_flag("--planar", sw.planar);
    sweep_cmd->add_option("--out", sw.out, "TSV report (stdout when absent)");
    sweep_cmd->add_option("--plots", sw.plots, "directory for SVG boxplots");

    SyncArgs sy;
    auto* sync_cmd = app.add_subcommand("sync-detect", "locate the hand-cover event in an RSSI log");
    sync_cmd->add_option("--rssi", sy.rssi)->required();
    sync_cmd->add_option("--band-low", sy.cover.band_low)->capture_default_str();
    sync_cmd->add_option("--band-high", sy.cover.band_high)->capture_default_str();
    sync_cmd->add_option("--window", sy.cover.window)->capture_default_str();
    sync_cmd->add_option("--threshold", sy.cover.threshold)->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    }

    try {
        if (annotate_cmd->parsed()) return run_annotate(ann);
        if (simulate_cmd->parsed()) return run_simulate(simargs);
        if (evaluate_cmd->parsed()) return run_evaluate(ev);
        if (sweep_cmd->parsed()) return run_sweep(sw);
        if (sync_cmd->parsed()) return run_sync_detect(sy);
    } catch (const std::exception& e) {
        std::cerr << "posemark: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
