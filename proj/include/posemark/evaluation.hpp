#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "posemark/geometry.hpp"
#include "posemark/pipeline.hpp"
#include "posemark/smoothing.hpp"

namespace posemark {

/// A straight leg of a predetermined path, optionally with its traversal times.
struct PathSegment {
    Vec3 start = Vec3::Zero();
    Vec3 end = Vec3::Zero();
    std::optional<double> start_time;
    std::optional<double> end_time;

    /// Throws InvalidParameter for a degenerate segment or reversed times.
    void validate() const;
};

/// Parameters that produced a report; zero / absent means a disabled stage.
struct ParameterTag {
    int closest_count = 0;
    int survivors = 0;
    std::optional<double> measurement_noise;
    std::optional<double> process_noise;
};

struct DeviationReport {
    std::vector<double> distances;
    double median = 0.0;
    double mean = 0.0;
    double drag_penalty = 0.0;  ///< summed drag, 0 if not applied
    ParameterTag tag;
};

/// How drag is charged against a trajectory.
///  Append:     each timed segment's drag joins the distance list.
///  Accumulate: each point's deviation grows by the drag of its nearest
///              segment, so lag shifts the whole distribution.
enum class PenaltyMode { None, Append, Accumulate };

struct EvaluationOptions {
    bool planar = false;  ///< ignore z
    PenaltyMode penalty = PenaltyMode::None;
};

double point_segment_distance(const Vec3& p, const PathSegment& seg, bool planar = false);

/// Distance of each point to its nearest segment, with median and mean.
/// Throws InvalidParameter if `points` or `segments` is empty.
DeviationReport deviation_report(std::span<const Vec3> points, std::span<const PathSegment> segments,
                                 bool planar = false);

/// Distance between `seg.end` and the trajectory position at `seg.end_time`.
/// Throws InvalidParameter without an end time and ExtrapolationError when
/// the trajectory does not span it.
double drag_penalty(std::span<const FinalPose> trajectory, const PathSegment& seg, bool planar = false);

/// Deviation report over the final poses with the requested drag penalty.
/// Untimed segments carry no drag.
DeviationReport trajectory_report(std::span<const FinalPose> trajectory, std::span<const PathSegment> segments,
                                  const EvaluationOptions& options = {});

double median_of(std::vector<double> values);
double mean_of(std::span<const double> values);

std::vector<Vec3> positions_of(std::span<const FinalPose> poses);
std::vector<Vec3> positions_of(std::span<const RawPose> poses);

/// One recorded run: its raw bundle poses and the path it followed.
struct EvaluationRun {
    std::string name;
    std::vector<RawPose> raw;
    std::vector<PathSegment> path;
};

struct SweepGrid {
    std::vector<int> frame_windows{15};
    std::vector<int> closest_counts{20};             ///< 0 disables selection
    std::vector<int> survivor_counts{10};            ///< 0 disables elimination
    std::vector<std::optional<double>> q_values{0.2};  ///< nullopt disables the filter
    std::vector<double> r_values{0.01};
};

struct SweepCell {
    PipelineParams params;
    DeviationReport pooled;
    std::vector<DeviationReport> per_run;  ///< in run order
};

/// Runs the pipeline for every grid cell on every run. Without a filter the
/// likely poses themselves are scored. Cells are independent and run
/// concurrently; output order follows the grid.
std::vector<SweepCell> parameter_sweep(std::span<const EvaluationRun> runs, const SweepGrid& grid,
                                       const EvaluationOptions& options = {});

/// Scores one pipeline configuration against one run.
DeviationReport evaluate_run(const EvaluationRun& run, const PipelineParams& params,
                             const EvaluationOptions& options = {});

}  // namespace posemark
