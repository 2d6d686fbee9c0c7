#include "posemark/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

#include "posemark/errors.hpp"
#include "posemark/sync.hpp"

namespace posemark {

namespace {

Vec3 flatten(const Vec3& v, bool planar) { return planar ? Vec3(v.x(), v.y(), 0.0) : v; }

}  // namespace

void PathSegment::validate() const {
    if (start == end) throw InvalidParameter("path segment has coincident endpoints");
    if (start_time && end_time && !(*end_time > *start_time)) {
        throw InvalidParameter("path segment end time must follow its start time");
    }
}

double point_segment_distance(const Vec3& p, const PathSegment& seg, bool planar) {
    const Vec3 a = flatten(seg.start, planar);
    const Vec3 b = flatten(seg.end, planar);
    const Vec3 q = flatten(p, planar);
    const Vec3 ab = b - a;
    const double len2 = ab.squaredNorm();
    if (len2 == 0.0) return (q - a).norm();  // segment seen end-on in planar mode
    const double t = std::clamp((q - a).dot(ab) / len2, 0.0, 1.0);
    return (q - (a + t * ab)).norm();
}

double median_of(std::vector<double> values) {
    if (values.empty()) return 0.0;
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
    const double upper = values[mid];
    if (values.size() % 2 == 1) return upper;
    const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
    return 0.5 * (lower + upper);
}

double mean_of(std::span<const double> values) {
    if (values.empty()) return 0.0;
    return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

std::vector<Vec3> positions_of(std::span<const FinalPose> poses) {
    std::vector<Vec3> out;
    out.reserve(poses.size());
    for (const auto& p : poses) out.push_back(p.position);
    return out;
}

std::vector<Vec3> positions_of(std::span<const RawPose> poses) {
    std::vector<Vec3> out;
    out.reserve(poses.size());
    for (const auto& p : poses) out.push_back(p.position);
    return out;
}

DeviationReport deviation_report(std::span<const Vec3> points, std::span<const PathSegment> segments, bool planar) {
    if (segments.empty()) throw InvalidParameter("no path segments to score against");
    if (points.empty()) throw InvalidParameter("no points to score");
    for (const auto& s : segments) s.validate();

    DeviationReport report;
    report.distances.reserve(points.size());
    for (const auto& p : points) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& s : segments) best = std::min(best, point_segment_distance(p, s, planar));
        report.distances.push_back(best);
    }
    report.median = median_of(report.distances);
    report.mean = mean_of(report.distances);
    return report;
}

double drag_penalty(std::span<const FinalPose> trajectory, const PathSegment& seg, bool planar) {
    if (!seg.end_time) throw InvalidParameter("drag penalty needs a segment end time");
    const Vec3 at_end = interpolate_pose(trajectory, *seg.end_time).first;
    return (flatten(at_end, planar) - flatten(seg.end, planar)).norm();
}

DeviationReport trajectory_report(std::span<const FinalPose> trajectory, std::span<const PathSegment> segments,
                                  const EvaluationOptions& options) {
    const auto points = positions_of(trajectory);
    DeviationReport report = deviation_report(points, segments, options.planar);
    if (options.penalty == PenaltyMode::None) return report;

    std::vector<double> drags(segments.size(), 0.0);
    for (std::size_t i = 0; i < segments.size(); ++i) {
        if (!segments[i].end_time) continue;
        drags[i] = drag_penalty(trajectory, segments[i], options.planar);
        report.drag_penalty += drags[i];
    }

    if (options.penalty == PenaltyMode::Append) {
        for (std::size_t i = 0; i < segments.size(); ++i) {
            if (segments[i].end_time) report.distances.push_back(drags[i]);
        }
    } else {
        for (std::size_t k = 0; k < points.size(); ++k) {
            // nearest segment again; ties go to the first, as in deviation_report
            std::size_t owner = 0;
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < segments.size(); ++i) {
                const double d = point_segment_distance(points[k], segments[i], options.planar);
                if (d < best) {
                    best = d;
                    owner = i;
                }
            }
            report.distances[k] += drags[owner];
        }
    }
    report.median = median_of(report.distances);
    report.mean = mean_of(report.distances);
    return report;
}

DeviationReport evaluate_run(const EvaluationRun& run, const PipelineParams& params, const EvaluationOptions& options) {
    const PipelineResult result = run_pipeline(run.raw, params);
    DeviationReport report;
    if (params.filter) {
        report = trajectory_report(result.final_poses, run.path, options);
    } else {
        report = deviation_report(positions_of(result.likely), run.path, options.planar);
    }
    report.tag.closest_count = params.pruning.closest_count;
    report.tag.survivors = params.pruning.survivors;
    if (params.filter) {
        report.tag.measurement_noise = params.filter->measurement_noise;
        report.tag.process_noise = params.filter->process_noise;
    }
    return report;
}

std::vector<SweepCell> parameter_sweep(std::span<const EvaluationRun> runs, const SweepGrid& grid,
                                       const EvaluationOptions& options) {
    std::vector<SweepCell> cells;
    for (int f : grid.frame_windows) {
        for (int c : grid.closest_counts) {
            for (int u : grid.survivor_counts) {
                for (const auto& q : grid.q_values) {
                    // r is irrelevant without a filter; emit the cell once
                    const std::size_t n_r = q ? grid.r_values.size() : std::min<std::size_t>(1, grid.r_values.size());
                    for (std::size_t ri = 0; ri < n_r; ++ri) {
                        SweepCell cell;
                        cell.params.frame_window = f;
                        cell.params.pruning = {c, u};
                        if (q) {
                            FilterParams fp;
                            fp.measurement_noise = *q;
                            fp.process_noise = grid.r_values[ri];
                            cell.params.filter = fp;
                        } else {
                            cell.params.filter.reset();
                        }
                        cells.push_back(std::move(cell));
                    }
                }
            }
        }
    }

    if (cells.empty()) throw InvalidParameter("empty sweep grid");

    auto evaluate_cell = [&](SweepCell& cell) {
        for (const auto& run : runs) {
            cell.per_run.push_back(evaluate_run(run, cell.params, options));
            const auto& r = cell.per_run.back();
            cell.pooled.distances.insert(cell.pooled.distances.end(), r.distances.begin(), r.distances.end());
            cell.pooled.drag_penalty += r.drag_penalty;
            cell.pooled.tag = r.tag;
        }
        cell.pooled.median = median_of(cell.pooled.distances);
        cell.pooled.mean = mean_of(cell.pooled.distances);
    };

    std::atomic<std::size_t> next{0};
    const unsigned n_threads = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                                                static_cast<unsigned>(cells.size())));
    std::vector<std::jthread> workers;
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    for (unsigned t = 0; t < n_threads; ++t) {
        workers.emplace_back([&] {
            for (std::size_t i = next++; i < cells.size(); i = next++) {
                try {
                    evaluate_cell(cells[i]);
                } catch (...) {
                    if (!failed.exchange(true)) failure = std::current_exception();
                }
            }
        });
    }
    workers.clear();
    if (failure) std::rethrow_exception(failure);
    return cells;
}

}  // namespace posemark
