#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "momap/trajectory.hpp"

namespace momap {

/// Error of one sub-sequence that starts at frame start_index and spans the
/// requested arc length along the ground-truth path. Both errors are
/// normalized by that requested length: t_err is a dimensionless ratio,
/// r_err is in radians per length unit.
struct SegmentError {
    std::size_t start_index = 0;
    double length = 0.0;
    double t_err = 0.0;
    double r_err = 0.0;
};

/// The standard segment-length schedule: 100, 200, ..., 800 length units.
std::vector<double> default_segment_lengths();

/// Absolute trajectory error: the RMS distance between corresponding
/// positions after the closed-form rigid least-squares alignment of the
/// estimate onto the ground truth. Trajectories must have equal, nonzero
/// length.
double ate(const Trajectory& gt, const Trajectory& est);

/// Enumerates every sub-sequence: for each start frame and each requested
/// length, the end frame is the first one whose cumulative ground-truth path
/// length reaches the start's length plus the requested length (no
/// interpolation; starts that cannot reach it are skipped). The error
/// transform is inverse(est_rel) * gt_rel of the two relative transforms
/// over the segment.
std::vector<SegmentError> segment_errors(const Trajectory& gt, const Trajectory& est,
                                         std::span<const double> lengths);

struct MetricPair {
    double translation = 0.0;
    double rotation = 0.0;
};

/// Per-sequence root-mean-square over the squared segment errors
/// (translation and rotation alike), then a plain average across sequences,
/// so every sequence contributes equally regardless of its length. Empty
/// per-sequence lists are skipped; throws when all are empty.
MetricPair kitti_rmse(const std::vector<std::vector<SegmentError>>& per_sequence);

/// Pools the segments of all sequences into one set and takes the mean of
/// the absolute errors; no squaring and no per-sequence averaging, so long
/// sequences carry proportionally more weight. Throws when no segments
/// exist.
MetricPair rpe(const std::vector<std::vector<SegmentError>>& per_sequence);

struct RunStats {
    double mean = 0.0;
    double stddev = 0.0;  // sample standard deviation (n - 1 denominator)
};

/// Mean and sample standard deviation over per-run metric values; requires
/// at least two runs.
RunStats aggregate_runs(std::span<const double> per_run_values);

/// One column of a result table.
struct MetricCell {
    std::string name;
    double mean = 0.0;
    std::optional<double> stddev;  // rendered as "mean +- std" when present
};

/// Fixed-layout text table: one header line of metric names and one line of
/// values, columns aligned.
std::string format_metric_table_text(const std::vector<MetricCell>& cells);

/// CSV with the header "metric,mean,std"; the std field is empty for cells
/// without a standard deviation.
std::string format_metric_table_csv(const std::vector<MetricCell>& cells);

}  // namespace momap
