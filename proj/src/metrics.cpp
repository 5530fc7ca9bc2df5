#include "momap/metrics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace momap {

namespace {

void require_equal_length(const char* op, const Trajectory& gt, const Trajectory& est) {
    if (gt.size() != est.size()) {
        std::ostringstream msg;
        msg << op << ": trajectory length mismatch, ground truth has " << gt.size()
            << " poses but estimate has " << est.size();
        throw std::invalid_argument(msg.str());
    }
}

std::string format_number(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.6g", value);
    return buffer;
}

}  // namespace

std::vector<double> default_segment_lengths() {
    return {100.0, 200.0, 300.0, 400.0, 500.0, 600.0, 700.0, 800.0};
}

double ate(const Trajectory& gt, const Trajectory& est) {
    require_equal_length("ate", gt, est);
    if (gt.empty()) {
        throw std::invalid_argument("ate: empty trajectories");
    }
    const std::size_t n = gt.size();

    Eigen::Vector3d centroid_gt = Eigen::Vector3d::Zero();
    Eigen::Vector3d centroid_est = Eigen::Vector3d::Zero();
    for (std::size_t i = 0; i < n; ++i) {
        centroid_gt += gt.poses[i].translation;
        centroid_est += est.poses[i].translation;
    }
    centroid_gt /= static_cast<double>(n);
    centroid_est /= static_cast<double>(n);

    // Closed-form rigid alignment (Kabsch): R = argmin sum |R e_i + t - g_i|^2
    // from the SVD of the centered cross-covariance, reflection corrected.
    Eigen::Matrix3d cross = Eigen::Matrix3d::Zero();
    for (std::size_t i = 0; i < n; ++i) {
        cross += (est.poses[i].translation - centroid_est) *
                 (gt.poses[i].translation - centroid_gt).transpose();
    }
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(cross, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
    if ((svd.matrixV() * svd.matrixU().transpose()).determinant() < 0.0) {
        d(2, 2) = -1.0;
    }
    const Eigen::Matrix3d rotation = svd.matrixV() * d * svd.matrixU().transpose();
    const Eigen::Vector3d translation = centroid_gt - rotation * centroid_est;

    double sum_sq = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const Eigen::Vector3d residual =
            rotation * est.poses[i].translation + translation - gt.poses[i].translation;
        sum_sq += residual.squaredNorm();
    }
    return std::sqrt(sum_sq / static_cast<double>(n));
}

std::vector<SegmentError> segment_errors(const Trajectory& gt, const Trajectory& est,
                                         std::span<const double> lengths) {
    require_equal_length("segment_errors", gt, est);
    for (const double length : lengths) {
        if (!(length > 0.0)) {
            std::ostringstream msg;
            msg << "segment_errors: segment lengths must be positive, got " << length;
            throw std::invalid_argument(msg.str());
        }
    }
    std::vector<SegmentError> errors;
    const std::size_t n = gt.size();
    for (std::size_t start = 0; start + 1 < n; ++start) {
        for (const double length : lengths) {
            const double target = gt.cum_length[start] + length;
            const auto it = std::lower_bound(gt.cum_length.begin() + static_cast<std::ptrdiff_t>(start),
                                             gt.cum_length.end(), target);
            if (it == gt.cum_length.end()) {
                continue;  // the remaining path is shorter than this segment
            }
            const std::size_t end =
                static_cast<std::size_t>(it - gt.cum_length.begin());
            const TransformSE3 rel_gt = compose(inverse(gt.poses[start]), gt.poses[end]);
            const TransformSE3 rel_est = compose(inverse(est.poses[start]), est.poses[end]);
            const TransformSE3 error = compose(inverse(rel_est), rel_gt);
            SegmentError segment;
            segment.start_index = start;
            segment.length = length;
            segment.t_err = error.translation.norm() / length;
            segment.r_err = rotation_angle(error.rotation) / length;
            errors.push_back(segment);
        }
    }
    return errors;
}

MetricPair kitti_rmse(const std::vector<std::vector<SegmentError>>& per_sequence) {
    double sum_t = 0.0;
    double sum_r = 0.0;
    std::size_t used_sequences = 0;
    for (const auto& sequence : per_sequence) {
        if (sequence.empty()) {
            continue;
        }
        double sq_t = 0.0;
        double sq_r = 0.0;
        for (const SegmentError& segment : sequence) {
            sq_t += segment.t_err * segment.t_err;
            sq_r += segment.r_err * segment.r_err;
        }
        const double count = static_cast<double>(sequence.size());
        sum_t += std::sqrt(sq_t / count);
        sum_r += std::sqrt(sq_r / count);
        ++used_sequences;
    }
    if (used_sequences == 0) {
        throw std::runtime_error("kitti_rmse: no segment errors in any sequence");
    }
    return {sum_t / static_cast<double>(used_sequences),
            sum_r / static_cast<double>(used_sequences)};
}

MetricPair rpe(const std::vector<std::vector<SegmentError>>& per_sequence) {
    double sum_t = 0.0;
    double sum_r = 0.0;
    std::size_t total = 0;
    for (const auto& sequence : per_sequence) {
        for (const SegmentError& segment : sequence) {
            sum_t += std::abs(segment.t_err);
            sum_r += std::abs(segment.r_err);
            ++total;
        }
    }
    if (total == 0) {
        throw std::runtime_error("rpe: no segment errors in any sequence");
    }
    return {sum_t / static_cast<double>(total), sum_r / static_cast<double>(total)};
}

RunStats aggregate_runs(std::span<const double> per_run_values) {
    if (per_run_values.size() < 2) {
        throw std::invalid_argument("aggregate_runs: need at least two runs");
    }
    const double n = static_cast<double>(per_run_values.size());
    double sum = 0.0;
    for (const double value : per_run_values) {
        sum += value;
    }
    const double mean = sum / n;
    double sq = 0.0;
    for (const double value : per_run_values) {
        sq += (value - mean) * (value - mean);
    }
    return {mean, std::sqrt(sq / (n - 1.0))};
}

std::string format_metric_table_text(const std::vector<MetricCell>& cells) {
    std::vector<std::string> values;
    values.reserve(cells.size());
    for (const MetricCell& cell : cells) {
        std::string text = format_number(cell.mean);
        if (cell.stddev.has_value()) {
            text += " +- " + format_number(*cell.stddev);
        }
        values.push_back(std::move(text));
    }
    std::string header;
    std::string row;
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const std::size_t width = std::max(cells[i].name.size(), values[i].size());
        header += cells[i].name + std::string(width - cells[i].name.size(), ' ');
        row += values[i] + std::string(width - values[i].size(), ' ');
        if (i + 1 < cells.size()) {
            header += "  ";
            row += "  ";
        }
    }
    return header + "\n" + row + "\n";
}

std::string format_metric_table_csv(const std::vector<MetricCell>& cells) {
    std::string out = "metric,mean,std\n";
    for (const MetricCell& cell : cells) {
        out += cell.name + "," + format_number(cell.mean) + ",";
        if (cell.stddev.has_value()) {
            out += format_number(*cell.stddev);
        }
        out += "\n";
    }
    return out;
}

}  // namespace momap
