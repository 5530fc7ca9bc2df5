#include "momap/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace momap {

namespace {

void validate_config(const AggregationConfig& config) {
    if (config.strategy == AggregationStrategy::kTrimmedMean &&
        !(config.trim_fraction >= 0.0 && config.trim_fraction < 0.5)) {
        std::ostringstream msg;
        msg << "estimate_6dof: trim fraction must be in [0, 0.5), got " << config.trim_fraction;
        throw std::invalid_argument(msg.str());
    }
    if (!(config.min_valid_fraction > 0.0 && config.min_valid_fraction <= 1.0)) {
        std::ostringstream msg;
        msg << "estimate_6dof: min valid fraction must be in (0, 1], got "
            << config.min_valid_fraction;
        throw std::invalid_argument(msg.str());
    }
}

void append_valid(const RasterMap& map, std::vector<double>& values) {
    for (int row = 0; row < map.height(); ++row) {
        for (int col = 0; col < map.width(); ++col) {
            if (map.is_valid(row, col)) {
                values.push_back(map.at(row, col));
            }
        }
    }
}

void require_enough(const char* map_name, std::size_t valid, std::size_t total,
                    double min_fraction) {
    if (static_cast<double>(valid) < min_fraction * static_cast<double>(total)) {
        std::ostringstream msg;
        msg << "estimate_6dof: insufficient valid pixels in map " << map_name << ": " << valid
            << "/" << total << " below the required fraction " << min_fraction;
        throw std::runtime_error(msg.str());
    }
}

double aggregate(std::vector<double>& values, const AggregationConfig& config) {
    const std::size_t n = values.size();
    switch (config.strategy) {
        case AggregationStrategy::kMean:
            return std::accumulate(values.begin(), values.end(), 0.0) /
                   static_cast<double>(n);
        case AggregationStrategy::kMedian: {
            const std::size_t mid = n / 2;
            std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid),
                             values.end());
            const double upper = values[mid];
            if (n % 2 == 1) {
                return upper;
            }
            const double lower =
                *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
            return (lower + upper) / 2.0;
        }
        case AggregationStrategy::kTrimmedMean: {
            std::sort(values.begin(), values.end());
            const std::size_t k =
                static_cast<std::size_t>(config.trim_fraction * static_cast<double>(n));
            const std::size_t kept = n - 2 * k;
            return std::accumulate(values.begin() + static_cast<std::ptrdiff_t>(k),
                                   values.begin() + static_cast<std::ptrdiff_t>(k + kept), 0.0) /
                   static_cast<double>(kept);
        }
    }
    throw std::invalid_argument("estimate_6dof: unknown aggregation strategy");
}

double reduce_map(const RasterMap& map, const char* map_name, const AggregationConfig& config) {
    std::vector<double> values;
    values.reserve(map.pixel_count());
    append_valid(map, values);
    require_enough(map_name, values.size(), map.pixel_count(), config.min_valid_fraction);
    return aggregate(values, config);
}

double reduce_tz(const MotionMapStack& stack, const AggregationConfig& config) {
    switch (config.tz_fusion) {
        case TzFusion::kXOnly:
            return reduce_map(stack[kMapTzFromX], "t_z_from_x", config);
        case TzFusion::kYOnly:
            return reduce_map(stack[kMapTzFromY], "t_z_from_y", config);
        case TzFusion::kPooled: {
            std::vector<double> values;
            values.reserve(2 * stack[kMapTzFromX].pixel_count());
            append_valid(stack[kMapTzFromX], values);
            append_valid(stack[kMapTzFromY], values);
            require_enough("t_z (pooled)", values.size(),
                           2 * stack[kMapTzFromX].pixel_count(), config.min_valid_fraction);
            return aggregate(values, config);
        }
    }
    throw std::invalid_argument("estimate_6dof: unknown t_z fusion mode");
}

}  // namespace

Pose6DoF estimate_6dof(const MotionMapStack& stack, const AggregationConfig& config) {
    validate_config(config);
    if (stack[0].pixel_count() == 0) {
        throw std::invalid_argument("estimate_6dof: empty map stack");
    }
    for (int channel = 1; channel < kMapChannelCount; ++channel) {
        if (!stack[channel].same_size(stack[0])) {
            throw std::invalid_argument("estimate_6dof: map stack channels disagree in size");
        }
    }
    Pose6DoF pose;
    pose.tx = reduce_map(stack[kMapTx], "t_x", config);
    pose.ty = reduce_map(stack[kMapTy], "t_y", config);
    pose.tz = reduce_tz(stack, config);
    pose.rx = reduce_map(stack[kMapRx], "r_x", config);
    pose.ry = reduce_map(stack[kMapRy], "r_y", config);
    pose.rz = reduce_map(stack[kMapRz], "r_z", config);
    return pose;
}

Trajectory integrate_trajectory(std::span<const Pose6DoF> relative_motions,
                                MotionConvention convention) {
    if (relative_motions.empty()) {
        throw std::invalid_argument("integrate_trajectory: empty motion sequence");
    }
    std::vector<TransformSE3> poses;
    poses.reserve(relative_motions.size() + 1);
    poses.push_back(TransformSE3::identity());
    for (const Pose6DoF& motion : relative_motions) {
        TransformSE3 step = se3_from_6dof(motion);
        if (convention == MotionConvention::kSceneMotion) {
            step = inverse(step);
        }
        poses.push_back(compose(poses.back(), step));
    }
    return Trajectory::from_poses(std::move(poses));
}

}  // namespace momap
