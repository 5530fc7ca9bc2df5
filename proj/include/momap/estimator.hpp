#pragma once

#include <span>

#include "momap/geometry.hpp"
#include "momap/se3.hpp"
#include "momap/trajectory.hpp"

namespace momap {

enum class AggregationStrategy {
    kMean,
    kMedian,       // exact median; the midpoint of the two central values for even counts
    kTrimmedMean,  // drops the lowest and highest trim_fraction of the values
};

/// How the two t_z maps are fused into the single t_z estimate.
enum class TzFusion {
    kXOnly,
    kYOnly,
    kPooled,  // one statistic over the union of both maps' valid pixels
};

struct AggregationConfig {
    AggregationStrategy strategy = AggregationStrategy::kMedian;
    double trim_fraction = 0.1;       // in [0, 0.5), used by kTrimmedMean only
    TzFusion tz_fusion = TzFusion::kPooled;
    double min_valid_fraction = 0.1;  // in (0, 1]
};

/// Reduces each motion map to one number with the configured statistic,
/// yielding the six degrees of freedom in the scene-motion convention of the
/// input maps. Throws when any used map (or the pooled t_z sample) has fewer
/// than min_valid_fraction valid pixels, naming the offending map.
Pose6DoF estimate_6dof(const MotionMapStack& stack, const AggregationConfig& config = {});

/// Sign convention of per-frame motions fed to integrate_trajectory.
enum class MotionConvention {
    kSceneMotion,   // how the scene moved relative to the camera (inverted on integration)
    kCameraMotion,  // camera ego-motion, accumulated directly
};

/// Chains per-frame motions into an absolute camera-to-world trajectory.
/// Pose 0 is the identity, so N motions produce N + 1 poses.
Trajectory integrate_trajectory(std::span<const Pose6DoF> relative_motions,
                                MotionConvention convention);

}  // namespace momap
