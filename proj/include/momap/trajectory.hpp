#pragma once

#include <cstddef>
#include <vector>

#include "momap/se3.hpp"

namespace momap {

/// An ordered sequence of absolute camera-to-world poses with the cumulative
/// arc length of the ground path (Euclidean distance between consecutive
/// translation parts), indexed by frame.
struct Trajectory {
    std::vector<TransformSE3> poses;
    std::vector<double> cum_length;  // same size as poses, cum_length[0] == 0

    static Trajectory from_poses(std::vector<TransformSE3> poses);

    std::size_t size() const { return poses.size(); }
    bool empty() const { return poses.empty(); }
    double path_length() const { return cum_length.empty() ? 0.0 : cum_length.back(); }
};

}  // namespace momap
