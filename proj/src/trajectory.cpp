#include "momap/trajectory.hpp"

namespace momap {

Trajectory Trajectory::from_poses(std::vector<TransformSE3> poses) {
    Trajectory trajectory;
    trajectory.cum_length.reserve(poses.size());
    double total = 0.0;
    for (std::size_t i = 0; i < poses.size(); ++i) {
        if (i > 0) {
            total += (poses[i].translation - poses[i - 1].translation).norm();
        }
        trajectory.cum_length.push_back(total);
    }
    trajectory.poses = std::move(poses);
    return trajectory;
}

}  // namespace momap
