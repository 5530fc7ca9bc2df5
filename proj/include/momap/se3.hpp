#pragma once

#include <Eigen/Core>

namespace momap {

/// Six degrees of freedom of a rigid motion, expressed in the scene-motion
/// convention: the camera is treated as static and the values describe how
/// the scene moves relative to it between two frames. Camera ego-motion is
/// the inverse transform.
///
/// Translations are in the same unit as the depth input. Rotations are Euler
/// angles in radians, each named after the image axis whose flow it
/// generates (camera axes: x right, y down, z forward):
///  - positive rx swings scene points toward +x in the image
///    (rotation in the x/z plane),
///  - positive ry swings scene points toward +y (rotation in the y/z plane),
///  - positive rz rotates the +y image axis toward +x, which is
///    counter-clockwise on screen with y pointing down.
struct Pose6DoF {
    double tx = 0.0;
    double ty = 0.0;
    double tz = 0.0;
    double rx = 0.0;
    double ry = 0.0;
    double rz = 0.0;
};

/// Rigid transform p -> R p + t with an orthonormal R (det +1).
struct TransformSE3 {
    Eigen::Matrix3d rotation = Eigen::Matrix3d::Identity();
    Eigen::Vector3d translation = Eigen::Vector3d::Zero();

    static TransformSE3 identity() { return TransformSE3{}; }

    Eigen::Vector3d apply(const Eigen::Vector3d& p) const { return rotation * p + translation; }
};

/// Builds the rigid transform R = Rz(rz) * Ry(ry) * Rx(rx), t = (tx, ty, tz),
/// with the elementary rotations oriented as documented on Pose6DoF.
TransformSE3 se3_from_6dof(const Pose6DoF& pose);

/// Recovers the six components from a rigid transform. Throws when the
/// middle angle is within 1e-6 rad of +/- pi/2 (gimbal lock); away from that
/// region the round trip through se3_from_6dof is exact to ~1e-12.
Pose6DoF pose_from_se3(const TransformSE3& transform);

/// compose(a, b) applies b first, then a: (a o b)(p) = a(b(p)).
TransformSE3 compose(const TransformSE3& a, const TransformSE3& b);

TransformSE3 inverse(const TransformSE3& transform);

/// Nearest rotation matrix in the Frobenius sense (polar decomposition via
/// SVD, reflection corrected). Used to clean up rotations read from text.
Eigen::Matrix3d nearest_rotation(const Eigen::Matrix3d& m);

/// Angle of a rotation matrix in radians, in [0, pi].
double rotation_angle(const Eigen::Matrix3d& rotation);

}  // namespace momap
