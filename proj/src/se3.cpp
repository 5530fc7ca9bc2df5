#include "momap/se3.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace momap {

namespace {

// Elementary generators matching the Pose6DoF axis semantics. Each one is an
// exact 2D rotation of the plane it names; se3_from_6dof composes them as
// Rz * Ry * Rx.
Eigen::Matrix3d rot_x_flow(double a) {
    // x/z plane: image x coordinates of all scene points advance by angle a.
    Eigen::Matrix3d r;
    r << std::cos(a), 0.0, std::sin(a),
        0.0, 1.0, 0.0,
        -std::sin(a), 0.0, std::cos(a);
    return r;
}

Eigen::Matrix3d rot_y_flow(double b) {
    // y/z plane: image y coordinates advance by angle b.
    Eigen::Matrix3d r;
    r << 1.0, 0.0, 0.0,
        0.0, std::cos(b), std::sin(b),
        0.0, -std::sin(b), std::cos(b);
    return r;
}

Eigen::Matrix3d rot_in_plane(double c) {
    // x/y plane: rotates the +y image axis toward +x.
    Eigen::Matrix3d r;
    r << std::cos(c), std::sin(c), 0.0,
        -std::sin(c), std::cos(c), 0.0,
        0.0, 0.0, 1.0;
    return r;
}

}  // namespace

TransformSE3 se3_from_6dof(const Pose6DoF& pose) {
    TransformSE3 transform;
    transform.rotation = rot_in_plane(pose.rz) * rot_y_flow(pose.ry) * rot_x_flow(pose.rx);
    transform.translation = Eigen::Vector3d(pose.tx, pose.ty, pose.tz);
    return transform;
}

Pose6DoF pose_from_se3(const TransformSE3& transform) {
    const Eigen::Matrix3d& r = transform.rotation;
    // With R = Rz(c) * Ry(b) * Rx(a) in the generators above:
    //   R(2,1) = -sin(b)
    //   R(2,0) = -cos(b) sin(a),  R(2,2) = cos(b) cos(a)
    //   R(0,1) =  sin(c) cos(b),  R(1,1) = cos(c) cos(b)
    const double sin_b = -r(2, 1);
    const double cos_b = std::sqrt(r(2, 0) * r(2, 0) + r(2, 2) * r(2, 2));
    if (cos_b < 1e-6) {
        throw std::runtime_error(
            "pose_from_se3: ry within 1e-6 rad of +/- pi/2, Euler angles are degenerate");
    }
    Pose6DoF pose;
    pose.ry = std::atan2(sin_b, cos_b);
    pose.rx = std::atan2(-r(2, 0), r(2, 2));
    pose.rz = std::atan2(r(0, 1), r(1, 1));
    pose.tx = transform.translation.x();
    pose.ty = transform.translation.y();
    pose.tz = transform.translation.z();
    return pose;
}

TransformSE3 compose(const TransformSE3& a, const TransformSE3& b) {
    TransformSE3 out;
    out.rotation = a.rotation * b.rotation;
    out.translation = a.rotation * b.translation + a.translation;
    return out;
}

TransformSE3 inverse(const TransformSE3& transform) {
    TransformSE3 out;
    out.rotation = transform.rotation.transpose();
    out.translation = -(out.rotation * transform.translation);
    return out;
}

Eigen::Matrix3d nearest_rotation(const Eigen::Matrix3d& m) {
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Eigen::Matrix3d u = svd.matrixU();
    const Eigen::Matrix3d v = svd.matrixV();
    if ((u * v.transpose()).determinant() < 0.0) {
        u.col(2) *= -1.0;
    }
    return u * v.transpose();
}

double rotation_angle(const Eigen::Matrix3d& rotation) {
    const double cos_angle = std::clamp((rotation.trace() - 1.0) / 2.0, -1.0, 1.0);
    return std::acos(cos_angle);
}

}  // namespace momap
