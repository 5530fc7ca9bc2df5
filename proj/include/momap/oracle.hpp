#pragma once

#include <cstdint>
#include <utility>

#include <Eigen/Core>

#include "momap/raster.hpp"
#include "momap/se3.hpp"

namespace momap {

/// Pixel grid coordinates -> 3D point at the given depth (camera axes:
/// x right, y down, z forward; depth is the z coordinate).
Eigen::Vector3d back_project(const CameraModel& camera, double grid_x, double grid_y,
                             double depth);

/// 3D point with positive z -> grid coordinates.
std::pair<double, double> project(const CameraModel& camera, const Eigen::Vector3d& point);

enum class SceneKind {
    kPlane,         // fronto-parallel plane at constant depth
    kSlantedPlane,  // 3D plane with a seeded mild tilt
    kHills,         // seeded smooth random height-field around the base depth
};

/// Constant-depth scene.
RasterMap plane_depth(const CameraModel& camera, double depth0);

/// Depth of the 3D plane {p : nx*X + ny*Y + nz*Z = offset}; pixels where the
/// plane is behind the camera are invalid.
RasterMap slanted_plane_depth(const CameraModel& camera, double nx, double ny, double nz,
                              double offset);

/// Smooth random surface: depth0 * (1 + amplitude * s(x, y)) with s a seeded
/// sum of low-frequency sinusoids bounded by 1 in magnitude.
RasterMap hills_depth(const CameraModel& camera, double depth0, double amplitude,
                      std::uint64_t seed);

RasterMap make_scene(SceneKind kind, std::uint64_t seed, const CameraModel& camera,
                     double depth0);

struct RenderedFlow {
    RasterMap flow_x;  // normalized grid units
    RasterMap flow_y;
    RasterMap depth;   // first-frame depth, passed through
};

/// Renders the exact dense flow of a rigid scene motion: every valid scene
/// pixel is back-projected, moved by scene_motion, and re-projected. Pixels
/// whose moved point ends up at non-positive depth or outside the image
/// rectangle are invalid. Throws when no pixel stays visible.
RenderedFlow render_flow(const RasterMap& scene_depth, const TransformSE3& scene_motion,
                         const CameraModel& camera);

/// Degree-of-freedom index used by single-DoF test cases; the order matches
/// Pose6DoF and the MotionMapStack channels (with both t_z maps bound to
/// kTz).
enum class Dof { kTx = 0, kTy = 1, kTz = 2, kRx = 3, kRy = 4, kRz = 5 };

struct OracleCase {
    RasterMap flow_x;
    RasterMap flow_y;
    RasterMap depth;
    Pose6DoF ground_truth;  // scene-motion convention
};

/// Renders the flow of a motion with a single nonzero component. The
/// decomposition of such a case has the corresponding map constant and equal
/// to the magnitude at every valid pixel.
OracleCase generate_case(Dof dof, double magnitude, SceneKind kind, std::uint64_t seed,
                         const CameraModel& camera, double scene_depth = 5.0);

/// Renders the flow of an arbitrary combined motion.
OracleCase generate_combined_case(const Pose6DoF& motion, SceneKind kind, std::uint64_t seed,
                                  const CameraModel& camera, double scene_depth = 5.0);

}  // namespace momap
