#pragma once

#include <filesystem>
#include <span>
#include <utility>
#include <vector>

#include "momap/geometry.hpp"
#include "momap/raster.hpp"
#include "momap/se3.hpp"
#include "momap/trajectory.hpp"

namespace momap::io {

/// All writers below first write to "<path>.tmp" and atomically rename, so a
/// failed run never leaves a partial output file behind.

/// Dense flow file (".flo"): float32 magic 202021.25, int32 width and
/// height, then height x width interleaved (u, v) float32 pairs, all
/// little-endian. On disk the flow is in pixels; in memory it is normalized
/// to grid units (u / width, v / height). Non-finite pairs mark invalid
/// pixels and are written back as NaN.
std::pair<RasterMap, RasterMap> read_flow_file(const std::filesystem::path& path);
void write_flow_file(const std::filesystem::path& path, const RasterMap& flow_x,
                     const RasterMap& flow_y);

/// Raster file: ASCII magic "FMAP1\n", uint32 width, height, channels
/// (little-endian, channels 1 or 7), then one row-major float32 plane per
/// channel. NaN encodes an invalid pixel.
RasterMap read_raster_file(const std::filesystem::path& path);
void write_raster_file(const std::filesystem::path& path, const RasterMap& raster);

/// Seven-channel raster holding a motion map stack, channels in the
/// MapChannel order.
MotionMapStack read_map_stack(const std::filesystem::path& path);
void write_map_stack(const std::filesystem::path& path, const MotionMapStack& stack);

/// Pose file: one pose per line as the 12 row-major entries of the 3x4
/// camera-to-world [R|t] matrix. Rotations whose orthonormality defect
/// exceeds 1e-9 are projected back onto the rotation group (beyond 1e-3 this
/// additionally prints a warning to stderr); clean rotations are kept
/// verbatim. Values are written with 17 significant digits, so a read/write
/// round trip is bit-exact.
std::vector<TransformSE3> read_pose_file(const std::filesystem::path& path);
void write_pose_file(const std::filesystem::path& path, std::span<const TransformSE3> poses);

Trajectory read_trajectory(const std::filesystem::path& path);

/// Intrinsics as a small key=value text file with the keys fx, fy, width,
/// height (focals normalized, '#' starts a comment line).
CameraModel read_camera_file(const std::filesystem::path& path);
void write_camera_file(const std::filesystem::path& path, const CameraModel& camera);

/// Writes arbitrary text with the same temp-and-rename discipline as the
/// binary writers.
void write_text_file(const std::filesystem::path& path, const std::string& text);

}  // namespace momap::io
