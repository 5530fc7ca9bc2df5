#pragma once

#include <array>

#include "momap/raster.hpp"

namespace momap {

/// Validity threshold for the t_z denominators (grid + flow), in normalized
/// grid units. Pixels whose second-frame position falls on the principal
/// axis column/row are masked instead of dividing by ~0.
inline constexpr double kDenomEpsilon = 1e-6;

/// Validity threshold for |u| and |v| in the in-plane rotation map. A pixel
/// exactly at the principal point has no direction and is masked.
inline constexpr double kNormEpsilon = 1e-6;

/// Channel order of a MotionMapStack. The two t_z channels are independent
/// estimates of the same degree of freedom, one from horizontal and one from
/// vertical flow.
enum MapChannel : int {
    kMapTx = 0,
    kMapTy = 1,
    kMapTzFromX = 2,
    kMapTzFromY = 3,
    kMapRx = 4,
    kMapRy = 5,
    kMapRz = 6,
};

inline constexpr int kMapChannelCount = 7;

/// The seven per-degree-of-freedom motion maps produced by decompose(), each
/// with its own validity mask. Translation maps are in depth units, rotation
/// maps in radians; all values follow the scene-motion sign convention
/// documented on Pose6DoF.
struct MotionMapStack {
    std::array<RasterMap, kMapChannelCount> maps;

    const RasterMap& operator[](int channel) const {
        return maps[static_cast<std::size_t>(channel)];
    }
    RasterMap& operator[](int channel) { return maps[static_cast<std::size_t>(channel)]; }

    int width() const { return maps[0].width(); }
    int height() const { return maps[0].height(); }
};

/// t_x = flow_x / fx * depth. Exact for a pure lateral scene translation:
/// the map is then constant and equals the translation.
RasterMap map_tx(const RasterMap& flow_x, const RasterMap& depth, const CameraModel& camera);

/// t_y = flow_y / fy * depth.
RasterMap map_ty(const RasterMap& flow_y, const RasterMap& depth, const CameraModel& camera);

/// t_z = -flow_x / (grid_x + flow_x) * depth, masked where the denominator
/// magnitude falls below kDenomEpsilon. Exact for a pure motion along the
/// optical axis.
RasterMap map_tz_from_x(const RasterMap& flow_x, const CoordinateGrid& grid,
                        const RasterMap& depth);

/// t_z = -flow_y / (grid_y + flow_y) * depth, masked like map_tz_from_x.
RasterMap map_tz_from_y(const RasterMap& flow_y, const CoordinateGrid& grid,
                        const RasterMap& depth);

/// r_x = arctan((grid_x + flow_x) / fx) - arctan(grid_x / fx). Depth-free;
/// exact for a pure rotation in the x/z plane.
RasterMap map_rx(const RasterMap& flow_x, const CoordinateGrid& grid, const CameraModel& camera);

/// r_y = arctan((grid_y + flow_y) / fy) - arctan(grid_y / fy).
RasterMap map_ry(const RasterMap& flow_y, const CoordinateGrid& grid, const CameraModel& camera);

/// In-plane rotation from the turn of the viewing ray between frames:
/// with u = (grid_x/fx, grid_y/fy) and v the same for the moved pixel,
/// r_z = -arccos(u.v / (|u||v|)) * sign(u x v). Dividing by the focal
/// lengths makes u and v live in the metric camera plane, so the value is
/// exact even for anisotropic pixels. Pixels with |u| or |v| below
/// kNormEpsilon are masked; parallel u, v give exactly 0.
RasterMap map_rz(const RasterMap& flow_x, const RasterMap& flow_y, const CoordinateGrid& grid,
                 const CameraModel& camera);

/// Runs all seven map operations on one flow/depth pair. All inputs must
/// share dimensions with the camera. Pixels with invalid or non-positive
/// depth are invalidated in the translation maps only; rotation maps do not
/// consume depth.
MotionMapStack decompose(const RasterMap& flow_x, const RasterMap& flow_y,
                         const RasterMap& depth, const CameraModel& camera);

}  // namespace momap
