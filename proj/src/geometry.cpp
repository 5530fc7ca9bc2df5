#include "momap/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace momap {

namespace {

void require_same_size(const char* op, const RasterMap& a, const char* a_name,
                       const RasterMap& b, const char* b_name) {
    if (!a.same_size(b)) {
        std::ostringstream msg;
        msg << op << ": dimension mismatch, " << a_name << " is " << a.width() << "x"
            << a.height() << " but " << b_name << " is " << b.width() << "x" << b.height();
        throw std::invalid_argument(msg.str());
    }
}

void require_grid_size(const char* op, const CoordinateGrid& grid, const RasterMap& map) {
    if (grid.width() != map.width() || grid.height() != map.height()) {
        std::ostringstream msg;
        msg << op << ": dimension mismatch, grid is " << grid.width() << "x" << grid.height()
            << " but flow is " << map.width() << "x" << map.height();
        throw std::invalid_argument(msg.str());
    }
}

void require_positive_focal(const char* op, double focal) {
    if (!(focal > 0.0)) {
        std::ostringstream msg;
        msg << op << ": focal length must be positive, got " << focal;
        throw std::invalid_argument(msg.str());
    }
}

bool translation_pixel_valid(const RasterMap& flow, const RasterMap& depth, int row, int col) {
    return flow.is_valid(row, col) && depth.is_valid(row, col) && depth.at(row, col) > 0.0;
}

RasterMap lateral_translation_map(const RasterMap& flow, const RasterMap& depth, double focal) {
    RasterMap out(flow.width(), flow.height(), 0.0, false);
    for (int row = 0; row < flow.height(); ++row) {
        for (int col = 0; col < flow.width(); ++col) {
            if (!translation_pixel_valid(flow, depth, row, col)) {
                continue;
            }
            out.set(row, col, flow.at(row, col) / focal * depth.at(row, col));
        }
    }
    return out;
}

RasterMap axial_translation_map(const RasterMap& flow, const RasterMap& depth,
                                const CoordinateGrid& grid, bool horizontal) {
    RasterMap out(flow.width(), flow.height(), 0.0, false);
    for (int row = 0; row < flow.height(); ++row) {
        for (int col = 0; col < flow.width(); ++col) {
            if (!translation_pixel_valid(flow, depth, row, col)) {
                continue;
            }
            const double coord = horizontal ? grid.x(col) : grid.y(row);
            const double f = flow.at(row, col);
            const double denom = coord + f;
            if (std::abs(denom) < kDenomEpsilon) {
                continue;
            }
            out.set(row, col, -f / denom * depth.at(row, col));
        }
    }
    return out;
}

RasterMap view_angle_map(const RasterMap& flow, const CoordinateGrid& grid, double focal,
                         bool horizontal) {
    RasterMap out(flow.width(), flow.height(), 0.0, false);
    for (int row = 0; row < flow.height(); ++row) {
        for (int col = 0; col < flow.width(); ++col) {
            if (!flow.is_valid(row, col)) {
                continue;
            }
            const double coord = horizontal ? grid.x(col) : grid.y(row);
            const double f = flow.at(row, col);
            out.set(row, col, std::atan((coord + f) / focal) - std::atan(coord / focal));
        }
    }
    return out;
}

}  // namespace

RasterMap map_tx(const RasterMap& flow_x, const RasterMap& depth, const CameraModel& camera) {
    require_same_size("map_tx", flow_x, "flow_x", depth, "depth");
    require_positive_focal("map_tx", camera.fx);
    return lateral_translation_map(flow_x, depth, camera.fx);
}

RasterMap map_ty(const RasterMap& flow_y, const RasterMap& depth, const CameraModel& camera) {
    require_same_size("map_ty", flow_y, "flow_y", depth, "depth");
    require_positive_focal("map_ty", camera.fy);
    return lateral_translation_map(flow_y, depth, camera.fy);
}

RasterMap map_tz_from_x(const RasterMap& flow_x, const CoordinateGrid& grid,
                        const RasterMap& depth) {
    require_same_size("map_tz_from_x", flow_x, "flow_x", depth, "depth");
    require_grid_size("map_tz_from_x", grid, flow_x);
    return axial_translation_map(flow_x, depth, grid, true);
}

RasterMap map_tz_from_y(const RasterMap& flow_y, const CoordinateGrid& grid,
                        const RasterMap& depth) {
    require_same_size("map_tz_from_y", flow_y, "flow_y", depth, "depth");
    require_grid_size("map_tz_from_y", grid, flow_y);
    return axial_translation_map(flow_y, depth, grid, false);
}

RasterMap map_rx(const RasterMap& flow_x, const CoordinateGrid& grid, const CameraModel& camera) {
    require_grid_size("map_rx", grid, flow_x);
    require_positive_focal("map_rx", camera.fx);
    return view_angle_map(flow_x, grid, camera.fx, true);
}

RasterMap map_ry(const RasterMap& flow_y, const CoordinateGrid& grid, const CameraModel& camera) {
    require_grid_size("map_ry", grid, flow_y);
    require_positive_focal("map_ry", camera.fy);
    return view_angle_map(flow_y, grid, camera.fy, false);
}

RasterMap map_rz(const RasterMap& flow_x, const RasterMap& flow_y, const CoordinateGrid& grid,
                 const CameraModel& camera) {
    require_same_size("map_rz", flow_x, "flow_x", flow_y, "flow_y");
    require_grid_size("map_rz", grid, flow_x);
    require_positive_focal("map_rz", camera.fx);
    require_positive_focal("map_rz", camera.fy);
    RasterMap out(flow_x.width(), flow_x.height(), 0.0, false);
    for (int row = 0; row < flow_x.height(); ++row) {
        for (int col = 0; col < flow_x.width(); ++col) {
            if (!flow_x.is_valid(row, col) || !flow_y.is_valid(row, col)) {
                continue;
            }
            const double ux = grid.x(col) / camera.fx;
            const double uy = grid.y(row) / camera.fy;
            const double vx = (grid.x(col) + flow_x.at(row, col)) / camera.fx;
            const double vy = (grid.y(row) + flow_y.at(row, col)) / camera.fy;
            const double norm_u = std::sqrt(ux * ux + uy * uy);
            const double norm_v = std::sqrt(vx * vx + vy * vy);
            if (norm_u < kNormEpsilon || norm_v < kNormEpsilon) {
                continue;
            }
            const double cos_angle =
                std::clamp((ux * vx + uy * vy) / (norm_u * norm_v), -1.0, 1.0);
            const double cross = ux * vy - uy * vx;
            if (cross == 0.0) {
                out.set(row, col, 0.0);
            } else if (cross > 0.0) {
                out.set(row, col, -std::acos(cos_angle));
            } else {
                out.set(row, col, std::acos(cos_angle));
            }
        }
    }
    return out;
}

MotionMapStack decompose(const RasterMap& flow_x, const RasterMap& flow_y,
                         const RasterMap& depth, const CameraModel& camera) {
    require_same_size("decompose", flow_x, "flow_x", flow_y, "flow_y");
    require_same_size("decompose", flow_x, "flow_x", depth, "depth");
    if (camera.width != flow_x.width() || camera.height != flow_x.height()) {
        std::ostringstream msg;
        msg << "decompose: dimension mismatch, camera is " << camera.width << "x"
            << camera.height << " but flow is " << flow_x.width() << "x" << flow_x.height();
        throw std::invalid_argument(msg.str());
    }
    const CoordinateGrid grid = make_grid(camera);
    MotionMapStack stack;
    stack[kMapTx] = map_tx(flow_x, depth, camera);
    stack[kMapTy] = map_ty(flow_y, depth, camera);
    stack[kMapTzFromX] = map_tz_from_x(flow_x, grid, depth);
    stack[kMapTzFromY] = map_tz_from_y(flow_y, grid, depth);
    stack[kMapRx] = map_rx(flow_x, grid, camera);
    stack[kMapRy] = map_ry(flow_y, grid, camera);
    stack[kMapRz] = map_rz(flow_x, flow_y, grid, camera);
    return stack;
}

}  // namespace momap
