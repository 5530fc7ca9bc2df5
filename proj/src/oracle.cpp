#include "momap/oracle.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include "momap/geometry.hpp"

namespace momap {

namespace {

// Uniform double in [lo, hi) built directly from the generator output so the
// stream of samples is fixed by the seed alone.
double uniform(std::mt19937_64& rng, double lo, double hi) {
    const double unit = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return lo + unit * (hi - lo);
}

void require_camera_size(const char* op, const CameraModel& camera, const RasterMap& map) {
    if (camera.width != map.width() || camera.height != map.height()) {
        std::ostringstream msg;
        msg << op << ": dimension mismatch, camera is " << camera.width << "x" << camera.height
            << " but depth is " << map.width() << "x" << map.height();
        throw std::invalid_argument(msg.str());
    }
}

}  // namespace

Eigen::Vector3d back_project(const CameraModel& camera, double grid_x, double grid_y,
                             double depth) {
    return {grid_x / camera.fx * depth, grid_y / camera.fy * depth, depth};
}

std::pair<double, double> project(const CameraModel& camera, const Eigen::Vector3d& point) {
    return {camera.fx * point.x() / point.z(), camera.fy * point.y() / point.z()};
}

RasterMap plane_depth(const CameraModel& camera, double depth0) {
    if (!(depth0 > 0.0)) {
        throw std::invalid_argument("plane_depth: depth must be positive");
    }
    return RasterMap(camera.width, camera.height, depth0, true);
}

RasterMap slanted_plane_depth(const CameraModel& camera, double nx, double ny, double nz,
                              double offset) {
    const CoordinateGrid grid = make_grid(camera);
    RasterMap depth(camera.width, camera.height, 0.0, false);
    for (int row = 0; row < camera.height; ++row) {
        for (int col = 0; col < camera.width; ++col) {
            const double denom =
                nx * grid.x(col) / camera.fx + ny * grid.y(row) / camera.fy + nz;
            if (denom == 0.0) {
                continue;
            }
            const double d = offset / denom;
            if (d > 0.0 && std::isfinite(d)) {
                depth.set(row, col, d);
            }
        }
    }
    return depth;
}

RasterMap hills_depth(const CameraModel& camera, double depth0, double amplitude,
                      std::uint64_t seed) {
    if (!(depth0 > 0.0) || amplitude < 0.0 || amplitude >= 1.0) {
        throw std::invalid_argument("hills_depth: need depth0 > 0 and amplitude in [0, 1)");
    }
    constexpr int kWaves = 3;
    std::mt19937_64 rng(seed);
    double px[kWaves], py[kWaves], phase[kWaves], weight[kWaves];
    double weight_sum = 0.0;
    for (int k = 0; k < kWaves; ++k) {
        px[k] = uniform(rng, 0.5, 2.5);
        py[k] = uniform(rng, 0.5, 2.5);
        phase[k] = uniform(rng, 0.0, 2.0 * std::numbers::pi);
        weight[k] = uniform(rng, 0.5, 1.0);
        weight_sum += weight[k];
    }
    const CoordinateGrid grid = make_grid(camera);
    RasterMap depth(camera.width, camera.height, 0.0, true);
    for (int row = 0; row < camera.height; ++row) {
        for (int col = 0; col < camera.width; ++col) {
            double s = 0.0;
            for (int k = 0; k < kWaves; ++k) {
                s += weight[k] * std::sin(2.0 * std::numbers::pi *
                                              (px[k] * grid.x(col) + py[k] * grid.y(row)) +
                                          phase[k]);
            }
            depth.at(row, col) = depth0 * (1.0 + amplitude * s / weight_sum);
        }
    }
    return depth;
}

RasterMap make_scene(SceneKind kind, std::uint64_t seed, const CameraModel& camera,
                     double depth0) {
    switch (kind) {
        case SceneKind::kPlane:
            return plane_depth(camera, depth0);
        case SceneKind::kSlantedPlane: {
            std::mt19937_64 rng(seed);
            const double nx = uniform(rng, -0.15, 0.15);
            const double ny = uniform(rng, -0.15, 0.15);
            return slanted_plane_depth(camera, nx, ny, 1.0, depth0);
        }
        case SceneKind::kHills:
            return hills_depth(camera, depth0, 0.04, seed);
    }
    throw std::invalid_argument("make_scene: unknown scene kind");
}

RenderedFlow render_flow(const RasterMap& scene_depth, const TransformSE3& scene_motion,
                         const CameraModel& camera) {
    require_camera_size("render_flow", camera, scene_depth);
    const CoordinateGrid grid = make_grid(camera);
    RenderedFlow out{RasterMap(camera.width, camera.height, 0.0, false),
                     RasterMap(camera.width, camera.height, 0.0, false), scene_depth};
    std::size_t visible = 0;
    for (int row = 0; row < camera.height; ++row) {
        for (int col = 0; col < camera.width; ++col) {
            if (!scene_depth.is_valid(row, col) || scene_depth.at(row, col) <= 0.0) {
                continue;
            }
            const Eigen::Vector3d p1 =
                back_project(camera, grid.x(col), grid.y(row), scene_depth.at(row, col));
            const Eigen::Vector3d p2 = scene_motion.apply(p1);
            if (p2.z() <= 0.0) {
                continue;
            }
            const auto [gx2, gy2] = project(camera, p2);
            if (std::abs(gx2) > 0.5 || std::abs(gy2) > 0.5) {
                continue;
            }
            out.flow_x.set(row, col, gx2 - grid.x(col));
            out.flow_y.set(row, col, gy2 - grid.y(row));
            ++visible;
        }
    }
    if (visible == 0) {
        throw std::runtime_error("render_flow: no scene point remains visible after motion");
    }
    return out;
}

OracleCase generate_case(Dof dof, double magnitude, SceneKind kind, std::uint64_t seed,
                         const CameraModel& camera, double scene_depth) {
    Pose6DoF motion;
    switch (dof) {
        case Dof::kTx:
            motion.tx = magnitude;
            break;
        case Dof::kTy:
            motion.ty = magnitude;
            break;
        case Dof::kTz:
            motion.tz = magnitude;
            break;
        case Dof::kRx:
            motion.rx = magnitude;
            break;
        case Dof::kRy:
            motion.ry = magnitude;
            break;
        case Dof::kRz:
            motion.rz = magnitude;
            break;
    }
    return generate_combined_case(motion, kind, seed, camera, scene_depth);
}

OracleCase generate_combined_case(const Pose6DoF& motion, SceneKind kind, std::uint64_t seed,
                                  const CameraModel& camera, double scene_depth) {
    const RasterMap scene = make_scene(kind, seed, camera, scene_depth);
    RenderedFlow rendered = render_flow(scene, se3_from_6dof(motion), camera);
    return {std::move(rendered.flow_x), std::move(rendered.flow_y), std::move(rendered.depth),
            motion};
}

}  // namespace momap
