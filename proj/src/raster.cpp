#include "momap/raster.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace momap {

RasterMap::RasterMap(int width, int height, double fill, bool valid) {
    if (width < 0 || height < 0) {
        throw std::invalid_argument("RasterMap: negative dimensions");
    }
    width_ = width;
    height_ = height;
    const std::size_t n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    values_.assign(n, fill);
    valid_.assign(n, valid ? 1 : 0);
}

std::size_t RasterMap::valid_count() const {
    return static_cast<std::size_t>(std::count(valid_.begin(), valid_.end(), std::uint8_t{1}));
}

double RasterMap::valid_fraction() const {
    if (values_.empty()) {
        return 0.0;
    }
    return static_cast<double>(valid_count()) / static_cast<double>(values_.size());
}

CameraModel CameraModel::from_pixel_focal(double focal_px, int width, int height) {
    if (focal_px <= 0.0) {
        throw std::invalid_argument("CameraModel: focal length must be positive");
    }
    if (width < 2 || height < 2) {
        throw std::invalid_argument("CameraModel: degenerate image dimensions");
    }
    CameraModel camera;
    camera.fx = focal_px / static_cast<double>(width);
    camera.fy = focal_px / static_cast<double>(height);
    camera.width = width;
    camera.height = height;
    return camera;
}

CoordinateGrid make_grid(const CameraModel& camera) {
    if (camera.width < 2 || camera.height < 2) {
        std::ostringstream msg;
        msg << "make_grid: degenerate dimensions " << camera.width << "x" << camera.height;
        throw std::invalid_argument(msg.str());
    }
    CoordinateGrid grid;
    grid.xs.resize(static_cast<std::size_t>(camera.width));
    grid.ys.resize(static_cast<std::size_t>(camera.height));
    const double w = static_cast<double>(camera.width);
    const double h = static_cast<double>(camera.height);
    for (int col = 0; col < camera.width; ++col) {
        grid.xs[static_cast<std::size_t>(col)] = (static_cast<double>(col) + 0.5 - w / 2.0) / w;
    }
    for (int row = 0; row < camera.height; ++row) {
        grid.ys[static_cast<std::size_t>(row)] = (static_cast<double>(row) + 0.5 - h / 2.0) / h;
    }
    return grid;
}

}  // namespace momap
