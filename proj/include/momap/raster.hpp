#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace momap {

/// Single-channel height x width grid of real values with a per-pixel
/// validity mask. Invalid pixels carry no information and are excluded from
/// every downstream statistic; file writers encode them as NaN.
class RasterMap {
public:
    RasterMap() = default;
    RasterMap(int width, int height, double fill = 0.0, bool valid = true);

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t pixel_count() const { return values_.size(); }

    double at(int row, int col) const { return values_[index(row, col)]; }
    double& at(int row, int col) { return values_[index(row, col)]; }
    bool is_valid(int row, int col) const { return valid_[index(row, col)] != 0; }

    /// Stores a value and marks the pixel valid.
    void set(int row, int col, double value) {
        values_[index(row, col)] = value;
        valid_[index(row, col)] = 1;
    }
    void set_valid(int row, int col, bool valid) { valid_[index(row, col)] = valid ? 1 : 0; }
    void invalidate(int row, int col) { valid_[index(row, col)] = 0; }

    std::size_t valid_count() const;
    double valid_fraction() const;
    bool same_size(const RasterMap& other) const {
        return width_ == other.width_ && height_ == other.height_;
    }

private:
    std::size_t index(int row, int col) const {
        return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(col);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<double> values_;
    std::vector<std::uint8_t> valid_;
};

/// Normalized pinhole intrinsics. Focal lengths are dimensionless: the focal
/// length in pixels divided by the image width (fx) respectively height (fy),
/// so that tan(view angle) = grid coordinate / focal on the grid produced by
/// make_grid(). A 1241x376 camera with a 718.856 px focal length has
/// fx = 0.5792..., fy = 1.9118....
struct CameraModel {
    double fx = 0.0;
    double fy = 0.0;
    int width = 0;
    int height = 0;

    static CameraModel from_pixel_focal(double focal_px, int width, int height);
};

/// Per-pixel normalized image coordinates. The x coordinate depends only on
/// the column and the y coordinate only on the row; both are antisymmetric
/// about the principal point and strictly increasing in pixel index.
struct CoordinateGrid {
    std::vector<double> xs;  // one entry per column
    std::vector<double> ys;  // one entry per row

    int width() const { return static_cast<int>(xs.size()); }
    int height() const { return static_cast<int>(ys.size()); }
    double x(int col) const { return xs[static_cast<std::size_t>(col)]; }
    double y(int row) const { return ys[static_cast<std::size_t>(row)]; }
};

/// Builds the normalized coordinate grid of the camera: the center of pixel
/// (row, col) maps to ((col + 0.5 - width/2) / width,
/// (row + 0.5 - height/2) / height). Coordinates therefore span (-0.5, 0.5)
/// in both axes independent of resolution, and flow vectors divided by
/// width/height live in the same units.
CoordinateGrid make_grid(const CameraModel& camera);

}  // namespace momap
