#include "momap/io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

namespace momap::io {

namespace {

namespace fs = std::filesystem;

constexpr float kFlowMagic = 202021.25f;
constexpr char kRasterMagic[6] = {'F', 'M', 'A', 'P', '1', '\n'};
constexpr std::int64_t kMaxDimension = 1000000;

[[noreturn]] void fail(const fs::path& path, const std::string& message) {
    throw std::runtime_error(path.string() + ": " + message);
}

std::vector<unsigned char> read_all(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        fail(path, "cannot open file for reading");
    }
    in.seekg(0, std::ios::end);
    const std::streamoff size = in.tellg();
    in.seekg(0, std::ios::beg);
    std::vector<unsigned char> bytes(static_cast<std::size_t>(size));
    if (size > 0) {
        in.read(reinterpret_cast<char*>(bytes.data()), size);
    }
    if (!in) {
        fail(path, "read error");
    }
    return bytes;
}

void write_file_atomic(const fs::path& path, const void* data, std::size_t size) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            fail(path, "cannot open temporary file for writing");
        }
        out.write(static_cast<const char*>(data), static_cast<std::streamsize>(size));
        out.flush();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            fail(path, "write error");
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        fail(path, "cannot move temporary file into place");
    }
}

std::uint32_t load_u32le(const unsigned char* p) {
    return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
           (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void store_u32le(std::vector<unsigned char>& out, std::uint32_t v) {
    out.push_back(static_cast<unsigned char>(v & 0xff));
    out.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
    out.push_back(static_cast<unsigned char>((v >> 16) & 0xff));
    out.push_back(static_cast<unsigned char>((v >> 24) & 0xff));
}

float load_f32le(const unsigned char* p) { return std::bit_cast<float>(load_u32le(p)); }

void store_f32le(std::vector<unsigned char>& out, float v) {
    store_u32le(out, std::bit_cast<std::uint32_t>(v));
}

float pixel_to_f32(const RasterMap& map, int row, int col) {
    if (!map.is_valid(row, col)) {
        return std::numeric_limits<float>::quiet_NaN();
    }
    return static_cast<float>(map.at(row, col));
}

void check_dimension(const fs::path& path, std::int64_t value, std::size_t offset) {
    if (value < 1 || value > kMaxDimension) {
        std::ostringstream msg;
        msg << "dimension out of range at byte offset " << offset << ": " << value;
        fail(path, msg.str());
    }
}

void check_payload(const fs::path& path, std::size_t actual_size, std::size_t header_size,
                   std::uint64_t expected_payload) {
    const std::uint64_t expected_total = header_size + expected_payload;
    if (actual_size != expected_total) {
        std::ostringstream msg;
        msg << (actual_size < expected_total ? "truncated payload" : "trailing bytes")
            << " at byte offset " << std::min<std::uint64_t>(actual_size, expected_total)
            << ": expected " << expected_total << " bytes total, file has " << actual_size;
        fail(path, msg.str());
    }
}

}  // namespace

std::pair<RasterMap, RasterMap> read_flow_file(const fs::path& path) {
    const std::vector<unsigned char> bytes = read_all(path);
    if (bytes.size() < 12) {
        fail(path, "truncated header: flow files start with a 12-byte header");
    }
    const float magic = load_f32le(bytes.data());
    if (magic != kFlowMagic) {
        std::ostringstream msg;
        msg << "bad magic at byte offset 0: expected 202021.25, got " << magic;
        fail(path, msg.str());
    }
    const auto width = static_cast<std::int32_t>(load_u32le(bytes.data() + 4));
    const auto height = static_cast<std::int32_t>(load_u32le(bytes.data() + 8));
    check_dimension(path, width, 4);
    check_dimension(path, height, 8);
    const std::uint64_t pixels = static_cast<std::uint64_t>(width) * static_cast<std::uint64_t>(height);
    check_payload(path, bytes.size(), 12, pixels * 8);

    RasterMap flow_x(width, height, 0.0, false);
    RasterMap flow_y(width, height, 0.0, false);
    const unsigned char* p = bytes.data() + 12;
    for (int row = 0; row < height; ++row) {
        for (int col = 0; col < width; ++col) {
            const float u = load_f32le(p);
            const float v = load_f32le(p + 4);
            p += 8;
            if (std::isfinite(u) && std::isfinite(v)) {
                flow_x.set(row, col, static_cast<double>(u) / static_cast<double>(width));
                flow_y.set(row, col, static_cast<double>(v) / static_cast<double>(height));
            }
        }
    }
    return {std::move(flow_x), std::move(flow_y)};
}

void write_flow_file(const fs::path& path, const RasterMap& flow_x, const RasterMap& flow_y) {
    if (!flow_x.same_size(flow_y)) {
        throw std::invalid_argument("write_flow_file: flow components disagree in size");
    }
    const int width = flow_x.width();
    const int height = flow_x.height();
    if (width < 1 || height < 1) {
        throw std::invalid_argument("write_flow_file: empty flow");
    }
    std::vector<unsigned char> bytes;
    bytes.reserve(12 + static_cast<std::size_t>(width) * static_cast<std::size_t>(height) * 8);
    store_f32le(bytes, kFlowMagic);
    store_u32le(bytes, static_cast<std::uint32_t>(width));
    store_u32le(bytes, static_cast<std::uint32_t>(height));
    for (int row = 0; row < height; ++row) {
        for (int col = 0; col < width; ++col) {
            const bool valid = flow_x.is_valid(row, col) && flow_y.is_valid(row, col);
            if (valid) {
                store_f32le(bytes,
                            static_cast<float>(flow_x.at(row, col) * static_cast<double>(width)));
                store_f32le(bytes,
                            static_cast<float>(flow_y.at(row, col) * static_cast<double>(height)));
            } else {
                store_f32le(bytes, std::numeric_limits<float>::quiet_NaN());
                store_f32le(bytes, std::numeric_limits<float>::quiet_NaN());
            }
        }
    }
    write_file_atomic(path, bytes.data(), bytes.size());
}

namespace {

struct RasterHeader {
    std::int32_t width = 0;
    std::int32_t height = 0;
    std::uint32_t channels = 0;
};

RasterHeader read_raster_header(const fs::path& path, const std::vector<unsigned char>& bytes) {
    if (bytes.size() < 18) {
        fail(path, "truncated header: raster files start with an 18-byte header");
    }
    for (std::size_t i = 0; i < 6; ++i) {
        if (bytes[i] != static_cast<unsigned char>(kRasterMagic[i])) {
            std::ostringstream msg;
            msg << "bad magic at byte offset " << i << ": expected \"FMAP1\\n\"";
            fail(path, msg.str());
        }
    }
    RasterHeader header;
    header.width = static_cast<std::int32_t>(load_u32le(bytes.data() + 6));
    header.height = static_cast<std::int32_t>(load_u32le(bytes.data() + 10));
    header.channels = load_u32le(bytes.data() + 14);
    check_dimension(path, header.width, 6);
    check_dimension(path, header.height, 10);
    if (header.channels != 1 && header.channels != 7) {
        std::ostringstream msg;
        msg << "unsupported channel count at byte offset 14: " << header.channels
            << " (expected 1 or 7)";
        fail(path, msg.str());
    }
    const std::uint64_t payload = static_cast<std::uint64_t>(header.width) *
                                  static_cast<std::uint64_t>(header.height) * header.channels * 4;
    check_payload(path, bytes.size(), 18, payload);
    return header;
}

RasterMap read_plane(const unsigned char* p, int width, int height) {
    RasterMap map(width, height, 0.0, false);
    for (int row = 0; row < height; ++row) {
        for (int col = 0; col < width; ++col) {
            const float value = load_f32le(p);
            p += 4;
            if (std::isfinite(value)) {
                map.set(row, col, static_cast<double>(value));
            }
        }
    }
    return map;
}

void append_plane(std::vector<unsigned char>& bytes, const RasterMap& map) {
    for (int row = 0; row < map.height(); ++row) {
        for (int col = 0; col < map.width(); ++col) {
            store_f32le(bytes, pixel_to_f32(map, row, col));
        }
    }
}

std::vector<unsigned char> raster_file_bytes(int width, int height, std::uint32_t channels) {
    std::vector<unsigned char> bytes;
    bytes.reserve(18 + static_cast<std::size_t>(width) * static_cast<std::size_t>(height) *
                           channels * 4);
    bytes.insert(bytes.end(), kRasterMagic, kRasterMagic + 6);
    store_u32le(bytes, static_cast<std::uint32_t>(width));
    store_u32le(bytes, static_cast<std::uint32_t>(height));
    store_u32le(bytes, channels);
    return bytes;
}

}  // namespace

RasterMap read_raster_file(const fs::path& path) {
    const std::vector<unsigned char> bytes = read_all(path);
    const RasterHeader header = read_raster_header(path, bytes);
    if (header.channels != 1) {
        fail(path, "expected a single-channel raster, file has 7 channels");
    }
    return read_plane(bytes.data() + 18, header.width, header.height);
}

void write_raster_file(const fs::path& path, const RasterMap& raster) {
    if (raster.width() < 1 || raster.height() < 1) {
        throw std::invalid_argument("write_raster_file: empty raster");
    }
    std::vector<unsigned char> bytes = raster_file_bytes(raster.width(), raster.height(), 1);
    append_plane(bytes, raster);
    write_file_atomic(path, bytes.data(), bytes.size());
}

MotionMapStack read_map_stack(const fs::path& path) {
    const std::vector<unsigned char> bytes = read_all(path);
    const RasterHeader header = read_raster_header(path, bytes);
    if (header.channels != 7) {
        fail(path, "expected a 7-channel map stack, file has 1 channel");
    }
    MotionMapStack stack;
    const std::size_t plane_bytes =
        static_cast<std::size_t>(header.width) * static_cast<std::size_t>(header.height) * 4;
    for (int channel = 0; channel < kMapChannelCount; ++channel) {
        stack[channel] = read_plane(bytes.data() + 18 + static_cast<std::size_t>(channel) * plane_bytes,
                                    header.width, header.height);
    }
    return stack;
}

void write_map_stack(const fs::path& path, const MotionMapStack& stack) {
    if (stack.width() < 1 || stack.height() < 1) {
        throw std::invalid_argument("write_map_stack: empty map stack");
    }
    for (int channel = 1; channel < kMapChannelCount; ++channel) {
        if (!stack[channel].same_size(stack[0])) {
            throw std::invalid_argument("write_map_stack: channels disagree in size");
        }
    }
    std::vector<unsigned char> bytes = raster_file_bytes(stack.width(), stack.height(), 7);
    for (int channel = 0; channel < kMapChannelCount; ++channel) {
        append_plane(bytes, stack[channel]);
    }
    write_file_atomic(path, bytes.data(), bytes.size());
}

std::vector<TransformSE3> read_pose_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        fail(path, "cannot open file for reading");
    }
    std::vector<TransformSE3> poses;
    std::string line;
    std::size_t line_number = 0;
    bool warned = false;
    while (std::getline(in, line)) {
        ++line_number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        std::istringstream fields(line);
        double v[12];
        for (int i = 0; i < 12; ++i) {
            if (!(fields >> v[i])) {
                std::ostringstream msg;
                msg << "line " << line_number << ": expected 12 numbers per pose";
                fail(path, msg.str());
            }
        }
        double extra;
        if (fields >> extra) {
            std::ostringstream msg;
            msg << "line " << line_number << ": expected 12 numbers per pose, found more";
            fail(path, msg.str());
        }
        TransformSE3 pose;
        pose.rotation << v[0], v[1], v[2], v[4], v[5], v[6], v[8], v[9], v[10];
        pose.translation << v[3], v[7], v[11];
        const double defect =
            (pose.rotation.transpose() * pose.rotation - Eigen::Matrix3d::Identity())
                .cwiseAbs()
                .maxCoeff();
        if (defect > 1e-3 && !warned) {
            std::cerr << path.string() << ": line " << line_number
                      << ": rotation deviates from orthonormal by " << defect
                      << ", re-orthonormalizing\n";
            warned = true;
        }
        // Re-project only measurably non-orthonormal rotations; keeping clean
        // ones verbatim makes write(read(f)) reproduce f byte for byte.
        if (defect > 1e-9) {
            pose.rotation = nearest_rotation(pose.rotation);
        }
        poses.push_back(pose);
    }
    return poses;
}

void write_pose_file(const fs::path& path, std::span<const TransformSE3> poses) {
    std::string text;
    char buffer[32];
    for (const TransformSE3& pose : poses) {
        double v[12] = {pose.rotation(0, 0), pose.rotation(0, 1), pose.rotation(0, 2),
                        pose.translation.x(), pose.rotation(1, 0), pose.rotation(1, 1),
                        pose.rotation(1, 2), pose.translation.y(), pose.rotation(2, 0),
                        pose.rotation(2, 1), pose.rotation(2, 2), pose.translation.z()};
        for (int i = 0; i < 12; ++i) {
            std::snprintf(buffer, sizeof(buffer), "%.17g", v[i]);
            text += buffer;
            text += (i < 11) ? ' ' : '\n';
        }
    }
    write_file_atomic(path, text.data(), text.size());
}

Trajectory read_trajectory(const fs::path& path) {
    return Trajectory::from_poses(read_pose_file(path));
}

CameraModel read_camera_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        fail(path, "cannot open file for reading");
    }
    CameraModel camera;
    bool seen[4] = {false, false, false, false};
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        const std::size_t first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') {
            continue;
        }
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            std::ostringstream msg;
            msg << "line " << line_number << ": expected key=value";
            fail(path, msg.str());
        }
        std::string key = line.substr(first, eq - first);
        key.erase(key.find_last_not_of(" \t") + 1);
        std::istringstream value(line.substr(eq + 1));
        if (key == "fx" && (value >> camera.fx)) {
            seen[0] = true;
        } else if (key == "fy" && (value >> camera.fy)) {
            seen[1] = true;
        } else if (key == "width" && (value >> camera.width)) {
            seen[2] = true;
        } else if (key == "height" && (value >> camera.height)) {
            seen[3] = true;
        } else {
            std::ostringstream msg;
            msg << "line " << line_number << ": unknown key or bad value: " << key;
            fail(path, msg.str());
        }
    }
    const char* names[4] = {"fx", "fy", "width", "height"};
    for (int i = 0; i < 4; ++i) {
        if (!seen[i]) {
            fail(path, std::string("missing key: ") + names[i]);
        }
    }
    if (!(camera.fx > 0.0) || !(camera.fy > 0.0) || camera.width < 2 || camera.height < 2) {
        fail(path, "invalid intrinsics: need fx, fy > 0 and width, height >= 2");
    }
    return camera;
}

void write_text_file(const fs::path& path, const std::string& text) {
    write_file_atomic(path, text.data(), text.size());
}

void write_camera_file(const fs::path& path, const CameraModel& camera) {
    char buffer[128];
    std::string text;
    std::snprintf(buffer, sizeof(buffer), "fx=%.17g\n", camera.fx);
    text += buffer;
    std::snprintf(buffer, sizeof(buffer), "fy=%.17g\n", camera.fy);
    text += buffer;
    std::snprintf(buffer, sizeof(buffer), "width=%d\n", camera.width);
    text += buffer;
    std::snprintf(buffer, sizeof(buffer), "height=%d\n", camera.height);
    text += buffer;
    write_file_atomic(path, text.data(), text.size());
}

}  // namespace momap::io
