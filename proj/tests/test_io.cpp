#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <functional>
#include <fstream>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "momap/io.hpp"
#include "momap/oracle.hpp"
#include "support/test_util.hpp"

using momap::CameraModel;
using momap::MotionMapStack;
using momap::RasterMap;
using momap::TransformSE3;

namespace {

std::vector<unsigned char> slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(bool(in));
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void spit(const std::filesystem::path& path, const std::vector<unsigned char>& bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    REQUIRE(bool(out));
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
}

void push_u32(std::vector<unsigned char>& out, std::uint32_t v) {
    out.push_back(static_cast<unsigned char>(v & 0xff));
    out.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
    out.push_back(static_cast<unsigned char>((v >> 16) & 0xff));
    out.push_back(static_cast<unsigned char>((v >> 24) & 0xff));
}

void push_f32(std::vector<unsigned char>& out, float v) {
    std::uint32_t bits;
    static_assert(sizeof(bits) == sizeof(v));
    std::memcpy(&bits, &v, sizeof(bits));
    push_u32(out, bits);
}

std::vector<unsigned char> flow_header(std::uint32_t width, std::uint32_t height) {
    std::vector<unsigned char> bytes;
    push_f32(bytes, 202021.25f);
    push_u32(bytes, width);
    push_u32(bytes, height);
    return bytes;
}

std::string what_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const std::exception& e) {
        return e.what();
    }
    return "";
}

}  // namespace

TEST_CASE("flow files round-trip values, masks, and bytes") {
    testutil::TempDir dir("flow");
    RasterMap flow_x(5, 4, 0.0);
    RasterMap flow_y(5, 4, 0.0);
    std::mt19937_64 rng(3);
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 5; ++c) {
            flow_x.set(r, c, testutil::uniform(rng, -0.3, 0.3));
            flow_y.set(r, c, testutil::uniform(rng, -0.3, 0.3));
        }
    }
    flow_x.invalidate(2, 3);
    flow_y.invalidate(1, 1);
    const std::string path = dir.file("a.flo");
    momap::io::write_flow_file(path, flow_x, flow_y);
    CHECK(!std::filesystem::exists(path + ".tmp"));

    const auto [rx, ry] = momap::io::read_flow_file(path);
    // A pixel invalid in either component comes back invalid in both.
    CHECK(!rx.is_valid(2, 3));
    CHECK(!ry.is_valid(2, 3));
    CHECK(!rx.is_valid(1, 1));
    CHECK(!ry.is_valid(1, 1));
    CHECK(rx.valid_count() == rx.pixel_count() - 2);
    for (int r = 0; r < 4; ++r) {
        for (int c = 0; c < 5; ++c) {
            if (!rx.is_valid(r, c)) continue;
            CHECK(rx.at(r, c) == doctest::Approx(flow_x.at(r, c)).epsilon(1e-6));
            CHECK(ry.at(r, c) == doctest::Approx(flow_y.at(r, c)).epsilon(1e-6));
        }
    }

    // Writing what was read reproduces the file byte for byte.
    const std::string copy = dir.file("b.flo");
    momap::io::write_flow_file(copy, rx, ry);
    CHECK(slurp(path) == slurp(copy));
}

TEST_CASE("a 1x1 flow file is exactly 20 bytes") {
    testutil::TempDir dir("flow1");
    const RasterMap one(1, 1, 0.25);
    const std::string path = dir.file("one.flo");
    momap::io::write_flow_file(path, one, one);
    CHECK(std::filesystem::file_size(path) == 20);
}

TEST_CASE("flow reader rejects malformed files with located errors") {
    testutil::TempDir dir("badflow");

    std::vector<unsigned char> wrong_magic = flow_header(2, 2);
    wrong_magic[0] ^= 0xff;
    for (int i = 0; i < 8; ++i) push_f32(wrong_magic, 0.0f);
    spit(dir.file("magic.flo"), wrong_magic);
    CHECK(what_of([&] { momap::io::read_flow_file(dir.file("magic.flo")); })
              .find("bad magic at byte offset 0") != std::string::npos);

    std::vector<unsigned char> zero_dim = flow_header(0, 2);
    spit(dir.file("dim.flo"), zero_dim);
    CHECK(what_of([&] { momap::io::read_flow_file(dir.file("dim.flo")); })
              .find("dimension out of range at byte offset 4") != std::string::npos);

    std::vector<unsigned char> huge_dim = flow_header(2, 2000000);
    spit(dir.file("huge.flo"), huge_dim);
    CHECK(what_of([&] { momap::io::read_flow_file(dir.file("huge.flo")); })
              .find("dimension out of range at byte offset 8") != std::string::npos);

    std::vector<unsigned char> short_file = flow_header(2, 2);
    for (int i = 0; i < 7; ++i) push_f32(short_file, 0.0f);  // one float short
    spit(dir.file("short.flo"), short_file);
    CHECK(what_of([&] { momap::io::read_flow_file(dir.file("short.flo")); })
              .find("truncated payload") != std::string::npos);

    std::vector<unsigned char> long_file = flow_header(2, 2);
    for (int i = 0; i < 9; ++i) push_f32(long_file, 0.0f);
    spit(dir.file("long.flo"), long_file);
    CHECK(what_of([&] { momap::io::read_flow_file(dir.file("long.flo")); })
              .find("trailing bytes at byte offset 44") != std::string::npos);

    CHECK_THROWS_AS(momap::io::read_flow_file(dir.file("missing.flo")), std::runtime_error);
}

TEST_CASE("a non-finite component invalidates the whole flow pixel") {
    testutil::TempDir dir("nanflow");
    std::vector<unsigned char> bytes = flow_header(2, 1);
    push_f32(bytes, std::numeric_limits<float>::quiet_NaN());
    push_f32(bytes, 1.0f);
    push_f32(bytes, 2.0f);
    push_f32(bytes, std::numeric_limits<float>::infinity());
    spit(dir.file("nan.flo"), bytes);
    const auto [fx, fy] = momap::io::read_flow_file(dir.file("nan.flo"));
    CHECK(!fx.is_valid(0, 0));
    CHECK(!fy.is_valid(0, 0));
    CHECK(!fx.is_valid(0, 1));
    CHECK(!fy.is_valid(0, 1));
}

TEST_CASE("flow writer validates its inputs") {
    testutil::TempDir dir("flower");
    const RasterMap a(4, 4, 0.0);
    const RasterMap b(3, 4, 0.0);
    CHECK_THROWS_AS(momap::io::write_flow_file(dir.file("x.flo"), a, b),
                    std::invalid_argument);
    const RasterMap empty;
    CHECK_THROWS_AS(momap::io::write_flow_file(dir.file("y.flo"), empty, empty),
                    std::invalid_argument);
}

TEST_CASE("the committed golden raster decodes to the frozen values") {
    const std::filesystem::path golden =
        std::filesystem::path(MOMAP_TEST_DATA_DIR) / "golden.fmap";
    const RasterMap map = momap::io::read_raster_file(golden);
    REQUIRE(map.width() == 3);
    REQUIRE(map.height() == 2);
    CHECK(map.at(0, 0) == 0.0);
    CHECK(map.at(0, 1) == 0.5);
    CHECK(map.at(0, 2) == -2.25);
    CHECK(!map.is_valid(1, 0));
    CHECK(map.at(1, 1) == 100.0);
    CHECK(map.at(1, 2) == -0.125);
    CHECK(map.valid_count() == 5);

    // The writer must reproduce the frozen bytes exactly.
    testutil::TempDir dir("golden");
    momap::io::write_raster_file(dir.file("copy.fmap"), map);
    CHECK(slurp(dir.file("copy.fmap")) == slurp(golden));
}

TEST_CASE("raster files round-trip float-representable values exactly") {
    testutil::TempDir dir("raster");
    RasterMap map(7, 3, 0.0);
    std::mt19937_64 rng(5);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 7; ++c)
            map.set(r, c, static_cast<double>(static_cast<float>(
                              testutil::uniform(rng, -10.0, 10.0))));
    map.invalidate(0, 6);
    const std::string path = dir.file("m.fmap");
    momap::io::write_raster_file(path, map);
    const RasterMap back = momap::io::read_raster_file(path);
    CHECK(testutil::max_valid_difference(map, back) == 0.0);
    CHECK(!back.is_valid(0, 6));
}

TEST_CASE("map stacks store seven planes in channel order") {
    testutil::TempDir dir("stack");
    MotionMapStack stack;
    for (int ch = 0; ch < momap::kMapChannelCount; ++ch) {
        stack[ch] = RasterMap(4, 2, 0.25 * ch);
        stack[ch].invalidate(ch % 2, ch % 4);
    }
    const std::string path = dir.file("s.fmap");
    momap::io::write_map_stack(path, stack);

    const MotionMapStack back = momap::io::read_map_stack(path);
    for (int ch = 0; ch < momap::kMapChannelCount; ++ch) {
        CHECK(testutil::max_valid_difference(stack[ch], back[ch]) == 0.0);
        CHECK(!back[ch].is_valid(ch % 2, ch % 4));
    }

    // Planar layout: plane ch starts at byte 18 + ch * 4 * 2 * 4 and its
    // second pixel (row 0, col 1) must carry that channel's constant.
    const std::vector<unsigned char> bytes = slurp(path);
    REQUIRE(bytes.size() == 18 + 7u * 8u * 4u);
    for (int ch = 0; ch < momap::kMapChannelCount; ++ch) {
        float value;
        std::memcpy(&value, bytes.data() + 18 + ch * 32 + 4, sizeof(value));
        CHECK(value == doctest::Approx(0.25 * ch).epsilon(1e-12));
    }
}

TEST_CASE("raster readers enforce the channel count they were asked for") {
    testutil::TempDir dir("chan");
    const RasterMap single(2, 2, 1.0);
    momap::io::write_raster_file(dir.file("one.fmap"), single);
    CHECK(what_of([&] { momap::io::read_map_stack(dir.file("one.fmap")); })
              .find("7-channel") != std::string::npos);

    MotionMapStack stack;
    for (int ch = 0; ch < momap::kMapChannelCount; ++ch) stack[ch] = RasterMap(2, 2, 1.0);
    momap::io::write_map_stack(dir.file("seven.fmap"), stack);
    CHECK(what_of([&] { momap::io::read_raster_file(dir.file("seven.fmap")); })
              .find("single-channel") != std::string::npos);

    std::vector<unsigned char> three{'F', 'M', 'A', 'P', '1', '\n'};
    push_u32(three, 2);
    push_u32(three, 2);
    push_u32(three, 3);
    for (int i = 0; i < 12; ++i) push_f32(three, 0.0f);
    spit(dir.file("three.fmap"), three);
    CHECK(what_of([&] { momap::io::read_raster_file(dir.file("three.fmap")); })
              .find("unsupported channel count at byte offset 14") != std::string::npos);

    std::vector<unsigned char> magic = three;
    magic[4] = '2';
    spit(dir.file("magic.fmap"), magic);
    CHECK(what_of([&] { momap::io::read_raster_file(dir.file("magic.fmap")); })
              .find("bad magic at byte offset 4") != std::string::npos);
}

TEST_CASE("pose files hold 12 numbers per line and start exact for identity") {
    testutil::TempDir dir("pose");
    std::vector<TransformSE3> poses;
    poses.push_back(TransformSE3::identity());
    std::mt19937_64 rng(7);
    for (int i = 0; i < 5; ++i) {
        TransformSE3 pose = momap::se3_from_6dof(testutil::random_small_pose(rng, 4.0, 1.2));
        poses.push_back(pose);
    }
    const std::string path = dir.file("p.txt");
    momap::io::write_pose_file(path, poses);

    std::ifstream in(path);
    std::string first;
    std::getline(in, first);
    CHECK(first == "1 0 0 0 0 1 0 0 0 0 1 0");

    const std::vector<TransformSE3> back = momap::io::read_pose_file(path);
    REQUIRE(back.size() == poses.size());
    for (std::size_t i = 0; i < poses.size(); ++i) {
        // 17 significant digits make the text round trip exact, and clean
        // rotations skip the orthonormality repair, so every entry matches
        // bit for bit.
        CHECK(back[i].translation == poses[i].translation);
        CHECK(back[i].rotation == poses[i].rotation);
    }
}

TEST_CASE("non-orthonormal rotations are repaired on read") {
    testutil::TempDir dir("repair");
    const std::string path = dir.file("bad.txt");
    std::ofstream out(path);
    out << "2 0 0 5 0 2 0 6 0 0 2 7\n";  // scaled identity, translation (5,6,7)
    out.close();
    const std::vector<TransformSE3> poses = momap::io::read_pose_file(path);
    REQUIRE(poses.size() == 1);
    CHECK((poses[0].rotation - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(poses[0].translation == Eigen::Vector3d(5.0, 6.0, 7.0));
}

TEST_CASE("pose reader rejects lines with the wrong field count") {
    testutil::TempDir dir("badpose");
    {
        std::ofstream out(dir.file("short.txt"));
        out << "1 0 0 0 0 1 0 0 0 0 1\n";
    }
    CHECK(what_of([&] { momap::io::read_pose_file(dir.file("short.txt")); })
              .find("expected 12 numbers") != std::string::npos);
    {
        std::ofstream out(dir.file("long.txt"));
        out << "1 0 0 0 0 1 0 0 0 0 1 0 99\n";
    }
    CHECK(what_of([&] { momap::io::read_pose_file(dir.file("long.txt")); })
              .find("found more") != std::string::npos);
}

TEST_CASE("blank and whitespace lines between poses are ignored") {
    testutil::TempDir dir("blank");
    const std::string path = dir.file("p.txt");
    {
        std::ofstream out(path);
        out << "1 0 0 0 0 1 0 0 0 0 1 0\n\n   \t\n1 0 0 1 0 1 0 2 0 0 1 3\n";
    }
    const std::vector<TransformSE3> poses = momap::io::read_pose_file(path);
    REQUIRE(poses.size() == 2);
    CHECK(poses[1].translation == Eigen::Vector3d(1.0, 2.0, 3.0));
    const momap::Trajectory traj = momap::io::read_trajectory(path);
    CHECK(traj.size() == 2);
    CHECK(traj.path_length() == doctest::Approx(std::sqrt(14.0)).epsilon(1e-12));
}

TEST_CASE("camera files round-trip exactly and skip comments") {
    testutil::TempDir dir("cam");
    const CameraModel camera = CameraModel::from_pixel_focal(718.856, 1241, 376);
    const std::string path = dir.file("c.txt");
    momap::io::write_camera_file(path, camera);
    const CameraModel back = momap::io::read_camera_file(path);
    CHECK(back.fx == camera.fx);
    CHECK(back.fy == camera.fy);
    CHECK(back.width == camera.width);
    CHECK(back.height == camera.height);

    {
        std::ofstream out(dir.file("c2.txt"));
        out << "# intrinsics\n\nfx = 0.5\nfy=0.25\nwidth=64\nheight = 32\n";
    }
    const CameraModel parsed = momap::io::read_camera_file(dir.file("c2.txt"));
    CHECK(parsed.fx == 0.5);
    CHECK(parsed.fy == 0.25);
    CHECK(parsed.width == 64);
    CHECK(parsed.height == 32);
}

TEST_CASE("camera reader names the missing or unknown key") {
    testutil::TempDir dir("badcam");
    {
        std::ofstream out(dir.file("missing.txt"));
        out << "fx=0.5\nfy=0.25\nwidth=64\n";
    }
    CHECK(what_of([&] { momap::io::read_camera_file(dir.file("missing.txt")); })
              .find("missing key: height") != std::string::npos);
    {
        std::ofstream out(dir.file("unknown.txt"));
        out << "fx=0.5\nfy=0.25\nwidth=64\nheight=32\nskew=1\n";
    }
    CHECK(what_of([&] { momap::io::read_camera_file(dir.file("unknown.txt")); })
              .find("unknown key") != std::string::npos);
    {
        std::ofstream out(dir.file("invalid.txt"));
        out << "fx=-0.5\nfy=0.25\nwidth=64\nheight=32\n";
    }
    CHECK_THROWS_AS(momap::io::read_camera_file(dir.file("invalid.txt")),
                    std::runtime_error);
}

TEST_CASE("text writer leaves no temporary file behind") {
    testutil::TempDir dir("text");
    const std::string path = dir.file("t.txt");
    momap::io::write_text_file(path, "hello\n");
    CHECK(!std::filesystem::exists(path + ".tmp"));
    CHECK(slurp(path) == std::vector<unsigned char>{'h', 'e', 'l', 'l', 'o', '\n'});
}
