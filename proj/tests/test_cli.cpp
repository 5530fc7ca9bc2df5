#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "momap/io.hpp"
#include "support/test_util.hpp"

// End-to-end tests that drive the installed binary the way a user would:
// through a shell, checking exit codes, files, and printed tables.

namespace {

struct CommandResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string read_text(const std::string& path) {
    std::ifstream in(path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

CommandResult run_cli(const testutil::TempDir& dir, const std::string& tag,
                      const std::string& args) {
    const std::string out_path = dir.file("stdout-" + tag);
    const std::string err_path = dir.file("stderr-" + tag);
    const std::string command = std::string(MOMAP_CLI_PATH) + " " + args + " >" + out_path +
                                " 2>" + err_path;
    const int status = std::system(command.c_str());
    CommandResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = read_text(out_path);
    result.err = read_text(err_path);
    return result;
}

std::vector<unsigned char> slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(bool(in));
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Value in the "mean" column of a CSV metric table row.
double csv_mean(const std::string& csv, const std::string& metric) {
    std::istringstream lines(csv);
    std::string line;
    while (std::getline(lines, line)) {
        if (line.rfind(metric + ",", 0) == 0) {
            const std::size_t first = line.find(',');
            const std::size_t second = line.find(',', first + 1);
            return std::stod(line.substr(first + 1, second - first - 1));
        }
    }
    FAIL("metric ", metric, " not found in table:\n", csv);
    return 0.0;
}

}  // namespace

TEST_CASE("synthesize, decompose, estimate, and evaluate a known motion") {
    testutil::TempDir dir("pipeline");
    const CommandResult synth = run_cli(
        dir, "synth",
        "synth --dof tx --magnitude 0.05 --scene slant --seed 3 --out-dir " + dir.file("case"));
    CHECK(synth.exit_code == 0);
    CHECK(synth.err.empty());

    const CommandResult decompose = run_cli(
        dir, "decompose",
        "decompose --flow " + dir.file("case/flow.flo") + " --depth " +
            dir.file("case/depth.fmap") + " --camera " + dir.file("case/camera.txt") +
            " --out " + dir.file("maps.fmap"));
    CHECK(decompose.exit_code == 0);
    CHECK(decompose.err.empty());

    const CommandResult estimate = run_cli(
        dir, "estimate",
        "estimate --maps " + dir.file("maps.fmap") + " --out-poses " + dir.file("est.txt"));
    CHECK(estimate.exit_code == 0);
    CHECK(estimate.out.rfind("pair,tx,ty,tz,rx,ry,rz\n", 0) == 0);

    // The first estimate row carries the recovered motion; t_x must match the
    // synthesized magnitude through the float32 file format.
    std::istringstream rows(estimate.out);
    std::string header, row;
    std::getline(rows, header);
    std::getline(rows, row);
    double fields[7];
    for (double& field : fields) {
        const std::size_t comma = row.find(',');
        field = std::stod(row.substr(0, comma));
        row = (comma == std::string::npos) ? std::string() : row.substr(comma + 1);
    }
    CHECK(fields[1] == doctest::Approx(0.05).epsilon(1e-5));

    const CommandResult eval = run_cli(
        dir, "eval",
        "eval --gt " + dir.file("case/pose_gt.txt") + " --est " + dir.file("est.txt") +
            " --metric ate --csv --out " + dir.file("table.csv"));
    CHECK(eval.exit_code == 0);
    CHECK(csv_mean(read_text(dir.file("table.csv")), "ATE") < 1e-6);
}

TEST_CASE("a trajectory evaluated against itself scores zero") {
    testutil::TempDir dir("selfeval");
    run_cli(dir, "synth",
            "synth --dof rz --magnitude 0.01 --out-dir " + dir.file("case"));
    const CommandResult eval = run_cli(
        dir, "eval",
        "eval --gt " + dir.file("case/pose_gt.txt") + " --est " + dir.file("case/pose_gt.txt") +
            " --metric ate --csv");
    CHECK(eval.exit_code == 0);
    CHECK(csv_mean(eval.out, "ATE") <= 1e-12);
}

TEST_CASE("the two estimate input routes agree") {
    testutil::TempDir dir("routes");
    run_cli(dir, "syntha",
            "synth --dof ty --magnitude 0.04 --scene hills --seed 5 --out-dir " + dir.file("a"));
    run_cli(dir, "synthb",
            "synth --dof rx --magnitude 0.006 --scene hills --seed 6 --out-dir " + dir.file("b"));

    // Route 1: flow/depth files straight into estimate.
    const CommandResult direct = run_cli(
        dir, "direct",
        "estimate --flow " + dir.file("a/flow.flo") + " " + dir.file("b/flow.flo") +
            " --depth " + dir.file("a/depth.fmap") + " " + dir.file("b/depth.fmap") +
            " --camera " + dir.file("a/camera.txt") + " --out-poses " + dir.file("direct.txt"));
    CHECK(direct.exit_code == 0);

    // Route 2: decompose to map stacks first, then estimate from those.
    run_cli(dir, "deca",
            "decompose --flow " + dir.file("a/flow.flo") + " --depth " + dir.file("a/depth.fmap") +
                " --camera " + dir.file("a/camera.txt") + " --out " + dir.file("a.maps"));
    run_cli(dir, "decb",
            "decompose --flow " + dir.file("b/flow.flo") + " --depth " + dir.file("b/depth.fmap") +
                " --camera " + dir.file("b/camera.txt") + " --out " + dir.file("b.maps"));
    const CommandResult staged = run_cli(
        dir, "staged",
        "estimate --maps " + dir.file("a.maps") + " " + dir.file("b.maps") + " --out-poses " +
            dir.file("staged.txt"));
    CHECK(staged.exit_code == 0);

    // The staged route loses a little precision to the float32 map file, so
    // the trajectories agree closely but not bitwise.
    const auto direct_poses = momap::io::read_pose_file(dir.file("direct.txt"));
    const auto staged_poses = momap::io::read_pose_file(dir.file("staged.txt"));
    REQUIRE(direct_poses.size() == 3);
    REQUIRE(staged_poses.size() == 3);
    for (std::size_t i = 0; i < direct_poses.size(); ++i) {
        CHECK((direct_poses[i].translation - staged_poses[i].translation).norm() < 1e-5);
        CHECK((direct_poses[i].rotation - staged_poses[i].rotation).cwiseAbs().maxCoeff() <
              1e-5);
    }
}

TEST_CASE("repeated runs are byte-identical") {
    testutil::TempDir dir("determinism");
    run_cli(dir, "s1", "synth --dof tz --magnitude 0.08 --scene hills --seed 11 --out-dir " +
                           dir.file("one"));
    run_cli(dir, "s2", "synth --dof tz --magnitude 0.08 --scene hills --seed 11 --out-dir " +
                           dir.file("two"));
    CHECK(slurp(dir.file("one/flow.flo")) == slurp(dir.file("two/flow.flo")));
    CHECK(slurp(dir.file("one/depth.fmap")) == slurp(dir.file("two/depth.fmap")));
    CHECK(slurp(dir.file("one/pose_gt.txt")) == slurp(dir.file("two/pose_gt.txt")));

    for (const char* tag : {"d1", "d2"}) {
        run_cli(dir, tag,
                "decompose --flow " + dir.file("one/flow.flo") + " --depth " +
                    dir.file("one/depth.fmap") + " --camera " + dir.file("one/camera.txt") +
                    " --out " + dir.file(std::string(tag) + ".maps"));
    }
    CHECK(slurp(dir.file("d1.maps")) == slurp(dir.file("d2.maps")));

    for (const char* tag : {"e1", "e2"}) {
        run_cli(dir, tag,
                "estimate --maps " + dir.file("d1.maps") + " --out-poses " +
                    dir.file(std::string(tag) + ".txt"));
    }
    CHECK(slurp(dir.file("e1.txt")) == slurp(dir.file("e2.txt")));
}

TEST_CASE("multi-run evaluation reports a deviation column") {
    testutil::TempDir dir("runs");
    run_cli(dir, "synth", "synth --dof tx --magnitude 0.05 --out-dir " + dir.file("case"));
    const CommandResult eval = run_cli(
        dir, "eval",
        "eval --gt " + dir.file("case/pose_gt.txt") + " --est " + dir.file("case/pose_gt.txt") +
            " " + dir.file("case/pose_gt.txt") + " --runs 2 --metric ate --csv");
    CHECK(eval.exit_code == 0);
    // Identical runs: mean and deviation both ~0, and the std field must be
    // populated because two runs were aggregated.
    std::istringstream lines(eval.out);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "metric,mean,std");
    std::getline(lines, line);
    REQUIRE(line.rfind("ATE,", 0) == 0);
    const std::size_t second_comma = line.find(',', 4);
    REQUIRE(second_comma != std::string::npos);
    const std::string std_field = line.substr(second_comma + 1);
    CHECK(!std_field.empty());
    CHECK(std::stod(line.substr(4, second_comma - 4)) <= 1e-12);
    CHECK(std::stod(std_field) <= 1e-12);
}

TEST_CASE("dimension conflicts between camera and flow fail with a diagnostic") {
    testutil::TempDir dir("mismatch");
    run_cli(dir, "small", "synth --dof tx --magnitude 0.05 --width 64 --height 48 --out-dir " +
                              dir.file("small"));
    run_cli(dir, "big", "synth --dof tx --magnitude 0.05 --out-dir " + dir.file("big"));
    const CommandResult bad = run_cli(
        dir, "bad",
        "decompose --flow " + dir.file("big/flow.flo") + " --depth " + dir.file("big/depth.fmap") +
            " --camera " + dir.file("small/camera.txt") + " --out " + dir.file("bad.maps"));
    CHECK(bad.exit_code != 0);
    CHECK(bad.err.find("error:") != std::string::npos);
    CHECK(bad.err.find("do not match") != std::string::npos);
    CHECK(!std::filesystem::exists(dir.file("bad.maps")));
}

TEST_CASE("estimate without any input names both options") {
    testutil::TempDir dir("noinput");
    const CommandResult result =
        run_cli(dir, "none", "estimate --out-poses " + dir.file("est.txt"));
    CHECK(result.exit_code != 0);
    CHECK(result.err.find("--maps") != std::string::npos);
    CHECK(result.err.find("--flow") != std::string::npos);
}

TEST_CASE("eval rejects an inconsistent run count") {
    testutil::TempDir dir("badruns");
    run_cli(dir, "synth", "synth --dof tx --magnitude 0.05 --out-dir " + dir.file("case"));
    const CommandResult result = run_cli(
        dir, "eval",
        "eval --gt " + dir.file("case/pose_gt.txt") + " --est " + dir.file("case/pose_gt.txt") +
            " --runs 2 --metric ate");
    CHECK(result.exit_code != 0);
    CHECK(result.err.find("one file per ground-truth sequence and run") != std::string::npos);
}

TEST_CASE("unknown option values are rejected at parse time") {
    testutil::TempDir dir("badopt");
    const CommandResult result = run_cli(
        dir, "bad", "synth --dof qq --magnitude 0.05 --out-dir " + dir.file("case"));
    CHECK(result.exit_code != 0);
}

TEST_CASE("missing input files produce a clean error, not a crash") {
    testutil::TempDir dir("missing");
    const CommandResult result = run_cli(
        dir, "gone",
        "decompose --flow " + dir.file("gone.flo") + " --depth " + dir.file("gone.fmap") +
            " --fx 0.5 --fy 0.5 --out " + dir.file("out.maps"));
    CHECK(result.exit_code == 1);
    CHECK(result.err.rfind("error:", 0) == 0);
    CHECK(result.err.find("cannot open") != std::string::npos);
}
