#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "mixer/io.hpp"

#include "test_util.hpp"

namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("mixer_io_test_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

}  // namespace

TEST_CASE("affinity file round trip is exact") {
  TempDir dir;
  std::mt19937_64 rng(3);
  mixer::AffinityFile file;
  file.views = {2, 3, 1};
  file.affinity = testutil::random_affinity_values(6, rng);
  file.labels = std::vector<int>{0, 1, 0, 2, 1, 0};

  const std::string path = dir.file("affinity.json");
  mixer::write_affinity_file(path, file);
  const mixer::AffinityFile back = mixer::read_affinity_file(path);
  CHECK(back.views == file.views);
  CHECK(back.affinity == file.affinity);  // bitwise
  REQUIRE(back.labels.has_value());
  CHECK(*back.labels == *file.labels);
  CHECK_NOTHROW(back.validated());
}

TEST_CASE("result file round trip is exact") {
  TempDir dir;
  mixer::ResultFile file;
  file.labels = {0, 1, 1, 2};
  file.universe_estimate = 3;
  file.report.final_objective = -3.25;
  file.report.miqp_objective = 0.125;
  file.report.phi_orth_final = 0.0;
  file.report.phi_dist_final = 0.0;
  file.report.d_trajectory = {0.7071067811865476, 1.4142135623730951};
  file.report.outer_iterations = 2;
  file.report.total_inner_iterations = 57;
  file.report.total_backtracks = 12;
  file.report.wall_time = 0.0123456789012345678;
  file.report.universe_estimate = 3;
  file.report.converged_feasible = true;
  file.config.rng_seed = 0xdeadbeefULL;
  file.config.inner_tol = 1e-9;

  const std::string path = dir.file("result.json");
  mixer::write_result_file(path, file);
  const mixer::ResultFile back = mixer::read_result_file(path);
  CHECK(back.labels == file.labels);
  CHECK(back.universe_estimate == file.universe_estimate);
  CHECK(back.report.final_objective == file.report.final_objective);
  CHECK(back.report.d_trajectory == file.report.d_trajectory);
  CHECK(back.report.wall_time == file.report.wall_time);
  CHECK(back.report.converged_feasible == file.report.converged_feasible);
  CHECK(back.config.rng_seed == file.config.rng_seed);
  CHECK(back.config.inner_tol == file.config.inner_tol);
}

TEST_CASE("malformed documents name the offending field") {
  TempDir dir;
  SUBCASE("missing views") {
    const std::string path = dir.file("bad1.json");
    write_text(path, R"({"affinity": [[1.0]]})");
    CHECK_THROWS_WITH_AS(mixer::read_affinity_file(path),
                         doctest::Contains("views"), mixer::ValidationError);
  }
  SUBCASE("ragged affinity") {
    const std::string path = dir.file("bad2.json");
    write_text(path, R"({"views": [1, 1], "affinity": [[1.0, 0.5], [0.5]]})");
    CHECK_THROWS_WITH_AS(mixer::read_affinity_file(path),
                         doctest::Contains("affinity"),
                         mixer::ValidationError);
  }
  SUBCASE("labels of the wrong length") {
    const std::string path = dir.file("bad3.json");
    write_text(path,
               R"({"views": [1, 1], "affinity": [[1.0, 0.5], [0.5, 1.0]],
                   "labels": [0]})");
    CHECK_THROWS_WITH_AS(mixer::read_affinity_file(path),
                         doctest::Contains("labels"), mixer::ValidationError);
  }
  SUBCASE("non-positive view") {
    const std::string path = dir.file("bad4.json");
    write_text(path, R"({"views": [0, 2], "affinity": [[1.0, 0], [0, 1.0]]})");
    CHECK_THROWS_WITH_AS(mixer::read_affinity_file(path),
                         doctest::Contains("views"), mixer::ValidationError);
  }
  SUBCASE("unparseable JSON") {
    const std::string path = dir.file("bad5.json");
    write_text(path, "{not json");
    CHECK_THROWS_AS(mixer::read_affinity_file(path), mixer::ValidationError);
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(mixer::read_affinity_file(dir.file("missing.json")),
                    mixer::ValidationError);
  }
}
