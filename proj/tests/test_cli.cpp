// End-to-end tests driving the installed CLI binary through temp files.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "mixer/io.hpp"

namespace fs = std::filesystem;

namespace {

const std::string kCli = MIXER_CLI_PATH;

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("mixer_cli_test_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

// Runs the CLI, returns its exit status; stdout/stderr go to files so tests
// can inspect them.
int run_cli(const std::string& args, const std::string& stdout_path = "",
            const std::string& stderr_path = "") {
  std::string cmd = kCli + " " + args;
  if (!stdout_path.empty()) cmd += " > " + stdout_path;
  if (!stderr_path.empty()) cmd += " 2> " + stderr_path;
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("synth then solve then eval round trip") {
  TempDir dir;
  const std::string affinity = dir.file("instance.json");
  const std::string result = dir.file("result.json");
  const std::string metrics = dir.file("metrics.txt");

  CHECK(run_cli("synth --universe 4 --views 3 --obs-prob 0.9 --mismatch 0 "
                "--force-theta 0 --seed 5 --output " +
                affinity) == 0);
  CHECK(run_cli("solve " + affinity + " --output " + result, metrics) == 0);

  // Clean instance: printed metrics report perfect recovery.
  const std::string printed = slurp(metrics);
  CHECK(printed.find("f1=1") != std::string::npos);

  const mixer::ResultFile parsed = mixer::read_result_file(result);
  CHECK(parsed.report.converged_feasible);

  CHECK(run_cli("eval " + result + " " + affinity, metrics) == 0);
  CHECK(slurp(metrics).find("f1=1") != std::string::npos);

  // Mismatched lengths are a usage error.
  const std::string other = dir.file("other.json");
  CHECK(run_cli("synth --universe 2 --views 2 --obs-prob 1.0 --seed 1 "
                "--output " +
                other) == 0);
  CHECK(run_cli("eval " + result + " " + other, "", dir.file("err2.txt")) ==
        1);
}

TEST_CASE("synth full observability shape and determinism") {
  TempDir dir;
  const std::string a = dir.file("a.json");
  const std::string b = dir.file("b.json");
  CHECK(run_cli("synth --universe 30 --views 10 --obs-prob 1.0 --seed 7 "
                "--output " +
                a) == 0);
  CHECK(run_cli("synth --universe 30 --views 10 --obs-prob 1.0 --seed 7 "
                "--output " +
                b) == 0);
  const mixer::AffinityFile file = mixer::read_affinity_file(a);
  CHECK(file.views == std::vector<int>(10, 30));
  CHECK(file.affinity.rows() == 300);
  CHECK(slurp(a) == slurp(b));  // byte-identical
}

TEST_CASE("solve exit codes") {
  TempDir dir;
  SUBCASE("malformed input exits 1") {
    const std::string bad = dir.file("bad.json");
    std::ofstream(bad) << R"({"views": [1], "affinity": "nope"})";
    CHECK(run_cli("solve " + bad + " --output " + dir.file("out.json"), "",
                  dir.file("err.txt")) == 1);
    CHECK(slurp(dir.file("err.txt")).find("affinity") != std::string::npos);
  }
  SUBCASE("missing input exits 1") {
    CHECK(run_cli("solve " + dir.file("missing.json"), "",
                  dir.file("err.txt")) == 1);
  }
  SUBCASE("non-convergence exits 2 and still writes the flagged result") {
    const std::string hard = dir.file("hard.json");
    std::ofstream(hard) << R"({"views": [3],
      "affinity": [[1.0, 0.9, 0.9], [0.9, 1.0, 0.9], [0.9, 0.9, 1.0]]})";
    const std::string result = dir.file("hard_result.json");
    CHECK(run_cli("solve " + hard + " --max-outer 1 --output " + result, "",
                  dir.file("err.txt")) == 2);
    const mixer::ResultFile parsed = mixer::read_result_file(result);
    CHECK_FALSE(parsed.report.converged_feasible);
    CHECK(parsed.labels.size() == 3);
  }
  SUBCASE("solve on the three-car instance estimates three objects") {
    const std::string affinity = dir.file("cars.json");
    mixer::AffinityFile file;
    file.views = {3, 2, 1};
    const std::vector<int> truth = {0, 1, 2, 0, 1, 0};
    file.affinity.resize(6, 6);
    for (int r = 0; r < 6; ++r)
      for (int c = 0; c < 6; ++c)
        file.affinity(r, c) = (r == c || truth[r] == truth[c]) ? 1.0 : 0.0;
    file.labels = truth;
    mixer::write_affinity_file(affinity, file);
    const std::string result = dir.file("cars_result.json");
    CHECK(run_cli("solve " + affinity + " --output " + result,
                  dir.file("out.txt")) == 0);
    CHECK(mixer::read_result_file(result).universe_estimate == 3);
  }
}

TEST_CASE("combine") {
  TempDir dir;
  auto write_affinity = [&](const std::string& name,
                            const std::vector<int>& views, double off) {
    mixer::AffinityFile file;
    file.views = views;
    const int m = 2;
    file.affinity.resize(m, m);
    file.affinity << 1.0, off, off, 1.0;
    mixer::write_affinity_file(dir.file(name), file);
    return dir.file(name);
  };
  SUBCASE("single input passes through") {
    const std::string in = write_affinity("one.json", {1, 1}, 0.25);
    const std::string out = dir.file("combined.json");
    CHECK(run_cli("combine " + in + " --weights 1 --output " + out) == 0);
    CHECK(mixer::read_affinity_file(out).affinity(0, 1) == 0.25);
  }
  SUBCASE("paper weights 1 0.5 1") {
    const std::string a = write_affinity("a.json", {1, 1}, 1.0);
    const std::string b = write_affinity("b.json", {1, 1}, 0.0);
    const std::string c = write_affinity("c.json", {1, 1}, 0.5);
    const std::string out = dir.file("combined3.json");
    CHECK(run_cli("combine " + a + " " + b + " " + c +
                  " --weights 1 0.5 1 --output " + out) == 0);
    CHECK(mixer::read_affinity_file(out).affinity(0, 1) ==
          doctest::Approx(0.6));
  }
  SUBCASE("mismatched partitions exit 1 naming the files") {
    const std::string a = write_affinity("p1.json", {1, 1}, 0.5);
    const std::string b = write_affinity("p2.json", {2}, 0.5);
    CHECK(run_cli("combine " + a + " " + b + " --weights 1 1 --output " +
                      dir.file("x.json"),
                  "", dir.file("err.txt")) == 1);
    const std::string err = slurp(dir.file("err.txt"));
    CHECK(err.find("p1.json") != std::string::npos);
    CHECK(err.find("p2.json") != std::string::npos);
  }
}

TEST_CASE("bench CSV contract") {
  TempDir dir;
  const std::string csv = dir.file("bench.csv");
  CHECK(run_cli("bench --universe 4 --views 3 --obs-prob 0.8 --mismatch 0.1 "
                "--trials 2 --seed 3 --output " +
                csv) == 0);
  const std::string text = slurp(csv);
  CHECK(text.rfind("k,n,obs_prob,mismatch,algorithm,precision,recall,f1,gap,"
                   "wall_ms\n",
                   0) == 0);
  // Header + one row per algorithm for the single cell.
  int lines = 0;
  for (char ch : text)
    if (ch == '\n') ++lines;
  CHECK(lines == 3);
  CHECK(text.find("mixer") != std::string::npos);
  CHECK(text.find("baseline") != std::string::npos);

  // Deterministic apart from the wall_ms column: strip it and compare.
  const std::string csv2 = dir.file("bench2.csv");
  CHECK(run_cli("bench --universe 4 --views 3 --obs-prob 0.8 --mismatch 0.1 "
                "--trials 2 --seed 3 --output " +
                csv2) == 0);
  auto strip_wall = [](const std::string& s) {
    std::stringstream in(s), out;
    std::string line;
    while (std::getline(in, line)) {
      const auto pos = line.rfind(',');
      out << line.substr(0, pos) << "\n";
    }
    return out.str();
  };
  CHECK(strip_wall(slurp(csv)) == strip_wall(slurp(csv2)));
}

TEST_CASE("bench timing sweep grows with problem size") {
  TempDir dir;
  const std::string csv = dir.file("timing.csv");
  CHECK(run_cli("bench --universe 30 --views 2 4 8 --obs-prob 1.0 "
                "--mismatch 0.25 --trials 1 --seed 5 --output " +
                csv) == 0);
  // Pull the wall_ms column of the mixer rows, ordered by view count.
  std::stringstream in(slurp(csv));
  std::string line;
  std::vector<double> wall;
  while (std::getline(in, line)) {
    if (line.find(",mixer,") == std::string::npos) continue;
    wall.push_back(std::stod(line.substr(line.rfind(',') + 1)));
  }
  REQUIRE(wall.size() == 3);  // m = 60, 120, 240
  CHECK(wall[0] < wall[1]);
  CHECK(wall[1] < wall[2]);
}
