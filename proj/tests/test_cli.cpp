#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

namespace fs = std::filesystem;

namespace {

const std::string kBin = NPMIX_BIN;

int run(const std::string& args) {
  const int status = std::system((kBin + " " + args + " > /dev/null 2>&1").c_str());
  return WEXITSTATUS(status);
}

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / "npmix_cli_test") {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const {
    return (path / name).string();
  }
};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int count_lines(const std::string& text) {
  int n = 0;
  for (char c : text)
    if (c == '\n') ++n;
  return n;
}

const char* kFitConfig =
    "m = 3\n"
    "grid.points_per_dim = 40 40\n"
    "bandwidth.mode = fixed\n"
    "bandwidth.matrix = 0.05 0 0 0.1\n"
    "simulate.n = 150\n"
    "seed = 8\n"
    "fit.max_iter = 120\n";

}  // namespace

TEST_CASE("simulate writes a deterministic dataset") {
  TempDir dir;
  const std::string cfg = dir.file("sim.conf");
  write_file(cfg, "simulate.n = 60\nseed = 5\n");
  CHECK(run("simulate --config " + cfg + " --out " + dir.file("a.csv")) == 0);
  CHECK(run("simulate --config " + cfg + " --out " + dir.file("b.csv")) == 0);
  const std::string a = slurp(dir.file("a.csv"));
  CHECK(count_lines(a) == 61);  // header + one row per point
  CHECK(a == slurp(dir.file("b.csv")));  // byte-identical reruns
  CHECK(a.rfind("x1,x2,label", 0) == 0);
}

TEST_CASE("simulate then fit produces the documented outputs") {
  TempDir dir;
  const std::string cfg = dir.file("fit.conf");
  write_file(cfg, kFitConfig);
  const std::string data = dir.file("data.csv");
  REQUIRE(run("simulate --config " + cfg + " --out " + data) == 0);
  const std::string out = dir.file("out");
  CHECK(run("fit --data " + data + " --config " + cfg + " --out " + out) == 0);
  CHECK(fs::exists(out + "/fit_trace.csv"));
  CHECK(fs::exists(out + "/summary.csv"));
  CHECK(fs::exists(out + "/labels.csv"));
  for (int j = 1; j <= 3; ++j)
    CHECK(fs::exists(out + "/density_" + std::to_string(j) + ".csv"));
  CHECK(count_lines(slurp(out + "/labels.csv")) == 151);
  CHECK(count_lines(slurp(out + "/summary.csv")) == 4);

  // the fit is deterministic: a second run writes identical files
  const std::string out2 = dir.file("out2");
  CHECK(run("fit --data " + data + " --config " + cfg + " --out " + out2) ==
        0);
  CHECK(slurp(out + "/fit_trace.csv") == slurp(out2 + "/fit_trace.csv"));
  CHECK(slurp(out + "/summary.csv") == slurp(out2 + "/summary.csv"));

  // cluster is an alias that also emits labels
  const std::string out3 = dir.file("out3");
  CHECK(run("cluster --data " + data + " --config " + cfg + " --out " +
            out3) == 0);
  CHECK(slurp(out + "/labels.csv") == slurp(out3 + "/labels.csv"));
}

TEST_CASE("input problems exit with code 2") {
  TempDir dir;
  CHECK(run("simulate --config " + dir.file("missing.conf") + " --out " +
            dir.file("x.csv")) == 2);
  const std::string bad = dir.file("bad.conf");
  write_file(bad, "this is not a config\n");
  CHECK(run("simulate --config " + bad + " --out " + dir.file("x.csv")) == 2);
  const std::string cfg = dir.file("ok.conf");
  write_file(cfg, kFitConfig);
  CHECK(run("fit --data " + dir.file("missing.csv") + " --config " + cfg +
            " --out " + dir.file("out")) == 2);
  const std::string badcsv = dir.file("bad.csv");
  write_file(badcsv, "x1,x2\n1.0,oops\n");
  CHECK(run("fit --data " + badcsv + " --config " + cfg + " --out " +
            dir.file("out")) == 2);
  CHECK(run("nonsense") == 2);
}

TEST_CASE("hitting max_iter exits with code 3 but still writes outputs") {
  TempDir dir;
  const std::string cfg = dir.file("fit.conf");
  write_file(cfg, kFitConfig);
  const std::string data = dir.file("data.csv");
  REQUIRE(run("simulate --config " + cfg + " --out " + data) == 0);
  const std::string tight = dir.file("tight.conf");
  write_file(tight,
             "m = 3\n"
             "grid.points_per_dim = 40 40\n"
             "bandwidth.mode = fixed\n"
             "bandwidth.matrix = 0.05 0 0 0.1\n"
             "fit.max_iter = 2\n");
  const std::string out = dir.file("out_tight");
  CHECK(run("fit --data " + data + " --config " + tight + " --out " + out) ==
        3);
  CHECK(fs::exists(out + "/fit_trace.csv"));
  // header plus rows for the initial state and the two update steps
  CHECK(count_lines(slurp(out + "/fit_trace.csv")) == 4);
}

TEST_CASE("study writes the replication report") {
  TempDir dir;
  const std::string cfg = dir.file("study.conf");
  write_file(cfg, std::string(kFitConfig) +
                      "study.n_values = 100\n"
                      "study.replications = 2\n"
                      "study.base_seed = 1\n"
                      "fit.max_iter = 40\n");
  const std::string out = dir.file("study_out");
  CHECK(run("study --config " + cfg + " --out " + out) == 0);
  REQUIRE(fs::exists(out + "/study_report.csv"));
  const std::string report = slurp(out + "/study_report.csv");
  CHECK(count_lines(report) >= 3);  // header + one row per replication
}
