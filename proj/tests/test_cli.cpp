#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "ort/smoother.hpp"
#include "ort/tensor_io.hpp"

namespace fs = std::filesystem;

namespace {

std::string cli() {
  const char* p = std::getenv("ORT_CLI");
  REQUIRE(p != nullptr);
  return p;
}

int run(const std::string& args) {
  const std::string cmd = cli() + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

std::string run_capture(const std::string& args) {
  const std::string out_path = "/tmp/ort_cli_out_" + std::to_string(::getpid());
  const std::string cmd = cli() + " " + args + " > " + out_path + " 2>&1";
  std::system(cmd.c_str());
  std::ifstream in(out_path);
  std::stringstream ss;
  ss << in.rdbuf();
  fs::remove(out_path);
  return ss.str();
}

std::vector<char> slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  return std::vector<char>(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("ort_cli_test_" + std::to_string(::getpid()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("synth writes image and tensor outputs with a manifest") {
  TempDir tmp;
  const auto pgm = tmp.file("noisy.pgm");
  const auto orft = tmp.file("noisy.orft");
  CHECK(run("synth --preset triangle --dims 100x100 --sigma 0.3 --seed 1 -o " + pgm) == 0);
  CHECK(fs::exists(pgm));
  CHECK(fs::exists(pgm + ".manifest.json"));

  CHECK(run("synth --preset triangle --dims 100x100 --sigma 0.3 --seed 1 -o " + orft) == 0);
  // The lossless tensor path preserves the unclipped noise scale.
  auto field = ort::read_tensor(orft);
  const double s = ort::estimate_sigma(field);
  CHECK(s > 0.27);
  CHECK(s < 0.33);
}

TEST_CASE("denoise is reproducible byte-for-byte and across thread caps") {
  TempDir tmp;
  const auto noisy = tmp.file("noisy.orft");
  REQUIRE(run("synth --preset triangle --dims 64x64 --sigma 0.3 --seed 7 -o " + noisy) == 0);

  const auto out1 = tmp.file("out1.pgm");
  const auto out2 = tmp.file("out2.pgm");
  const auto out8 = tmp.file("out8.pgm");
  const std::string flags = " --sigma 0.3 --seed 7 ";
  CHECK(run("denoise -i " + noisy + " -o " + out1 + flags + "--threads 1") == 0);
  CHECK(run("denoise -i " + noisy + " -o " + out2 + flags + "--threads 1") == 0);
  CHECK(run("denoise -i " + noisy + " -o " + out8 + flags + "--threads 8") == 0);
  CHECK(slurp(out1) == slurp(out2));
  CHECK(slurp(out1) == slurp(out8));
}

TEST_CASE("denoise writes partition map and split log") {
  TempDir tmp;
  const auto noisy = tmp.file("noisy.orft");
  REQUIRE(run("synth --preset triangle --dims 64x64 --sigma 0.2 --seed 3 -o " + noisy) == 0);
  const auto out = tmp.file("out.pgm");
  const auto map = tmp.file("map.png");
  const auto log = tmp.file("splits.txt");
  CHECK(run("denoise -i " + noisy + " -o " + out + " --sigma 0.2 --seed 3 --partition-map " + map +
            " --split-log " + log) == 0);
  CHECK(fs::exists(map));
  CHECK(fs::exists(log));
  // Split log lines: node_id alpha_1 alpha_2 c gain.
  std::ifstream in(log);
  std::string line;
  REQUIRE(std::getline(in, line));
  std::istringstream ss(line);
  int node_id;
  double a1, a2, c, gain;
  CHECK((ss >> node_id >> a1 >> a2 >> c >> gain));
  CHECK(node_id == 0);
  CHECK(std::abs(a1 * a1 + a2 * a2 - 1.0) < 1e-12);
  CHECK(gain > 0.0);
}

TEST_CASE("metrics on identical files prints zero") {
  TempDir tmp;
  const auto img = tmp.file("t.pgm");
  REQUIRE(run("synth --preset triangle --dims 64x64 --sigma 0 --seed 1 -o " + img) == 0);
  const auto text = run_capture("metrics --remse " + img + " " + img);
  CHECK(text.find("remse 0") != std::string::npos);
}

TEST_CASE("manifest replay reproduces the run exactly") {
  TempDir tmp;
  const auto noisy = tmp.file("noisy.orft");
  REQUIRE(run("synth --preset triangle --dims 64x64 --sigma 0.25 --seed 9 -o " + noisy) == 0);
  const auto out = tmp.file("out.orft");
  REQUIRE(run("denoise -i " + noisy + " -o " + out + " --sigma 0.25 --seed 9") == 0);
  auto bytes = slurp(out);
  const auto manifest = out + ".manifest.json";
  REQUIRE(fs::exists(manifest));

  fs::remove(out);
  CHECK(run("--manifest " + manifest) == 0);
  CHECK(slurp(out) == bytes);
}

TEST_CASE("estimator flag switches to leaf-mean output") {
  TempDir tmp;
  const auto noisy = tmp.file("noisy.orft");
  REQUIRE(run("synth --preset triangle --dims 64x64 --sigma 0.2 --seed 5 -o " + noisy) == 0);
  const auto lw = tmp.file("lw.orft");
  const auto lm = tmp.file("lm.orft");
  REQUIRE(run("denoise -i " + noisy + " -o " + lw + " --sigma 0.2 --seed 5") == 0);
  REQUIRE(run("denoise -i " + noisy + " -o " + lm + " --sigma 0.2 --seed 5 --estimator leaf_mean") ==
          0);
  auto a = ort::read_tensor(lw);
  auto b = ort::read_tensor(lm);
  bool differ = false;
  for (ort::Index i = 0; i < a.size(); ++i) {
    if (a[i] != b[i]) {
      differ = true;
      break;
    }
  }
  CHECK(differ);
}

TEST_CASE("3-D volumes run through the tensor path") {
  TempDir tmp;
  const auto noisy = tmp.file("vol.orft");
  REQUIRE(run("synth --preset tetrahedron --dims 24x24x24 --sigma 0.1 --seed 2 -o " + noisy) == 0);
  const auto out = tmp.file("vol_out.orft");
  CHECK(run("denoise -i " + noisy + " -o " + out + " --sigma 0.1 --seed 2") == 0);
  auto f = ort::read_tensor(out);
  CHECK(f.dims() == std::vector<int>{24, 24, 24});
}

TEST_CASE("bench emits per-replication rows plus mean and stderr") {
  TempDir tmp;
  const auto report = tmp.file("report.tsv");
  CHECK(run("bench --preset triangle --dims-list 48x48 --sigmas 0.2 --replications 3 --seed 1 -o " +
            report) == 0);
  std::ifstream in(report);
  std::string line;
  int rows = 0, mean_rows = 0, stderr_rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    if (line.find("\tmean\t") != std::string::npos) ++mean_rows;
    if (line.find("\tstderr\t") != std::string::npos) ++stderr_rows;
  }
  CHECK(rows == 1 + 3 + 2);
  CHECK(mean_rows == 1);
  CHECK(stderr_rows == 1);
}

TEST_CASE("usage and input errors exit nonzero") {
  TempDir tmp;
  // Unknown flag: exit 2.
  CHECK(run("denoise --no-such-flag") == 2);
  // Missing required option: exit 2.
  CHECK(run("synth --preset triangle") == 2);
  // ASCII PGM rejected with a diagnostic: exit 1.
  const auto ascii = tmp.file("a.pgm");
  {
    std::ofstream out(ascii);
    out << "P2\n2 2\n255\n0 1 2 3\n";
  }
  CHECK(run("denoise -i " + ascii + " -o " + tmp.file("x.pgm")) == 1);
}
