#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pslab/cli.hpp"
#include "pslab/io.hpp"

using namespace pslab;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir(const char* tag) : path(fs::temp_directory_path() / (std::string("pslab_test_") + tag)) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

int run(const std::vector<std::string>& args, std::string* out_text = nullptr) {
  std::ostringstream out, err;
  const int rc = cli_run(args, out, err);
  if (out_text) *out_text = out.str();
  INFO(err.str());
  return rc;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::stringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("cli: usage errors exit 1") {
  std::ostringstream out, err;
  CHECK(cli_run({"no-such-command"}, out, err) == 1);
  CHECK(cli_run({"spectrum"}, out, err) == 1);  // --model missing
  CHECK(cli_run({"spectrum", "--model", "rotated_ho", "--no-such-flag", "1"}, out, err) == 1);
}

TEST_CASE("cli: constraint violations exit 1, numerical failures exit 2") {
  TempDir td("rc");
  std::ostringstream out, err;
  CHECK(cli_run({"-o", td.path.string(), "spectrum", "--model", "swanson", "--omega", "1", "--alpha", "0.6",
                 "--beta", "0.5"},
                out, err) == 1);
  // pseudomode outside the admissible set: numerical failure
  CHECK(cli_run({"-o", td.path.string(), "pseudomode", "--model", "cubic", "--h", "0.1", "--z", "-1,0",
                 "--terms", "3"},
                out, err) == 2);
}

TEST_CASE("cli: spectrum writes csv and prints eigenvalues") {
  TempDir td("spectrum");
  std::string text;
  const int rc = run({"-o", td.path.string(), "spectrum", "--model", "swanson", "--omega", "2", "--alpha",
                      "0.5", "--beta", "0.25", "--N", "120", "--count", "4"},
                     &text);
  CHECK(rc == 0);
  const std::string csv = slurp(td.path / "spectrum.csv");
  CHECK(csv.rfind("k,re,im\n", 0) == 0);
  // first eigenvalue ~ sqrt(3.5)
  std::istringstream is(text);
  double re = 0, im = 0;
  is >> re >> im;
  CHECK(re == doctest::Approx(std::sqrt(3.5)).epsilon(1e-6));
  CHECK(std::abs(im) < 1e-8);
  CHECK(fs::exists(td.path / "spectrum_manifest.json"));
}

TEST_CASE("cli: pseudospectrum outputs grid, metadata, svg, contours") {
  TempDir td("grid");
  const int rc = run({"-o", td.path.string(), "pseudospectrum", "--model", "rotated_ho", "--theta",
                      "0.7853981633974483", "--N", "48", "--region", "0.1,8.1,-3,3", "--res", "41,31",
                      "--levels", "0.5,0.1,0.01"});
  CHECK(rc == 0);
  const std::string csv = slurp(td.path / "pseudospectrum.csv");
  CHECK(csv.rfind("re,im,log10_resnorm\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 41 * 31 + 1);
  const std::string svg = slurp(td.path / "pseudospectrum.svg");
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
  auto meta = nlohmann::json::parse(slurp(td.path / "pseudospectrum_meta.json"));
  CHECK(meta.at("N") == 48);
  CHECK(meta.at("resolution")[0] == 41);
}

TEST_CASE("cli: manifest replay reproduces outputs byte-identically") {
  TempDir td1("replay1");
  TempDir td2("replay2");
  std::vector<std::string> args = {"pseudospectrum", "--model", "rotated_ho", "--theta", "0.6",
                                   "--N",            "32",      "--region",   "0.1,6.1,-2,2",
                                   "--res",          "21,15",   "--levels",   "0.5,0.1"};
  std::vector<std::string> a1 = {"-o", td1.path.string()};
  a1.insert(a1.end(), args.begin(), args.end());
  CHECK(run(a1) == 0);
  RunManifest m = read_manifest(td1.path / "pseudospectrum_manifest.json");
  // replay from the recorded argv with a fresh output directory
  std::vector<std::string> a2;
  bool skip_next = false;
  for (std::size_t i = 0; i < m.argv.size(); ++i) {
    if (skip_next) {
      skip_next = false;
      continue;
    }
    if (m.argv[i] == "-o" || m.argv[i] == "--out") {
      skip_next = true;
      continue;
    }
    a2.push_back(m.argv[i]);
  }
  std::vector<std::string> a2full = {"-o", td2.path.string()};
  a2full.insert(a2full.end(), a2.begin(), a2.end());
  CHECK(run(a2full) == 0);
  for (const std::string& name : m.outputs) {
    CHECK(slurp(td1.path / name) == slurp(td2.path / name));
  }
}

TEST_CASE("cli: pseudomode json summary carries the certified residual") {
  TempDir td("pm");
  std::string text;
  const int rc = run({"-o", td.path.string(), "pseudomode", "--model", "rotated_ho", "--theta",
                      "0.7853981633974483", "--h", "0.125", "--z-polar",
                      "1.118033988749895,0.32175055439664219", "--terms", "4"},
                     &text);
  CHECK(rc == 0);
  auto j = nlohmann::json::parse(slurp(td.path / "pseudomode.json"));
  CHECK(j.at("terms") == 4);
  CHECK(j.at("residual").get<double>() > 0.0);
  CHECK(j.at("x0").get<double>() == doctest::Approx(1.0).epsilon(1e-6));
  const std::string csv = slurp(td.path / "pseudomode.csv");
  CHECK(csv.rfind("x,re_u,im_u,re_image,im_image\n", 0) == 0);
}

TEST_CASE("cli: quadratic-identify from swanson parameters") {
  TempDir td("qi");
  std::string text;
  const int rc = run({"-o", td.path.string(), "quadratic-identify", "--from-swanson", "--omega", "2",
                      "--alpha", "0.5", "--beta", "0.25"},
                     &text);
  CHECK(rc == 0);
  auto j = nlohmann::json::parse(slurp(td.path / "quadratic.json"));
  CHECK(j.at("classification") == "elliptic");
  CHECK(j.at("theta").get<double>() ==
        doctest::Approx(std::atan(0.25 / std::sqrt(4.0 - 0.5625))).epsilon(1e-9));
}

TEST_CASE("cli: perturb-cloud is seed-deterministic") {
  TempDir td1("cloud1");
  TempDir td2("cloud2");
  std::vector<std::string> base = {"perturb-cloud", "--model", "rotated_ho", "--theta", "0.7853981633974483",
                                   "--N", "40", "--epsilon", "1e-3", "--samples", "3", "--seed", "11"};
  std::vector<std::string> a1 = {"-o", td1.path.string()};
  a1.insert(a1.end(), base.begin(), base.end());
  std::vector<std::string> a2 = {"-o", td2.path.string()};
  a2.insert(a2.end(), base.begin(), base.end());
  CHECK(run(a1) == 0);
  CHECK(run(a2) == 0);
  CHECK(slurp(td1.path / "cloud.csv") == slurp(td2.path / "cloud.csv"));
  RunManifest m = read_manifest(td1.path / "perturb-cloud_manifest.json");
  CHECK(m.seeded);
  CHECK(m.seed == 11);
}
