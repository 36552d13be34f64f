// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream f(p);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

class Sandbox {
 public:
  explicit Sandbox(const std::string& name) : dir_(fs::temp_directory_path() / ("bhdimer_cli_" + name)) {
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  ~Sandbox() { fs::remove_all(dir_); }
  const fs::path& dir() const { return dir_; }

  Run run(const std::string& args) const {
    const auto out = dir_ / "stdout.txt", err = dir_ / "stderr.txt";
    const std::string cmd = std::string("\"") + BHDIMER_CLI + "\" --out \"" + (dir_ / "runs").string() + "\" " + args +
                            " > \"" + out.string() + "\" 2> \"" + err.string() + "\"";
    const int status = std::system(cmd.c_str());
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
  }

  json manifest(const std::string& run_name) const {
    return json::parse(slurp(dir_ / "runs" / run_name / "manifest.json"));
  }

 private:
  fs::path dir_;
};

}  // namespace

TEST_CASE("misspelled configuration keys are rejected before any work") {
  Sandbox box("config");
  std::ofstream(box.dir() / "bad.toml") << "f_tilda = 0.5\n";
  const auto r = box.run("--config \"" + (box.dir() / "bad.toml").string() + "\" fixed-points --run-name x");
  CHECK(r.code != 0);
  const auto err = json::parse(r.err);
  CHECK(err.contains("error"));
  CHECK_FALSE(fs::exists(box.dir() / "runs" / "x"));

  std::ofstream(box.dir() / "good.toml") << "f_tilde = 0.5\nj_coupling = 1.1\n";
  const auto ok = box.run("--config \"" + (box.dir() / "good.toml").string() + "\" fixed-points --run-name y");
  CHECK(ok.code == 0);
  CHECK(box.manifest("y")["parameters"]["f_tilde"] == 0.5);
}

TEST_CASE("invalid parameters exit with code 2") {
  Sandbox box("invalid");
  const auto r = box.run("--kappa -1 fixed-points --run-name x");
  CHECK(r.code == 2);
  CHECK(json::parse(r.err).contains("error"));
  CHECK_FALSE(fs::exists(box.dir() / "runs" / "x"));
}

TEST_CASE("fixed-points records the instability window in the manifest") {
  Sandbox box("fp");
  const auto r = box.run("--f-tilde 1.2 fixed-points --run-name fp");
  REQUIRE(r.code == 0);
  const auto m = box.manifest("fp");
  CHECK(m["subcommand"] == "fixed-points");
  CHECK(m.contains("version"));
  CHECK(m["seed"] == 1);
  const auto fp = json::parse(slurp(box.dir() / "runs" / "fp" / "fixed_points.json"));
  CHECK(std::abs(fp["window"][0].get<double>() - 0.927) < 0.003);
  REQUIRE(fp["sb_stability_boundaries"].size() == 2);
  for (const auto& b : fp["sb_stability_boundaries"]) {
    CHECK(b.get<double>() > fp["window"][0].get<double>());
    CHECK(b.get<double>() < fp["window"][1].get<double>());
  }
  CHECK(std::abs(fp["window"][1].get<double>() - 1.596) < 0.003);
  CHECK(fp["symmetry_breaking"].size() == 2);
}

TEST_CASE("sweeps are reproducible for a fixed seed") {
  Sandbox box("sweep");
  const std::string args = "--seed 5 sweep --f-min 0.4 --f-max 0.5 --f-step 0.1 --n-ic 2 --t-transient 5 --t-sample 1";
  REQUIRE(box.run(args + " --run-name a").code == 0);
  REQUIRE(box.run(args + " --run-name b").code == 0);
  const auto a = slurp(box.dir() / "runs" / "a" / "sweep.csv");
  CHECK(a.rfind("f_tilde,ic,t,abs_alpha_b,abs_alpha_a\n", 0) == 0);
  CHECK(a == slurp(box.dir() / "runs" / "b" / "sweep.csv"));
  // an existing run directory is never overwritten
  CHECK(box.run(args + " --run-name a").code != 0);
}

TEST_CASE("spectral work beyond the memory cap is refused") {
  Sandbox box("cap");
  const auto r = box.run("spectrum-liouville --n-values 8 --memory-cap-gb 0.001 --run-name s");
  CHECK(r.code == 3);
  const auto err = json::parse(r.err);
  CHECK(err["required_dimension"].get<long long>() > 0);
}

TEST_CASE("evolve, g2 and fft run end to end") {
  Sandbox box("e2e");
  REQUIRE(box.run("--f-tilde 0.5 evolve --method master --nmax 4 --t-final 20 --run-name ev").code == 0);
  const auto csv = box.dir() / "runs" / "ev" / "timeseries.csv";
  CHECK(slurp(csv).rfind("t,re_mean_aA,im_mean_aA,re_mean_aB,im_mean_aB,n_A,n_B", 0) == 0);

  const auto f = box.run("fft --input \"" + csv.string() + "\" --column re_mean_aA --imag-column im_mean_aA --run-name ft");
  CHECK(f.code == 0);
  CHECK(fs::exists(box.dir() / "runs" / "ft" / "spectrum.csv"));

  const auto g = box.run("--f-tilde 1.0 g2 --nmax 4 --n-points 100 --tau-max 10 --run-name g");
  CHECK(g.code == 0);
  const auto meta = json::parse(slurp(box.dir() / "runs" / "g" / "g2_meta.json"));
  CHECK(meta["curves"].contains("1"));
  CHECK(meta["curves"].contains("B"));

  const auto t = box.run("--f-tilde 0.5 evolve --method twa --n-traj 20 --t-final 1 --run-name tw");
  CHECK(t.code == 0);
  CHECK(slurp(box.dir() / "runs" / "tw" / "timeseries.csv").find("n_diverged") != std::string::npos);
}
