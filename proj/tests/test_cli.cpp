#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

const fs::path kWork = fs::temp_directory_path() / "cdiso_test_cli";

int run(const std::string& args) {
  const std::string cmd = std::string(CDISO_CLI) + " " + args + " > " + (kWork / "stdout.txt").string() + " 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

nlohmann::json load(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

}  // namespace

TEST_CASE("model-profile writes endpoints and the effective config") {
  fs::create_directories(kWork);
  const fs::path out = kWork / "mp";
  REQUIRE(run("--out " + out.string() + " model-profile --K 1 --N 2 --D 3.1415926536 --v-grid 11") == 0);
  const std::string csv = slurp(out / "model_profile.csv");
  CHECK(csv.rfind("v,value,case,argmin_params\n0,0,", 0) == 0);
  CHECK(csv.find("\n1,0,") != std::string::npos);
  const auto doc = load(out / "model_profile.json");
  CHECK(doc["schema_version"] == 1);
  CHECK(doc["results"].size() == 11);

  // Rerun from the persisted config into a fresh directory.
  const fs::path again = kWork / "mp2";
  REQUIRE(run("--out " + again.string() + " --config " + (out / "model_profile.config").string() + " model-profile") == 0);
  CHECK(slurp(again / "model_profile.csv") == csv);
}

TEST_CASE("diam-gap reports a positive gain") {
  fs::create_directories(kWork);
  const fs::path out = kWork / "dg";
  REQUIRE(run("--out " + out.string() + " verify diam-gap --N 2 --delta 0 --D 2.64 --v 0.5") == 0);
  const auto doc = load(out / "diam_gap.json");
  CHECK(doc["results"]["eta"].get<double>() > 0);
}

TEST_CASE("exit codes") {
  fs::create_directories(kWork);
  CHECK(run("model-profile --K 1 --N 2 --bogus 3") == 2);
  CHECK(slurp(kWork / "stdout.txt").find("bogus") != std::string::npos);
  CHECK(run("--out " + (kWork / "x").string() + " model-profile --K 1 --N 0.5") == 3);
  CHECK(run("--out " + (kWork / "x").string() + " verify diam-gap --D 4") == 3);
}

TEST_CASE("output directory from the environment") {
  const fs::path out = kWork / "env";
  fs::remove_all(out);
  REQUIRE(setenv("CDISO_OUTPUT_DIR", out.string().c_str(), 1) == 0);
  CHECK(run("verify delta-cont --N 2 --v 0.5") == 0);
  unsetenv("CDISO_OUTPUT_DIR");
  CHECK(fs::exists(out / "delta_cont.json"));
  CHECK(fs::exists(out / "delta_cont.csv"));
}

TEST_CASE("space generation, transport and needles through the CLI") {
  const fs::path out = kWork / "pipe";
  fs::create_directories(out);
  REQUIRE(run("--out " + out.string() + " mms gen --kind interval --n 51 --name iv") == 0);
  // Weights of the interval sample: half cells at the ends.
  std::ofstream f(out / "f.csv");
  f << "f\n";
  for (int i = 0; i < 51; ++i) f << (i <= 25 ? (i == 25 ? 0.0 : 1.0) : -1.0) << '\n';
  f.close();
  const std::string space = (out / "iv").string();
  REQUIRE(run("--out " + out.string() + " l1ot solve --space " + space + " --f " + (out / "f.csv").string()) == 0);
  const auto l1 = load(out / "l1ot.json");
  CHECK(l1["results"]["duality_gap"].get<double>() <= 1e-8);
  CHECK(fs::exists(out / "phi.csv"));
  REQUIRE(run("--out " + out.string() + " needles run --space " + space + " --f " + (out / "f.csv").string()) == 0);
  const auto nd = load(out / "needles.json");
  CHECK(nd["results"]["needles"] == 1);
  CHECK(fs::exists(out / "needles.csv"));
}
