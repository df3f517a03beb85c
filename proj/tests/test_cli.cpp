#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "mots/cli.hpp"
#include "mots/common.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run motskit(std::vector<std::string> args) {
  args.insert(args.begin(), "motskit");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = mots::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string config(const std::string& name) { return std::string(MOTS_CONFIG_DIR) + "/" + name; }

fs::path write_temp(const std::string& name, const std::string& body) {
  const fs::path p = fs::temp_directory_path() / name;
  std::ofstream(p) << body;
  return p;
}

}  // namespace

TEST_CASE("nariai point") {
  const Run r = motskit({"nariai", "point", "--a", "0.2", "--ell", "1"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["area"].get<double>() == doctest::Approx(3.7548).epsilon(3e-5));
  CHECK(j["bound"].get<double>() == doctest::Approx(3.7651).epsilon(3e-5));
  CHECK(r.err.empty());

  const Run csv = motskit({"nariai", "point", "--a", "0.25", "--csv"});
  REQUIRE(csv.code == 0);
  CHECK(csv.out.rfind("a_over_ell,", 0) == 0);

  const Run bad = motskit({"nariai", "point", "--a", "0.3", "--ell", "1"});
  CHECK(bad.code == 1);
  CHECK(bad.out.empty());
  CHECK(bad.err.find("0.267949") != std::string::npos);
}

TEST_CASE("usage errors exit with 3") {
  CHECK(motskit({}).code == 3);
  CHECK(motskit({"nariai", "point"}).code == 3);
  CHECK(motskit({"nariai", "point", "--a", "0.1", "--bogus"}).code == 3);
  CHECK(motskit({"nariai", "point", "--a", "0.1", "--json", "--csv"}).code == 3);
  CHECK(motskit({"eig", "--preset", "round", "--n", "4"}).code == 3);
  CHECK(motskit({"eig"}).code == 3);
  CHECK(motskit({"eig", "--preset", "torus"}).code == 3);
  CHECK(motskit({"omega", "--config", "/nonexistent/model.ini"}).code == 3);
  CHECK(motskit({"plotdata"}).code == 3);
  CHECK(motskit({"plotdata", "plotdata", "eig", "--preset", "round"}).code == 3);
  CHECK(motskit({"--help"}).code == 0);
}

TEST_CASE("strict configuration parsing") {
  const fs::path typo = write_temp("mots_typo.ini", "[metric]\npreset = round\n[extrinsic]\nbetta = 0.5:2:0\n");
  const Run r = motskit({"omega", "--config", typo.string()});
  CHECK(r.code == 3);
  CHECK(r.err.find("betta") != std::string::npos);

  const fs::path section = write_temp("mots_section.ini", "[metrics]\npreset = round\n");
  CHECK(motskit({"omega", "--config", section.string()}).code == 3);
  const fs::path value = write_temp("mots_value.ini", "[solver]\nn = many\n");
  CHECK(motskit({"omega", "--config", value.string()}).code == 3);
  const fs::path range = write_temp("mots_range.ini", "[solver]\nn = 5000\n");
  CHECK(motskit({"omega", "--config", range.string()}).code == 3);
  // beta must vanish at the poles: a domain error, not a usage error
  const fs::path pole = write_temp("mots_pole.ini", "[extrinsic]\nbeta = 0.5:0:1\n");
  CHECK(motskit({"omega", "--config", pole.string()}).code == 1);
  for (const auto& p : {typo, section, value, range, pole}) fs::remove(p);
}

TEST_CASE("eig preset and config") {
  const Run r = motskit({"eig", "--preset", "round", "--c", "1.0", "--n", "128", "--m-max", "2"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(std::abs(j["lambda1"].get<double>()) <= 1e-6);
  CHECK(j["per_mode_min_re"].size() == 3);

  const Run c = motskit({"eig", "--config", config("rigid_round.ini"), "--n", "64", "--m-max", "1"});
  REQUIRE(c.code == 0);
  CHECK(std::abs(json::parse(c.out)["lambda1"].get<double>()) <= 1e-6);
}

TEST_CASE("omega and verify batteries on the shipped configs") {
  const Run o = motskit({"omega", "--config", config("lemma_beta.ini")});
  REQUIRE(o.code == 0);
  const json j = json::parse(o.out);
  CHECK(j["omega"].get<double>() == doctest::Approx(2.0 / 3.0 * 0.25).epsilon(1e-10));
  CHECK(j["komar"].get<double>() == doctest::Approx(8.0 * mots::kPi / 3.0 * 0.5).epsilon(1e-10));

  for (const char* name : {"rigid_round.ini", "rigid_rotating.ini"}) {
    const Run v = motskit({"verify", "rigidity", "--config", config(name), "--n", "64"});
    CHECK(v.code == 0);
    const json vj = json::parse(v.out);
    CHECK(vj["equality"].get<bool>());
    CHECK(vj["consistent"].get<bool>());
  }

  const Run lb = motskit({"verify", "lemma-beta", "--config", config("lemma_beta.ini"), "--n", "64",
                          "--basis", "2"});
  CHECK(lb.code == 0);
  const json lj = json::parse(lb.out);
  CHECK(lj["holds"].get<bool>());
  CHECK_FALSE(lj["minimizer"]["slice_is_minimizer"].get<bool>());
}

TEST_CASE("foliate writes the chart and reports failures with exit 2") {
  const fs::path dir = fs::temp_directory_path() / "mots_chart_test";
  fs::remove_all(dir);
  const Run r = motskit({"foliate", "--config", config("warped.ini"), "--s-max", "1", "--leaves", "4",
                         "--n", "48", "--out", dir.string()});
  REQUIRE(r.code == 0);
  CHECK(fs::exists(dir / "chart.json"));
  CHECK(fs::exists(dir / "leaf_000.csv"));
  CHECK(fs::exists(dir / "leaf_004.csv"));
  CHECK_FALSE(fs::exists(dir / "leaf_005.csv"));
  const json j = json::parse(r.out);
  CHECK(j["leaves"].size() == 5);
  CHECK(j["min_gap"].get<double>() > 0.0);
  fs::remove_all(dir);

  const Run t = motskit({"foliate", "--config", config("trapped_outside.ini"), "--s-max", "0.5", "--leaves", "2"});
  REQUIRE(t.code == 0);
  CHECK(json::parse(t.out)["weakly_outermost_contradiction"].get<bool>());

  const fs::path slow = write_temp("mots_slow.ini", "[extrinsic]\nwarp = 0.4:2:0, 0.3:2:1\n[solver]\nmax_iters = 1\nn = 32\n");
  const Run f = motskit({"foliate", "--config", slow.string(), "--s-max", "4", "--leaves", "1"});
  CHECK(f.code == 2);
  CHECK(f.err.find("numerical failure") != std::string::npos);
  fs::remove(slow);
}

TEST_CASE("deterministic output and plot data") {
  const std::vector<std::string> sweep{"nariai", "sweep", "--a-min", "0", "--a-max", "0.25", "--steps", "6"};
  const Run a = motskit(sweep), b = motskit(sweep);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.out.rfind("a_over_ell,rc2,area,omega,bound,gap,gap_over_eps4\n", 0) == 0);
  CHECK(std::count(a.out.begin(), a.out.end(), '\n') == 7);
  CHECK(a.out.find('\r') == std::string::npos);

  const Run e1 = motskit({"eig", "--preset", "poly", "--coeffs", "0.1,0.05", "--n", "64", "--m-max", "2"});
  const Run e2 = motskit({"eig", "--preset", "poly", "--coeffs", "0.1,0.05", "--n", "64", "--m-max", "2"});
  CHECK(e1.out == e2.out);

  const Run p = motskit({"plotdata", "eig", "--preset", "round", "--n", "32", "--m-max", "0"});
  REQUIRE(p.code == 0);
  CHECK(p.out.rfind("theta,u\n", 0) == 0);
  CHECK(std::count(p.out.begin(), p.out.end(), '\n') == 33);

  const Run po = motskit({"plotdata", "omega", "--config", config("lemma_beta.ini"), "--n", "16"});
  REQUIRE(po.code == 0);
  CHECK(po.out.rfind("theta,theta_plus,", 0) == 0);

  const fs::path file = fs::temp_directory_path() / "mots_point.json";
  const Run w = motskit({"nariai", "point", "--a", "0.1", "--out", file.string()});
  CHECK(w.code == 0);
  CHECK(w.out.empty());
  std::ifstream in(file);
  CHECK(json::parse(in)["a_over_ell"].get<double>() == 0.1);
  fs::remove(file);
}

TEST_CASE("nariai expand") {
  const Run r = motskit({"nariai", "expand", "--a-min", "0.02", "--a-max", "0.1", "--steps", "9"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["gap_loglog_slope"].get<double>() == doctest::Approx(4.0).epsilon(0.075));
  CHECK(j["rc2_eps4_coefficient"].get<double>() == doctest::Approx(-12.0).epsilon(0.02));
}
