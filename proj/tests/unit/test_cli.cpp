#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "pfz/cli.hpp"

namespace fs = std::filesystem;
using pfz::cli::run;

namespace
{
  const std::string models = PFZ_MODELS_DIR;

  std::string model(const std::string& name) { return models + "/" + name + ".json"; }

  struct TempDir
  {
    fs::path path;
    explicit TempDir(const std::string& tag)
    {
      path = fs::temp_directory_path() / ("pfz_cli_" + tag + "_" + std::to_string(::getpid()));
      fs::remove_all(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string str() const { return path.string(); }
    std::string read(const std::string& name) const
    {
      std::ifstream is(path / name, std::ios::binary);
      std::stringstream ss;
      ss << is.rdbuf();
      return ss.str();
    }
  };
}

TEST_CASE("compare on the symmetric pair matches six zeros")
{
  TempDir out("compare");
  REQUIRE(run({"compare", "--model", model("m2"), "--L", "100", "--out", out.str()}) == 0);
  const auto j = nlohmann::json::parse(out.read("match.json"));
  CHECK(j["matched"] == 6);
  CHECK(j["pairs"].size() == 6);
  CHECK(j["unmatched_predicted"].empty());
  CHECK(j["unmatched_located"].empty());
  CHECK(j["violations"].empty());
  CHECK(fs::exists(out.path / "located.csv"));
}

TEST_CASE("input errors exit with status 1 before computing")
{
  TempDir out("errors");
  CHECK(run({"find-zeros", "--model", "/no/such/model.json", "--out", out.str()}) == 1);
  CHECK(run({"find-zeros", "--model", model("m2"), "--box", "0.1,-0.1,0,0.2", "--out", out.str()}) == 1);
  CHECK(run({"find-zeros", "--model", model("m2"), "--box", "-1,1,0,0.2", "--out", out.str()}) == 1);
  CHECK(run({"find-zeros", "--model", model("m2"), "--L", "0", "--out", out.str()}) == 1);
  CHECK(run({"find-zeros", "--model", model("m2"), "--tau", "-1", "--out", out.str()}) == 1);
  CHECK(run({"density", "--model", model("m2"), "--eps", "0.05", "--pair", "plus,nope", "--out", out.str()}) == 1);
  CHECK(run({"find-zeros", "--model", model("m2"), "--no-such-flag"}) == 1);
  CHECK(run({"no-such-command"}) == 1);
  CHECK(run(std::vector<std::string>{}) == 1);
  CHECK_FALSE(fs::exists(out.path / "zeros.csv"));
  CHECK(run({"--help"}) == 0);
}

TEST_CASE("numerical failures exit with status 2")
{
  TempDir out("numerical");
  // unequal degeneracies break the Lee-Yang hypotheses
  CHECK(run({"lee-yang", "--model", model("m2_q12"), "--out", out.str()}) == 2);
}

TEST_CASE("every subcommand runs on the bundled models")
{
  TempDir out("all");
  const std::string o = out.str();
  CHECK(run({"trace-diagram", "--model", model("m3"), "--svg", "--out", o}) == 0);
  CHECK(fs::exists(out.path / "diagram.svg"));
  CHECK(fs::exists(out.path / "curve_0_0_1.csv"));
  CHECK(run({"trace-diagram", "--model", model("m2"), "--pair", "plus,minus", "--z", "0,0.1", "--out", o}) == 0);
  CHECK(fs::exists(out.path / "curve.csv"));
  CHECK(run({"find-zeros", "--model", model("m2"), "--L", "100", "--perturb-seed", "3", "--tau", "0.2", "--out", o}) ==
        0);
  CHECK(nlohmann::json::parse(out.read("zeros.json"))["total_multiplicity"] == 6);
  CHECK(run({"predict-zeros", "--model", model("m2_q12"), "--L", "100", "--out", o}) == 0);
  CHECK(run({"density", "--model", model("m2"), "--L", "100,1000", "--eps", "0.05", "--z", "0,0.1", "--out", o}) == 0);
  CHECK(fs::exists(out.path / "density.csv"));
  CHECK(run({"multipoint", "--model", model("m3"), "--L", "1000", "--out", o}) == 0);
  CHECK(nlohmann::json::parse(out.read("multipoint.json"))[0]["located_count"] == 6);
  CHECK(run({"asymptotes", "--model", model("m3_q112"), "--L", "1000", "--svg", "--out", o}) == 0);
  CHECK(nlohmann::json::parse(out.read("asymptotes.json"))[0]["lines"].size() == 3);
  CHECK(run({"check-assumptions", "--model", model("quadruple"), "--out", o}) == 0);
  CHECK(run({"lee-yang", "--model", model("mly"), "--L", "100", "--tau", "0.2", "--perturb-seed", "1", "--segment",
             "0,1", "--out", o}) == 0);
  CHECK(nlohmann::json::parse(out.read("lee_yang.json"))["count"] == 32);
  CHECK(nlohmann::json::parse(out.read("lee_yang.json"))["on_axis"] == true);
  CHECK(run({"covering", "--model", model("m3"), "--L", "1000", "--rho-scale", "0", "--out", o}) == 0);
  CHECK(out.read("uncovered.csv").rfind("re_z,im_z,", 0) == 0);
}

TEST_CASE("outputs default to the environment directory")
{
  TempDir out("env");
  ::setenv("PFZ_OUT_DIR", out.str().c_str(), 1);
  CHECK(run({"check-assumptions", "--model", model("m3")}) == 0);
  ::unsetenv("PFZ_OUT_DIR");
  CHECK(fs::exists(out.path / "assumptions.json"));
}

TEST_CASE("CSV artifacts do not depend on the worker count")
{
  TempDir a("w1"), b("w4");
  for (const auto* dir : {&a, &b})
  {
    const std::string workers = dir == &a ? "1" : "4";
    REQUIRE(run({"find-zeros", "--model", model("m3"), "--L", "300", "--perturb-seed", "5", "--tau", "0.1", "--box",
                 "-0.1,0.1,-0.1,0.1", "--workers", workers, "--out", dir->str()}) == 0);
    REQUIRE(run({"trace-diagram", "--model", model("m3"), "--workers", workers, "--out", dir->str()}) == 0);
    REQUIRE(run({"covering", "--model", model("m3"), "--L", "1000", "--rho-scale", "0", "--workers", workers,
                 "--out", dir->str()}) == 0);
  }
  for (const char* f : {"zeros.csv", "curve_0_0_1.csv", "curve_1_0_2.csv", "curve_2_1_2.csv", "uncovered.csv"})
  {
    CHECK(!a.read(f).empty());
    CHECK(a.read(f) == b.read(f));
  }
}
