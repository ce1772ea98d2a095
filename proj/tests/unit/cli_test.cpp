#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include <gtest/gtest.h>
#include <json.hpp>

#include "cli.hpp"
#include "commands.hpp"
#include "config.hpp"

using namespace plateau_cli;
using hplateau::Errc;
using hplateau::Error;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("plateau_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& text) {
    std::ofstream(dir_ / name) << text;
    return dir_ / name;
  }

  static std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream s;
    s << in.rdbuf();
    return s.str();
  }

  int run(std::vector<std::string> args) {
    args.insert(args.begin(), "plateau");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return run_cli(static_cast<int>(argv.size()), argv.data());
  }

  fs::path dir_;
};

}  // namespace

TEST(ConfigTest, SectionsTypesAndErrors) {
  const Config c = Config::parse("mode = solve # comment\n[grid]\nn = 24\n[simulate]\np_list = 1.7, 1.8,1.9\nx0 = 0,0,0.5\nflag = yes\n");
  EXPECT_EQ(c.str("run.mode"), "solve");
  EXPECT_EQ(c.integer("grid.n"), 24);
  EXPECT_EQ(c.reals("simulate.p_list"), (std::vector<double>{1.7, 1.8, 1.9}));
  EXPECT_EQ(c.vec3("simulate.x0"), hplateau::Vec3(0, 0, 0.5));
  EXPECT_TRUE(c.flag("simulate.flag", false));
  EXPECT_EQ(c.real("simulate.p", 1.5), 1.5);
  try {
    c.integer("grid.missing");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::config_error);
    EXPECT_NE(std::string(e.what()).find("grid.missing"), std::string::npos);
  }
  EXPECT_THROW(Config::parse("[grid]\nn = 3\nn = 4\n"), Error);
  EXPECT_THROW(Config::parse("[grid\n"), Error);
  EXPECT_THROW(Config::parse("[grid]\nn = x\n").integer("grid.n"), Error);
  EXPECT_THROW(Config::parse("[spec]\nfile = nowhere.csv\n").existing_path("spec.file"), Error);
}

TEST(ExitCodes, Mapping) {
  EXPECT_EQ(exit_code_for(Errc::config_error), kExitInfeasible);
  EXPECT_EQ(exit_code_for(Errc::infeasible_class), kExitInfeasible);
  EXPECT_EQ(exit_code_for(Errc::odd_point_count), kExitInfeasible);
  EXPECT_EQ(exit_code_for(Errc::projection_out_of_reach), kExitInternal);
  EXPECT_EQ(exit_code_for(Errc::off_manifold_value), kExitInternal);
}

TEST_F(CliTest, SolveTwoPointSpec) {
  write("spec.csv", "x,y,z,class\n0,0,-1,1\n0,0,1,1\n");
  const auto cfg = write("run.ini", "mode = solve\n[group]\nbuiltin = rp2\n[spec]\nfile = spec.csv\n");
  ASSERT_EQ(run({"solve", "--config", cfg.string(), "--out", (dir_ / "out").string()}), kExitOk);
  const auto j = nlohmann::json::parse(slurp(dir_ / "out" / "solve_report.json"));
  EXPECT_NEAR(j.at("mass").get<double>(), std::numbers::pi, 1e-12);

  // The emitted chain re-validates.
  std::ofstream(dir_ / "chain.json") << j.at("best").dump();
  const auto vcfg = write("validate.ini", "[group]\nbuiltin = rp2\n[spec]\nfile = spec.csv\n[validate]\nchain = chain.json\n");
  ASSERT_EQ(run({"validate", "--config", vcfg.string(), "--out", (dir_ / "v").string()}), kExitOk);
  EXPECT_TRUE(nlohmann::json::parse(slurp(dir_ / "v" / "validation.json")).at("valid").get<bool>());
}

TEST_F(CliTest, SolveWithTableFiles) {
  write("spec.csv", "1,0,0,1\n-0.5,0.8660254037844386,0,1\n-0.5,-0.8660254037844386,0,1\n");
  write("z3.txt", "3\n0 1 2\n1 2 0\n2 0 1\n");
  write("z3.len", "0 0\n1 2\n2 2\n");
  const auto cfg = write("run.ini", "[group]\ntable = z3.txt\nlengths = z3.len\n[spec]\nfile = spec.csv\n[solver]\nmax_steiner = 1\n");
  ASSERT_EQ(run({"solve", "--config", cfg.string(), "--out", (dir_ / "out").string()}), kExitOk);
  const auto j = nlohmann::json::parse(slurp(dir_ / "out" / "solve_report.json"));
  EXPECT_EQ(j.at("best").at("edges").size(), 3u);
}

TEST_F(CliTest, InvalidInputsExitWithOne) {
  write("odd.csv", "0,0,1,1\n");
  const auto cfg = write("run.ini", "[spec]\nfile = odd.csv\n");
  EXPECT_EQ(run({"solve", "--config", cfg.string(), "--out", (dir_ / "o").string()}), kExitInfeasible);
  const auto bad_p = write("p.ini", "[datum]\nkind = constant\n[grid]\nn = 10\n[simulate]\np = 2.5\n");
  EXPECT_EQ(run({"simulate", "--config", bad_p.string(), "--out", (dir_ / "o").string()}), kExitInfeasible);
  const auto small = write("n.ini", "[datum]\nkind = constant\n[grid]\nn = 6\n");
  EXPECT_EQ(run({"simulate", "--config", small.string(), "--out", (dir_ / "o").string()}), kExitInfeasible);
  EXPECT_NE(run({"bogus"}), kExitOk);
}

TEST_F(CliTest, SimulateConstantBoundary) {
  const auto cfg = write("run.ini", "[datum]\nkind = constant\n[grid]\nn = 12\n[simulate]\np = 1.8\n");
  ASSERT_EQ(run({"simulate", "--config", cfg.string(), "--out", (dir_ / "out").string()}), kExitOk);
  const auto j = nlohmann::json::parse(slurp(dir_ / "out" / "diagnostics.json"));
  EXPECT_LE(j.at("rescaled_energy").get<double>(), 1e-10);
  EXPECT_TRUE(fs::exists(dir_ / "out" / "field.bin"));
  EXPECT_TRUE(fs::exists(dir_ / "out" / "measure.csv"));
  for (const auto& e : fs::directory_iterator(dir_ / "out")) EXPECT_NE(e.path().extension(), ".tmp");
}

TEST_F(CliTest, SweepIsByteIdenticalAcrossRunsAndThreads) {
  const auto cfg = write("run.ini", "seed = 3\n[datum]\nkind = pair\n[grid]\nn = 12\n[simulate]\np_list = 1.7, 1.8, 1.9\nrestarts = 1\n");
  ASSERT_EQ(run({"sweep", "--config", cfg.string(), "--out", (dir_ / "a").string(), "--threads", "3"}), kExitOk);
  ASSERT_EQ(run({"sweep", "--config", cfg.string(), "--out", (dir_ / "b").string(), "--threads", "1"}), kExitOk);
  const std::string a = slurp(dir_ / "a" / "sweep.jsonl");
  EXPECT_EQ(a, slurp(dir_ / "b" / "sweep.jsonl"));
  EXPECT_EQ(std::count(a.begin(), a.end(), '\n'), 3);
  ASSERT_EQ(run({"sweep", "--config", cfg.string(), "--out", (dir_ / "c").string(), "--seed", "4"}), kExitOk);
  EXPECT_TRUE(fs::exists(dir_ / "c" / "sweep.jsonl"));
}

TEST_F(CliTest, CompareWritesReportAndPlots) {
  const auto cfg = write("run.ini", "[datum]\nkind = pair\n[grid]\nn = 12\n[simulate]\np_list = 1.7, 1.8, 1.9\n");
  ASSERT_EQ(run({"compare", "--config", cfg.string(), "--out", (dir_ / "a").string(), "--threads", "3"}), kExitOk);
  ASSERT_EQ(run({"compare", "--config", cfg.string(), "--out", (dir_ / "b").string()}), kExitOk);
  for (const char* f : {"compare_report.json", "mass_vs_2mp.csv", "monotonicity.csv", "density_along_segment.csv"})
    EXPECT_EQ(slurp(dir_ / "a" / f), slurp(dir_ / "b" / f)) << f;
  const auto j = nlohmann::json::parse(slurp(dir_ / "a" / "compare_report.json"));
  EXPECT_NEAR(j.at("solver").at("mass").get<double>(), std::numbers::pi, 1e-12);
  EXPECT_GE(j.at("hausdorff").get<double>(), 0.0);
  EXPECT_EQ(j.at("sweep").size(), 3u);
}

TEST_F(CliTest, EmitPlotData) {
  PlotData d;
  for (double p : {1.7, 1.8, 1.9}) {
    SweepRecord r;
    r.p = p;
    r.rescaled_energy = 3 - p;
    d.sweep.push_back(r);
  }
  emit_plot_data(d, dir_ / "a");
  emit_plot_data(d, dir_ / "b");
  const std::string csv = slurp(dir_ / "a" / "mass_vs_2mp.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 4);
  for (const char* f : {"mass_vs_2mp.csv", "monotonicity.csv", "density_along_segment.csv"})
    EXPECT_EQ(slurp(dir_ / "a" / f), slurp(dir_ / "b" / f));
  try {
    emit_plot_data(PlotData{}, dir_ / "c");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::io_error);
  }
}

TEST(Extrapolate, LinearFit) {
  std::vector<SweepRecord> recs;
  for (double p : {1.7, 1.8, 1.9}) {
    SweepRecord r;
    r.p = p;
    r.rescaled_energy = 2.0 + 5.0 * (2 - p);
    recs.push_back(r);
  }
  const Extrapolation e = extrapolate_to_p2(recs);
  EXPECT_NEAR(e.intercept, 2.0, 1e-12);
  EXPECT_NEAR(e.slope, 5.0, 1e-12);
  recs.pop_back();
  EXPECT_THROW(extrapolate_to_p2(recs), Error);
}
