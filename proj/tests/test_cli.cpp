#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("qdmft_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run(const std::string& args) {
  const std::string cmd = std::string(QDMFT_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write(const fs::path& p, const std::string& s) { std::ofstream(p) << s; }

}  // namespace

TEST(Cli, SolveWritesArtifactsAndTable) {
  const auto d = scratch("solve");
  ASSERT_EQ(run("solve --out " + d.string()), 0);
  for (auto f : {"spectral.json", "angles.json", "report.txt"}) EXPECT_TRUE(fs::exists(d / f)) << f;
  const std::string rep = slurp(d / "report.txt");
  EXPECT_NE(rep.find("-1.79505494816844"), std::string::npos);
  EXPECT_NE(rep.find("optimal_theta_5000_shots"), std::string::npos);
}

TEST(Cli, SampledSolveIsByteIdenticalOnRerun) {
  const auto a = scratch("rerun_a"), b = scratch("rerun_b");
  const std::string args = " --set solver.method=PT --set solver.mode=shots --set solver.shots=5000 --set solver.seed=11";
  ASSERT_EQ(run("solve --out " + a.string() + args), 0);
  ASSERT_EQ(run("solve --out " + b.string() + args), 0);
  for (auto f : {"spectral.json", "angles.json", "report.txt"}) EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
}

TEST(Cli, DmftWritesTraceDosAndSweep) {
  const auto d = scratch("dmft");
  ASSERT_EQ(run("dmft --out " + d.string() + " --set dmft.u_sweep=1,2,3"), 0);
  for (auto f : {"trace.csv", "final.json", "dos_imp.csv", "dos_lat.csv", "dos_imp_u0.csv", "dos_lat_u0.csv",
                 "sigma.csv", "z_sweep.csv"})
    EXPECT_TRUE(fs::exists(d / f)) << f;
  EXPECT_EQ(slurp(d / "dos_lat.csv").substr(0, 9), "omega,dos");
  const std::string sweep = slurp(d / "z_sweep.csv");
  EXPECT_EQ(std::count(sweep.begin(), sweep.end(), '\n'), 4);
  EXPECT_EQ(sweep.find('\r'), std::string::npos);
}

TEST(Cli, UnconvergedLoopReturnsTwoAndKeepsTrace) {
  const auto d = scratch("unconverged");
  EXPECT_EQ(run("dmft --out " + d.string() + " --set dmft.max_iters=2 --set dmft.eta=1e-12"), 2);
  EXPECT_TRUE(fs::exists(d / "trace.csv"));
  EXPECT_TRUE(fs::exists(d / "final.json"));
}

TEST(Cli, ConfigFileAndErrors) {
  const auto d = scratch("config");
  write(d / "ok.ini", "[model]\nU = 4\n; comment\n[output]\ndir = " + (d / "o").string() + "\n");
  EXPECT_EQ(run("dos --config " + (d / "ok.ini").string()), 0);
  EXPECT_TRUE(fs::exists(d / "o" / "dos_imp.csv"));
  write(d / "bad.ini", "[model]\nUU = 4\n");
  EXPECT_EQ(run("solve --config " + (d / "bad.ini").string()), 3);
  EXPECT_EQ(run("solve --config " + (d / "missing.ini").string()), 3);
  EXPECT_EQ(run("solve --set solver.mode=shots --out " + d.string()), 3);
  EXPECT_EQ(run("solve --set solver.nonsense=1 --out " + d.string()), 3);
  EXPECT_EQ(run("frobnicate"), 3);
}

TEST(Cli, VerifyPassesAndDetectsInjectedFault) {
  const auto d = scratch("verify");
  EXPECT_EQ(run("verify --out " + d.string()), 0);
  EXPECT_NE(slurp(d / "report.txt").find("all suites passed"), std::string::npos);
  EXPECT_EQ(run("verify --out " + d.string() + " --set verify.inject_fault=zstring_sign"), 1);
  EXPECT_NE(slurp(d / "report.txt").find("FAIL ladder_identities"), std::string::npos);
}
