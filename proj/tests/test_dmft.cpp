#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "qdmft/config.hpp"
#include "qdmft/dmft.hpp"

using namespace qdmft;

namespace {

const double kVph = 0.745356;

DmftConfig ph(double U, double eta = 0.01) {
  DmftConfig c;
  c.U = U;
  c.eta = eta;
  return c;
}

DmftConfig shots(std::uint64_t seed, bool regularize) {
  std::vector<std::string> o = {"solver.mode=shots", "solver.shots=10000", "solver.seed=" + std::to_string(seed)};
  if (!regularize) o.push_back("dmft.regularize=false");
  return parse_config("", o).dmft;
}

// z from a single impurity solve at bath coupling V (ph point)
double z_at(double U, double V) {
  DmftConfig c = ph(U);
  c.V0 = V;
  c.max_iters = 1;
  return run_ph_symmetric(c).iterations.front().z;
}

}  // namespace

TEST(DmftPh, ConvergesToAnalyticFixedPoint) {
  auto r = run_ph_symmetric(ph(4.0));
  ASSERT_TRUE(r.converged);
  EXPECT_LE(r.iterations.size(), 10u);
  EXPECT_LT(std::abs(r.V - kVph), 0.01);
  EXPECT_EQ(r.iterations.front().V, 1.0);
}

TEST(DmftPh, TightToleranceHitsSqrtFiveOverNine) {
  auto r = run_ph_symmetric(ph(4.0, 1e-9));
  ASSERT_TRUE(r.converged);
  EXPECT_NEAR(r.V, std::sqrt(5.0) / 3.0, 1e-8);
  EXPECT_NEAR(r.z, 5.0 / 9.0, 1e-8);
}

TEST(DmftPh, NonInteractingConvergesInOneIteration) {
  DmftConfig c = ph(0.0);
  auto r = run_ph_symmetric(c);
  ASSERT_TRUE(r.converged);
  EXPECT_EQ(r.iterations.size(), 1u);
  EXPECT_NEAR(r.z, 1.0, 1e-9);
}

TEST(DmftPh, MottSideCollapsesBathCoupling) {
  auto r = run_ph_symmetric(ph(7.0, 1e-3));
  ASSERT_TRUE(r.converged);
  EXPECT_LT(r.V, 0.05);
}

// The map V -> sqrt z(V) contracts around the fixed point for U < 6.
TEST(DmftPh, FixedPointMapContracts) {
  const double U = 4.0, vs = std::sqrt(5.0) / 3.0;
  const double h = 1e-3;
  const double slope = (std::sqrt(z_at(U, vs + h)) - std::sqrt(z_at(U, vs - h))) / (2 * h);
  EXPECT_GT(slope, 0.0);
  EXPECT_LT(slope, 1.0);
  EXPECT_NEAR(std::sqrt(z_at(U, vs)), vs, 1e-9);
}

TEST(DmftPh, ZSweepFollowsBrinkmanRiceForm) {
  DmftConfig c = ph(1.0, 1e-4);
  auto pts = z_sweep(c, {1, 2, 3, 4, 5});
  ASSERT_EQ(pts.size(), 5u);
  double prev = 1.0;
  for (auto& p : pts) {
    EXPECT_TRUE(p.converged) << p.U;
    EXPECT_NEAR(p.z, 1.0 - p.U * p.U / 36.0, 0.01) << p.U;
    EXPECT_LT(p.z, prev);
    prev = p.z;
  }
}

TEST(DmftPh, RejectsBadConfiguration) {
  DmftConfig c = ph(4.0);
  c.alpha = 0.0;
  EXPECT_THROW(run_ph_symmetric(c), ParameterError);
  c = ph(4.0);
  c.ph_symmetric = false;
  EXPECT_THROW(run_ph_symmetric(c), ParameterError);
  c = ph(4.0);
  c.V0 = -1.0;
  EXPECT_THROW(run_dmft(c), ParameterError);
}

TEST(DmftGeneral, AwayFromHalfFillingReachesQuarterFilling) {
  DmftConfig c = ph(4.0, 1e-4);
  c.ph_symmetric = false;
  c.mu = -0.16016;
  c.occ_tol = 1e-5;
  auto r = run_general(c);
  ASSERT_TRUE(r.converged);
  EXPECT_NEAR(r.eps2, -0.29764, 1e-3);
  EXPECT_NEAR(r.V, 0.93709, 1e-3);
  EXPECT_NEAR(r.iterations.back().n_imp, 0.5, 1e-3);
  EXPECT_NEAR(r.iterations.back().n_imp, r.iterations.back().n_lat, 1e-5);
}

TEST(DmftGeneral, HalfFillingChemicalPotentialKeepsBathAtZero) {
  DmftConfig c = ph(4.0, 1e-4);
  c.ph_symmetric = false;
  c.mu = 2.0;
  c.eps2_0 = 0.3;
  auto r = run_general(c);
  ASSERT_TRUE(r.converged);
  EXPECT_NEAR(r.eps2, 0.0, 1e-4);
  EXPECT_NEAR(r.V, std::sqrt(5.0) / 3.0, 1e-3);
}

TEST(DmftShots, WithoutRegularizationSelfEnergyPoleStopsLoop) {
  auto r = run_dmft(shots(4, false));
  EXPECT_FALSE(r.converged);
  bool pole = false;
  for (auto& d : r.diagnostics) pole = pole || d.find("unphysical self-energy pole") != std::string::npos;
  EXPECT_TRUE(pole);
}

TEST(DmftShots, RegularizedLoopConvergesNearFixedPoint) {
  auto r = run_dmft(shots(4, true));
  ASSERT_TRUE(r.converged);
  EXPECT_LT(std::abs(r.V - kVph), 0.03);
}

TEST(DmftShots, SameSeedSameTrace) {
  auto a = run_dmft(shots(9, true)), b = run_dmft(shots(9, true));
  ASSERT_EQ(a.iterations.size(), b.iterations.size());
  for (std::size_t k = 0; k < a.iterations.size(); ++k) EXPECT_EQ(a.iterations[k].V, b.iterations[k].V);
}

TEST(DmftOutput, TraceCsvLayout) {
  auto r = run_ph_symmetric(ph(4.0));
  const auto path = std::filesystem::temp_directory_path() / "qdmft_trace_test.csv";
  write_trace_csv(path.string(), r);
  std::ifstream f(path);
  std::string header, line;
  std::getline(f, header);
  EXPECT_EQ(header, "iter,V,eps2,z,n_imp,n_lat,E0,E30,E32,lambda");
  std::size_t rows = 0;
  while (std::getline(f, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), ','), 9);
  }
  EXPECT_EQ(rows, r.iterations.size());
  std::filesystem::remove(path);
}

TEST(Config, DefaultsAndOverrides) {
  auto c = parse_config("[model]\nU = 3\n", {"dmft.eta=0.001"});
  EXPECT_EQ(c.model.U, 3.0);
  EXPECT_EQ(c.model.mu, 1.5);
  EXPECT_EQ(c.dmft.eta, 0.001);
  EXPECT_EQ(c.dmft.alpha, 1.0);
  EXPECT_TRUE(c.solver.mode.is_exact());
  auto s = parse_config("[solver]\nmode = shots\nseed = 5\n");
  EXPECT_EQ(s.dmft.alpha, 0.5);
  EXPECT_EQ(s.solver.rotosolve.max_sweeps, 10u);
  EXPECT_EQ(s.solver.mode.shots, 10000u);
}

TEST(Config, RejectsUnknownAndMalformedInput) {
  EXPECT_THROW(parse_config("[model]\nW = 1\n"), ConfigError);
  EXPECT_THROW(parse_config("[modle]\nU = 1\n"), ConfigError);
  EXPECT_THROW(parse_config("[model]\nU = four\n"), ConfigError);
  EXPECT_THROW(parse_config("[solver]\nmode = shots\n"), ConfigError);
  EXPECT_THROW(parse_config("", {"model.U"}), ConfigError);
  EXPECT_THROW(parse_config("", {"dmft.alpha=2"}), ConfigError);
  EXPECT_THROW(parse_config("[model]\nU = 1\nU = 2\n"), ConfigError);
}
