#include <gtest/gtest.h>

#include <numbers>
#include <random>

#include "qdmft/ansatz.hpp"
#include "qdmft/hamiltonian.hpp"
#include "qdmft/rotosolve.hpp"
#include "qdmft/statevector.hpp"
#include "test_support.hpp"

using namespace qdmft;
using qdmft::testing::bitwise_matrix;

namespace {

constexpr double kPi = std::numbers::pi;

Circuit random_circuit(std::mt19937_64& rng, std::size_t n, int depth) {
  std::uniform_real_distribution<double> a(-kPi, kPi);
  Circuit c(n);
  for (int d = 0; d < depth; ++d) {
    for (std::size_t q = 0; q < n; ++q) {
      switch (rng() % 5) {
        case 0: c.ry(q, a(rng)); break;
        case 1: c.rx(q, a(rng)); break;
        case 2: c.rz(q, a(rng)); break;
        case 3: c.h(q); break;
        default: c.s(q);
      }
    }
    for (std::size_t q = 0; q + 1 < n; ++q) c.cx(q, q + 1);
  }
  return c;
}

double dense_expectation(const Statevector& s, const PauliSum& h) {
  Eigen::Map<const Eigen::VectorXcd> v(s.amplitudes().data(), s.dim());
  return (v.adjoint() * bitwise_matrix(h) * v)(0, 0).real();
}

PauliSum pt_hamiltonian() { return build_two_site_hamiltonian(4.0, 2.0, 0.0, std::sqrt(5.0) / 3.0); }

}  // namespace

TEST(Statevector, StartsInAllZeros) {
  Statevector s(3);
  EXPECT_EQ(s[0], cplx(1.0));
  EXPECT_DOUBLE_EQ(s.norm(), 1.0);
}

TEST(Statevector, RyRotatesAmplitudes) {
  Circuit c(1);
  c.ry(0, 0.7);
  Statevector s = run_circuit(c);
  EXPECT_NEAR(s[0].real(), std::cos(0.35), 1e-15);
  EXPECT_NEAR(s[1].real(), std::sin(0.35), 1e-15);
}

TEST(Statevector, QubitZeroIsMostSignificant) {
  Circuit c(3);
  c.x(0);
  EXPECT_NEAR(std::abs(run_circuit(c)[0b100]), 1.0, 1e-15);
}

TEST(Statevector, CxUsesFirstQubitAsControl) {
  Circuit c(2);
  c.x(0).cx(0, 1);
  EXPECT_NEAR(std::abs(run_circuit(c)[0b11]), 1.0, 1e-15);
  Circuit d(2);
  d.x(1).cx(0, 1);
  EXPECT_NEAR(std::abs(run_circuit(d)[0b01]), 1.0, 1e-15);
}

TEST(Statevector, BellState) {
  Circuit c(2);
  c.h(0).cx(0, 1);
  auto p = run_circuit(c).probabilities();
  EXPECT_NEAR(p[0], 0.5, 1e-15);
  EXPECT_NEAR(p[3], 0.5, 1e-15);
  EXPECT_NEAR(expectation_exact(run_circuit(c), PauliSum(PauliString("XX"))), 1.0, 1e-15);
  EXPECT_NEAR(expectation_exact(run_circuit(c), PauliSum(PauliString("YY"))), -1.0, 1e-15);
}

TEST(Statevector, InverseUndoesCircuit) {
  std::mt19937_64 rng(1);
  for (int k = 0; k < 20; ++k) {
    Circuit c = random_circuit(rng, 4, 3);
    Circuit full = c;
    full.append(c.inverse());
    EXPECT_NEAR(std::norm(run_circuit(full)[0]), 1.0, 1e-12);
  }
}

TEST(Statevector, ExactExpectationMatchesDenseSandwich) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  for (int k = 0; k < 20; ++k) {
    PauliSum h(4);
    for (int t = 0; t < 10; ++t) h.add(PauliString(qdmft::testing::random_axes(rng, 4)), g(rng));
    Statevector s = run_circuit(random_circuit(rng, 4, 3));
    EXPECT_NEAR(expectation_exact(s, h), dense_expectation(s, h), 1e-12);
  }
}

TEST(Statevector, PauliApplicationMatchesDenseMatrix) {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 20; ++k) {
    Statevector s = run_circuit(random_circuit(rng, 3, 2));
    PauliString p(qdmft::testing::random_axes(rng, 3));
    Statevector r = s.apply_pauli(p);
    Eigen::Map<const Eigen::VectorXcd> v(s.amplitudes().data(), s.dim());
    Eigen::VectorXcd expect = bitwise_matrix(PauliSum(p)) * v;
    for (std::size_t i = 0; i < s.dim(); ++i) ASSERT_LT(std::abs(r[i] - expect(i)), 1e-14);
  }
}

TEST(Statevector, NonHermitianExpectationThrows) {
  PauliSum h(1);
  h.add(PauliString("Y"), cplx(0, 1));
  Circuit c(1);
  c.rx(0, 0.3);
  EXPECT_THROW(expectation_exact(run_circuit(c), h), EvaluationError);
}

TEST(Circuit, RejectsBadGates) {
  Circuit c(2);
  EXPECT_THROW(c.ry(2, 0.1), DimensionError);
  EXPECT_THROW(c.cx(1, 1), DimensionError);
  EXPECT_THROW(c.ry(0, std::nan("")), ParameterError);
}

TEST(Circuit, BindFillsParameterSlots) {
  Circuit t(1);
  t.ry_param(0, 0);
  EXPECT_EQ(t.n_params(), 1u);
  EXPECT_THROW(t.inverse(), EvaluationError);
  std::vector<double> p = {0.4};
  Circuit b = t.bind(p);
  EXPECT_TRUE(b.is_bound());
  EXPECT_DOUBLE_EQ(b.gates()[0].angle, 0.4);
  std::vector<double> wrong = {0.4, 0.1};
  EXPECT_THROW(t.bind(wrong), DimensionError);
}

TEST(Sampling, DeterministicForFixedSeed) {
  std::vector<double> th(8, 0.3);
  Circuit c = build_ansatz(AnsatzKind::PT4, th);
  PauliSum h = pt_hamiltonian();
  const double a = expectation_sampled(c, h, 1000, 42);
  const double b = expectation_sampled(c, h, 1000, 42);
  const double d = expectation_sampled(c, h, 1000, 43);
  EXPECT_EQ(a, b);
  EXPECT_NE(a, d);
}

TEST(Sampling, ConvergesToExactWithManyShots) {
  std::mt19937_64 rng(4);
  PauliSum h = pt_hamiltonian();
  Circuit c = random_circuit(rng, 4, 2);
  const double exact = expectation_exact(run_circuit(c), h);
  const double sampled = expectation_sampled(c, h, 400000, 9);
  EXPECT_NEAR(sampled, exact, 5.0 * h.one_norm(false) / std::sqrt(400000.0));
}

// The spread of the estimator over seeds matches the binomial prediction
// sum_k c_k^2 (1 - <P_k>^2) / shots for per-term sampling.
TEST(Sampling, SpreadMatchesBinomialVariance) {
  std::vector<double> th = {0.3, -0.8, 1.1, 0.2, -0.4, 0.9, 0.5, -1.3};
  Circuit c = build_ansatz(AnsatzKind::PT4, th);
  PauliSum h = pt_hamiltonian();
  const Statevector s = run_circuit(c);
  const std::size_t shots = 2000;
  double var = 0.0;
  for (auto& [axes, coeff] : h.terms()) {
    const double e = pauli_expectation(s, axes).real();
    var += coeff.real() * coeff.real() * (1 - e * e) / shots;
  }
  const double exact = expectation_exact(s, h);
  double mean = 0.0, m2 = 0.0;
  const int n = 400;
  for (int k = 0; k < n; ++k) {
    const double v = expectation_sampled(c, h, shots, 1000 + k) - exact;
    mean += v;
    m2 += v * v;
  }
  mean /= n;
  m2 /= n;
  EXPECT_NEAR(mean, 0.0, 4 * std::sqrt(var / n));
  EXPECT_NEAR(m2 / var, 1.0, 0.25);
}

TEST(Sampling, GroupingStaysUnbiased) {
  std::vector<double> th = {0.3, -0.8, 1.1, 0.2, -0.4, 0.9, 0.5, -1.3};
  Circuit c = build_ansatz(AnsatzKind::PT4, th);
  PauliSum h = pt_hamiltonian();
  const double exact = expectation_exact(run_circuit(c), h);
  EvalMode m = EvalMode::sampled(200000, 5);
  m.group_commuting = true;
  EXPECT_NEAR(expectation_sampled(c, h, m), exact, 5.0 * h.one_norm(false) / std::sqrt(200000.0));
}

TEST(Sampling, ZeroShotsRejected) { EXPECT_THROW(EvalMode::sampled(0, 1), ParameterError); }

TEST(Spam, KroneckerMatrixMatchesPerQubitApplication) {
  SpamModel m = SpamModel::factorized({{0.02, 0.05}, {0.01, 0.03}, {0.04, 0.0}});
  std::vector<double> p = {0.1, 0.05, 0.2, 0.15, 0.1, 0.1, 0.2, 0.1};
  Eigen::VectorXd dense = m.matrix() * Eigen::Map<Eigen::VectorXd>(p.data(), 8);
  auto fact = m.apply(p);
  for (int i = 0; i < 8; ++i) EXPECT_NEAR(fact[i], dense(i), 1e-15);
  // column stochastic
  for (int j = 0; j < 8; ++j) EXPECT_NEAR(m.matrix().col(j).sum(), 1.0, 1e-15);
}

TEST(Spam, CorrectionInvertsReadoutNoise) {
  SpamModel m = SpamModel::uniform(2, 0.03, 0.06);
  std::vector<double> p = {0.4, 0.1, 0.3, 0.2};
  auto back = m.correct(m.apply(p));
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(back[i], p[i], 1e-12);
  SpamModel d = SpamModel::dense(m.matrix());
  auto back2 = d.correct(d.apply(p));
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(back2[i], p[i], 1e-12);
}

TEST(Spam, SingularModel) {
  SpamModel m = SpamModel::uniform(1, 0.5, 0.5);
  EXPECT_THROW(m.correct({0.5, 0.5}, false), NumericalError);
  auto r = m.correct({0.5, 0.5}, true);
  EXPECT_NEAR(r[0] + r[1], 1.0, 1e-12);
  EXPECT_THROW(SpamModel::uniform(1, 1.2, 0.0), ParameterError);
  Eigen::MatrixXd bad(2, 2);
  bad << 0.9, 0.2, 0.2, 0.8;
  EXPECT_THROW(SpamModel::dense(bad), ParameterError);
}

TEST(Spam, CorrectedSamplingRemovesReadoutBias) {
  std::vector<double> th = {0.3, -0.8, 1.1, 0.2, -0.4, 0.9, 0.5, -1.3};
  Circuit c = build_ansatz(AnsatzKind::PT4, th);
  PauliSum h = pt_hamiltonian();
  const double exact = expectation_exact(run_circuit(c), h);
  EvalMode noisy = EvalMode::sampled(200000, 3);
  noisy.readout = SpamModel::uniform(4, 0.05, 0.08);
  const double biased = expectation_sampled(c, h, noisy);
  noisy.correct_readout = true;
  const double fixed = expectation_sampled(c, h, noisy);
  EXPECT_GT(std::abs(biased - exact), 0.05);
  EXPECT_NEAR(fixed, exact, 0.03);
}

TEST(Rng, CounterStreamsAreReproducibleAndDistinct) {
  CounterRng a(7, 0), b(7, 0), c(7, 1);
  for (int k = 0; k < 10; ++k) {
    const auto x = a(), y = b();
    EXPECT_EQ(x, y);
    EXPECT_NE(x, c());
  }
  EXPECT_NE(derive_seed(1, {2, 3}), derive_seed(1, {3, 2}));
  double mean = 0.0;
  CounterRng u(1, 2);
  for (int k = 0; k < 100000; ++k) {
    const double v = u.uniform();
    ASSERT_GE(v, 0.0);
    ASSERT_LT(v, 1.0);
    mean += v;
  }
  EXPECT_NEAR(mean / 100000, 0.5, 0.005);
}

TEST(Rotosolve, SingleSinusoidInOneStep) {
  Objective f = [](std::span<const double> t) { return 3.0 * std::cos(t[0] - 1.0) + 2.0; };
  auto r = rotosolve_minimize(f, {0.2});
  EXPECT_NEAR(r.value, -1.0, 1e-14);
  EXPECT_NEAR(std::cos(r.theta[0] - 1.0 - kPi), 1.0, 1e-14);
  EXPECT_TRUE(r.converged);
  EXPECT_LE(r.sweeps, 2u);
}

TEST(Rotosolve, FlatObjectiveKeepsAngles) {
  Objective f = [](std::span<const double>) { return 0.5; };
  auto r = rotosolve_minimize(f, {0.2, -0.1});
  EXPECT_EQ(r.theta, (std::vector<double>{0.2, -0.1}));
  EXPECT_TRUE(r.converged);
}

TEST(Rotosolve, NonFiniteObjectiveThrows) {
  Objective f = [](std::span<const double> t) { return t[0] > 1.0 ? std::nan("") : std::cos(t[0]); };
  EXPECT_THROW(rotosolve_minimize(f, {0.0}), EvaluationError);
}

TEST(Rotosolve, MinimizesTwoQubitEnergyToGroundState) {
  PauliSum h = build_reduced_hamiltonian(Sector(2, 0), 4.0, 2.0, 0.0, 0.9);
  Objective f = [&](std::span<const double> t) {
    return expectation_exact(run_circuit(build_ansatz(AnsatzKind::CR2_N2, t)), h);
  };
  auto r = rotosolve_minimize(f, {0.1, 0.2, 0.3, 0.4});
  auto ev = qdmft::testing::sorted_eigenvalues(bitwise_matrix(h));
  EXPECT_NEAR(r.value, ev.front(), 1e-9);
}

TEST(Rotosolve, WrapAngle) {
  EXPECT_NEAR(wrap_angle(3 * kPi), kPi, 1e-15);
  EXPECT_NEAR(wrap_angle(-kPi), kPi, 1e-15);
  EXPECT_NEAR(wrap_angle(0.5), 0.5, 1e-15);
}
