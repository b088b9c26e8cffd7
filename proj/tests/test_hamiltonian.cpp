#include <gtest/gtest.h>

#include <random>

#include "qdmft/hamiltonian.hpp"
#include "test_support.hpp"

using namespace qdmft;
using qdmft::testing::bitwise_matrix;
using qdmft::testing::max_abs_diff;
using qdmft::testing::sorted_eigenvalues;

namespace {

// Many-body spectrum of a quadratic Hamiltonian: all subset sums of the
// single-particle levels.
std::vector<double> free_fermion_spectrum(const std::vector<double>& levels) {
  std::vector<double> out;
  for (std::size_t m = 0; m < (std::size_t{1} << levels.size()); ++m) {
    double e = 0.0;
    for (std::size_t k = 0; k < levels.size(); ++k)
      if ((m >> k) & 1) e += levels[k];
    out.push_back(e);
  }
  return out;
}

std::vector<double> symmetric_eigenvalues(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  return {es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size()};
}

int popcount_sector(std::uint64_t b, int n) {
  int c = 0;
  for (int q = 0; q < n; ++q) c += (b >> q) & 1;
  return c;
}

}  // namespace

TEST(Ladder, ExplicitForms) {
  PauliSum c0 = ladder_on_qubit(0, Ladder::annihilate, 2);
  EXPECT_EQ(c0.coefficient("XI"), cplx(0.5));
  EXPECT_EQ(c0.coefficient("YI"), cplx(0, 0.5));
  PauliSum d1 = ladder_on_qubit(1, Ladder::create, 2);
  EXPECT_EQ(d1.coefficient("ZX"), cplx(0.5));
  EXPECT_EQ(d1.coefficient("ZY"), cplx(0, -0.5));
  EXPECT_EQ(d1.size(), 2u);
  EXPECT_THROW(ladder_on_qubit(2, Ladder::create, 2), ParameterError);
}

TEST(Ladder, CreationEmptiesToOccupied) {
  // qubit 0 is the most significant bit; |0> is empty
  Eigen::MatrixXcd cd = bitwise_matrix(ladder_on_qubit(0, Ladder::create, 1));
  EXPECT_NEAR(std::abs(cd(1, 0) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(cd(0, 1)), 0.0, 1e-15);
}

TEST(Ladder, CanonicalAnticommutationRelations) {
  const std::size_t n = 5;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      PauliSum ca = ladder_on_qubit(a, Ladder::annihilate, n);
      PauliSum cb = ladder_on_qubit(b, Ladder::annihilate, n);
      PauliSum cdb = ladder_on_qubit(b, Ladder::create, n);
      PauliSum expect = a == b ? PauliSum::constant(n, 1.0) : PauliSum(n);
      EXPECT_EQ(anticommutator(ca, cdb), expect) << a << "," << b;
      EXPECT_TRUE(anticommutator(ca, cb).empty());
      EXPECT_EQ(ladder_on_qubit(a, Ladder::annihilate, n).adjoint(), ladder_on_qubit(a, Ladder::create, n));
    }
}

TEST(Operators, NumberAndSpinCommute) {
  auto layout = QubitLayout::spin_blocked(2, 2);
  PauliSum n = number_operator(4), sz = spin_z_operator(layout);
  EXPECT_TRUE(commutator(n, sz).empty());
  EXPECT_EQ(n.identity_coefficient(), 2.0);
  EXPECT_EQ(sz.coefficient("ZIII"), cplx(-0.5));
  EXPECT_EQ(sz.coefficient("IIZI"), cplx(0.5));
  EXPECT_EQ(sz.identity_coefficient(), 0.0);
}

TEST(TwoSite, ExplicitCoefficients) {
  PauliSum h = build_two_site_hamiltonian(4.0, 2.0, 0.0, 1.0);
  EXPECT_EQ(h.coefficient("ZIZI"), cplx(1.0));
  EXPECT_EQ(h.coefficient("ZIII"), cplx(0.0));
  EXPECT_EQ(h.coefficient("XXII"), cplx(0.5));
  EXPECT_EQ(h.coefficient("IIYY"), cplx(0.5));
  EXPECT_EQ(h.identity_coefficient(), 0.0);
  EXPECT_TRUE(build_two_site_hamiltonian(0, 0, 0, 0).empty());
}

TEST(TwoSite, EmptyStateEnergy) {
  std::mt19937_64 rng(2);
  for (int k = 0; k < 10; ++k) {
    auto p = qdmft::testing::random_two_site(rng);
    Eigen::MatrixXcd m = bitwise_matrix(build_two_site_hamiltonian(p.U, p.mu, p.eps2, p.V));
    EXPECT_NEAR(m(0, 0).real(), p.mu - p.U / 4 - p.eps2, 1e-12);
  }
}

TEST(TwoSite, HalfFillingGroundEnergy) {
  // singlet block at particle-hole symmetry reduces to [[U/4, 2V], [2V, -U/4]]
  const double U = 4.0, V = std::sqrt(5.0) / 3.0;
  auto ev = sorted_eigenvalues(bitwise_matrix(build_two_site_hamiltonian(U, U / 2, 0.0, V)));
  EXPECT_NEAR(ev.front(), -std::sqrt(U * U / 16 + 4 * V * V), 1e-12);
  EXPECT_NEAR(ev.front(), -1.795, 5e-4);
}

TEST(TwoSite, ConservesNumberAndSpin) {
  std::mt19937_64 rng(4);
  auto layout = QubitLayout::spin_blocked(2, 2);
  for (int k = 0; k < 10; ++k) {
    auto p = qdmft::testing::random_two_site(rng);
    PauliSum h = build_two_site_hamiltonian(p.U, p.mu, p.eps2, p.V);
    EXPECT_TRUE(h.is_hermitian());
    EXPECT_TRUE(commutator(h, number_operator(4)).empty());
    EXPECT_TRUE(commutator(h, spin_z_operator(layout)).empty());
  }
}

TEST(Generic, TwoSiteMatchesClosedFormUpToConstant) {
  std::mt19937_64 rng(6);
  for (int k = 0; k < 20; ++k) {
    auto p = qdmft::testing::random_two_site(rng);
    auto model = ImpurityModel::two_site(p.U, p.mu, p.eps2, p.V);
    PauliSum generic = build_impurity_hamiltonian(model, QubitLayout::spin_blocked(2, 2));
    PauliSum closed = build_two_site_hamiltonian(p.U, p.mu, p.eps2, p.V);
    PauliSum diff = generic - closed;
    ASSERT_EQ(diff.size(), 1u);
    EXPECT_NEAR(diff.identity_coefficient(), p.U / 4 - p.mu + p.eps2, 1e-12);
  }
}

TEST(Generic, SpectrumIsLayoutIndependent) {
  auto model = ImpurityModel::two_site(3.0, 1.1, -0.4, 0.8);
  auto a = sorted_eigenvalues(bitwise_matrix(build_impurity_hamiltonian(model, QubitLayout::spin_blocked(2, 2))));
  auto b = sorted_eigenvalues(bitwise_matrix(build_impurity_hamiltonian(model)));
  EXPECT_LT(max_abs_diff(a, b), 1e-12);
}

TEST(Generic, ZeroModelIsEmpty) {
  ImpurityModel m(2, 2, 0.0, {0.0, 0.0}, {}, {0.0, 0.0}, {{0.0, 0.0}, {0.0, 0.0}});
  EXPECT_TRUE(build_impurity_hamiltonian(m).empty());
}

TEST(Generic, NonInteractingSingleBathMatchesFreeFermions) {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (int k = 0; k < 10; ++k) {
    const double mu = u(rng), ea = u(rng), e1 = u(rng), v = u(rng);
    ImpurityModel m(2, 2, mu, {ea, ea}, {}, {e1, e1}, {{v, 0.0}, {0.0, v}});
    Eigen::MatrixXd sp(2, 2);
    sp << ea - mu, v, v, e1;
    auto lv = symmetric_eigenvalues(sp);
    std::vector<double> levels = {lv[0], lv[1], lv[0], lv[1]};
    auto ev = sorted_eigenvalues(bitwise_matrix(build_impurity_hamiltonian(m)));
    EXPECT_LT(max_abs_diff(ev, free_fermion_spectrum(levels)), 1e-11);
  }
}

TEST(Generic, NonInteractingTwoBathSitesMatchesFreeFermions) {
  // one impurity site, two bath sites: 6 spin orbitals
  const double mu = 0.3, ea = -0.2, e1 = 0.7, e2 = -1.1, v1 = 0.5, v2 = 0.9;
  ImpurityModel m(2, 4, mu, {ea, ea}, {}, {e1, e1, e2, e2}, {{v1, 0.0, v2, 0.0}, {0.0, v1, 0.0, v2}});
  Eigen::MatrixXd sp(3, 3);
  sp << ea - mu, v1, v2, v1, e1, 0, v2, 0, e2;
  auto lv = symmetric_eigenvalues(sp);
  std::vector<double> levels = {lv[0], lv[1], lv[2], lv[0], lv[1], lv[2]};
  auto ev = sorted_eigenvalues(bitwise_matrix(build_impurity_hamiltonian(m)));
  EXPECT_LT(max_abs_diff(ev, free_fermion_spectrum(levels)), 1e-11);
}

TEST(Generic, AtomicLimitLevels) {
  // V = 0: impurity levels 0, -mu (x2), U - 2 mu
  const double U = 3.0, mu = 1.2;
  ImpurityModel m(2, 2, mu, {0.0, 0.0}, {{0, 1, 1, 0, U}}, {0.0, 0.0}, {{0.0, 0.0}, {0.0, 0.0}});
  Eigen::MatrixXcd h = bitwise_matrix(build_impurity_hamiltonian(m));
  // impurity_first: qubits 0,1 are impurity up, down
  EXPECT_NEAR(h(0b0000, 0b0000).real(), 0.0, 1e-12);
  EXPECT_NEAR(h(0b1000, 0b1000).real(), -mu, 1e-12);
  EXPECT_NEAR(h(0b0100, 0b0100).real(), -mu, 1e-12);
  EXPECT_NEAR(h(0b1100, 0b1100).real(), U - 2 * mu, 1e-12);
}

TEST(Penalty, RejectsNonPositiveWeight) {
  PauliSum h = build_two_site_hamiltonian(4, 2, 0, 1);
  EXPECT_THROW(add_number_penalty(h, 0.0, 2), ParameterError);
  EXPECT_THROW(add_number_penalty(h, -1.0, 2), ParameterError);
  EXPECT_GT(default_penalty_weight(h), 0.0);
}

TEST(Penalty, DiagonalValuesAreSquaredDistance) {
  PauliSum p = add_number_penalty(PauliSum(4), 1.5, 3);
  Eigen::MatrixXcd m = bitwise_matrix(p);
  for (std::uint64_t b = 0; b < 16; ++b) {
    const int d = popcount_sector(b, 4) - 3;
    EXPECT_NEAR(m(b, b).real(), 1.5 * d * d, 1e-12);
  }
}

TEST(Penalty, SectorPenaltyGroundSitsInTargetSector) {
  PauliSum h = build_two_site_hamiltonian(4, 2, 0, 1);
  const double beta = default_penalty_weight(h);
  auto layout = QubitLayout::spin_blocked(2, 2);
  auto ev = sorted_eigenvalues(bitwise_matrix(add_sector_penalty(h, beta, Sector(3, 1), layout)));
  auto r = sorted_eigenvalues(bitwise_matrix(build_reduced_hamiltonian(Sector(3, 1), 4, 2, 0, 1)));
  // the reduced N=3 register holds both S_z = +1 and -1, so its levels come in pairs
  EXPECT_NEAR(ev[0], r[0], 1e-10);
  EXPECT_NEAR(ev[1], r[2], 1e-10);
}

TEST(Reduced, ClosedFormCoefficients) {
  PauliSum h1 = build_reduced_hamiltonian(Sector(1, 1), 4, 2, 0.5, 0.9);
  EXPECT_NEAR(h1.coefficient("IZ").real(), 1.25, 1e-15);
  EXPECT_NEAR(h1.coefficient("IX").real(), 0.9, 1e-15);
  EXPECT_NEAR(h1.identity_coefficient(), 1.0 - 1.0 - 0.25, 1e-15);
  EXPECT_NEAR(build_reduced_hamiltonian(Sector(0, 0), 4, 2, 0.5, 0.9).identity_coefficient(), 2 - 1 - 0.5, 1e-15);
  EXPECT_THROW(build_reduced_hamiltonian(Sector(5, 1), 4, 2, 0.5, 0.9), ParameterError);
  EXPECT_EQ(two_site_sectors().size(), 9u);
}

// Projecting the 4-qubit Hamiltonian through the reduced basis embedding
// reproduces the reduced Hamiltonian matrix entry by entry.
TEST(Reduced, EmbeddingProjectsFullHamiltonian) {
  std::mt19937_64 rng(10);
  for (int k = 0; k < 20; ++k) {
    auto p = qdmft::testing::random_two_site(rng);
    Eigen::MatrixXcd full = bitwise_matrix(build_two_site_hamiltonian(p.U, p.mu, p.eps2, p.V));
    for (auto& s : two_site_sectors()) {
      PauliSum red = build_reduced_hamiltonian(s, p.U, p.mu, p.eps2, p.V);
      if (is_constant_sector(s)) {
        ASSERT_EQ(red.size(), 1u);
        // the constant sectors are single basis states
        for (std::uint64_t b = 0; b < 16; ++b) {
          int ne = 0, sz = 0;
          for (int q = 0; q < 4; ++q)
            if ((b >> (3 - q)) & 1) {
              ++ne;
              sz += q < 2 ? 1 : -1;
            }
          if (ne == s.n_electrons && sz == s.sz) EXPECT_NEAR(full(b, b).real(), red.identity_coefficient(), 1e-12);
        }
        continue;
      }
      if (s.sz < 0 && s.n_electrons != 2) continue;
      Eigen::MatrixXcd rm = bitwise_matrix(red);
      for (std::uint64_t r = 0; r < 4; ++r)
        for (std::uint64_t c = 0; c < 4; ++c) {
          const auto fr = reduced_basis_embedding(s, r), fc = reduced_basis_embedding(s, c);
          ASSERT_LT(std::abs(full(fr, fc) - rm(r, c)), 1e-12) << to_string(s) << " " << r << c;
        }
    }
  }
}

TEST(Reduced, SectorSpectraMatchDenseBlocks) {
  std::mt19937_64 rng(12);
  for (int k = 0; k < 20; ++k) {
    auto p = qdmft::testing::random_two_site(rng);
    Eigen::MatrixXcd full = bitwise_matrix(build_two_site_hamiltonian(p.U, p.mu, p.eps2, p.V));
    for (auto& s : two_site_sectors()) {
      std::vector<Eigen::Index> idx;
      for (std::uint64_t b = 0; b < 16; ++b) {
        int ne = 0, sz = 0;
        for (int q = 0; q < 4; ++q)
          if ((b >> (3 - q)) & 1) {
            ++ne;
            sz += q < 2 ? 1 : -1;
          }
        if (ne == s.n_electrons && sz == s.sz) idx.push_back(static_cast<Eigen::Index>(b));
      }
      Eigen::MatrixXcd block(idx.size(), idx.size());
      for (std::size_t r = 0; r < idx.size(); ++r)
        for (std::size_t c = 0; c < idx.size(); ++c) block(r, c) = full(idx[r], idx[c]);
      auto dense = sorted_eigenvalues(block);
      PauliSum red = build_reduced_hamiltonian(s, p.U, p.mu, p.eps2, p.V);
      std::vector<double> reduced;
      if (is_constant_sector(s))
        reduced.assign(idx.size(), red.identity_coefficient());
      else
        reduced = sorted_eigenvalues(bitwise_matrix(red));
      if (s.n_electrons != 2 && !is_constant_sector(s)) {
        ASSERT_NEAR(reduced[0], reduced[1], 1e-11);
        ASSERT_NEAR(reduced[2], reduced[3], 1e-11);
        reduced = {reduced[0], reduced[2]};
      }
      ASSERT_LT(max_abs_diff(dense, reduced), 1e-11) << to_string(s);
    }
  }
}

TEST(Reduced, PauliOperatorsActAsTwoQubitPaulisOnSubspace) {
  for (int ne : {1, 2, 3}) {
    auto rp = reduced_pauli_operators(ne);
    Sector s(ne, ne == 2 ? 0 : 1);
    const std::pair<const PauliSum*, std::string> ops[] = {{&rp.z1, "ZI"}, {&rp.z2, "IZ"}, {&rp.x1, "XI"},
                                                           {&rp.x2, "IX"}, {&rp.y1, "YI"}, {&rp.y2, "IY"}};
    for (auto& [op, axes] : ops) {
      Eigen::MatrixXcd big = bitwise_matrix(*op);
      Eigen::MatrixXcd small = bitwise_matrix(PauliSum(PauliString(axes)));
      for (std::uint64_t r = 0; r < 4; ++r)
        for (std::uint64_t c = 0; c < 4; ++c)
          ASSERT_LT(std::abs(big(reduced_basis_embedding(s, r), reduced_basis_embedding(s, c)) - small(r, c)), 1e-12)
              << ne << " " << axes;
    }
  }
  EXPECT_THROW(reduced_pauli_operators(0), ParameterError);
}
