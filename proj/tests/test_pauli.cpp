#include <gtest/gtest.h>

#include <random>

#include "qdmft/pauli.hpp"
#include "test_support.hpp"

using namespace qdmft;
using qdmft::testing::bitwise_matrix;

TEST(PauliString, SingleQubitProductCarriesPhase) {
  PauliString p = multiply(PauliString("XI"), PauliString("YI"));
  EXPECT_EQ(p.axes(), "ZI");
  EXPECT_EQ(p.phase(), cplx(0, 1));
}

TEST(PauliString, InvolutionGivesIdentity) {
  PauliString p = multiply(PauliString("ZZ"), PauliString("ZZ"));
  EXPECT_EQ(p.axes(), "II");
  EXPECT_EQ(p.phase(), cplx(1, 0));
}

TEST(PauliString, CyclicTable) {
  EXPECT_EQ(multiply(PauliString("Y"), PauliString("Z")), PauliString("X", 1));
  EXPECT_EQ(multiply(PauliString("Z"), PauliString("X")), PauliString("Y", 1));
  EXPECT_EQ(multiply(PauliString("Y"), PauliString("X")), PauliString("Z", 3));
}

TEST(PauliString, MixedProductMatchesDenseProduct) {
  PauliString a("XZ"), b("YX");
  PauliString p = multiply(a, b);
  Eigen::MatrixXcd lhs = bitwise_matrix(PauliSum(p));
  Eigen::MatrixXcd rhs = bitwise_matrix(PauliSum(a)) * bitwise_matrix(PauliSum(b));
  EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(p.axes(), "ZY");
}

TEST(PauliString, RandomProductsMatchDenseProducts) {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 200; ++k) {
    PauliString a(qdmft::testing::random_axes(rng, 3), static_cast<int>(rng() % 4));
    PauliString b(qdmft::testing::random_axes(rng, 3), static_cast<int>(rng() % 4));
    Eigen::MatrixXcd lhs = bitwise_matrix(PauliSum(multiply(a, b)));
    Eigen::MatrixXcd rhs = bitwise_matrix(PauliSum(a)) * bitwise_matrix(PauliSum(b));
    ASSERT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-15) << a.axes() << " * " << b.axes();
    const bool dense_commute = (rhs - bitwise_matrix(PauliSum(b)) * bitwise_matrix(PauliSum(a))).norm() < 1e-12;
    ASSERT_EQ(commutes(a, b), dense_commute);
  }
}

TEST(PauliString, MismatchedSizesThrow) {
  EXPECT_THROW(multiply(PauliString("X"), PauliString("XX")), DimensionError);
  EXPECT_THROW(PauliString("XQ"), ParameterError);
}

TEST(PauliSum, CanonicalOrderAndMerging) {
  PauliSum s(2);
  s.add(PauliString("ZI"), 1.0);
  s.add(PauliString("XY"), 2.0);
  s.add(PauliString("IZ"), 3.0);
  s.add(PauliString("XY"), 0.5);
  std::vector<std::string> order;
  for (auto& [axes, c] : s.terms()) order.push_back(axes);
  EXPECT_EQ(order, (std::vector<std::string>{"IZ", "XY", "ZI"}));
  EXPECT_EQ(s.coefficient("XY"), cplx(2.5));
}

TEST(PauliSum, PrunesCancellationDust) {
  PauliSum s(1);
  s.add(PauliString("X"), 0.1);
  s.add(PauliString("X"), -0.1 + 1e-16);
  EXPECT_TRUE(s.empty());
}

TEST(PauliSum, PhaseFoldedIntoCoefficient) {
  PauliSum s(PauliString("Y", 2), 3.0);
  EXPECT_EQ(s.coefficient("Y"), cplx(-3.0));
}

TEST(PauliSum, ProductMatchesDenseProduct) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (int k = 0; k < 20; ++k) {
    PauliSum a(3), b(3);
    for (int t = 0; t < 5; ++t) {
      a.add(PauliString(qdmft::testing::random_axes(rng, 3)), cplx(g(rng), g(rng)));
      b.add(PauliString(qdmft::testing::random_axes(rng, 3)), cplx(g(rng), g(rng)));
    }
    Eigen::MatrixXcd lhs = bitwise_matrix(a * b);
    Eigen::MatrixXcd rhs = bitwise_matrix(a) * bitwise_matrix(b);
    ASSERT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(PauliSum, TextRoundTripIsExact) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  for (int k = 0; k < 50; ++k) {
    PauliSum s(4);
    for (int t = 0; t < 8; ++t) s.add(PauliString(qdmft::testing::random_axes(rng, 4)), g(rng) * std::pow(10.0, g(rng)));
    PauliSum back = PauliSum::parse(s.to_text());
    ASSERT_EQ(back, s);
  }
}

TEST(PauliSum, TextFormat) {
  PauliSum s(4);
  s.add(PauliString("ZIZI"), 0.25);
  s.add(PauliString("IIXX"), -1.0);
  EXPECT_EQ(s.to_text(), "-1 IIXX\n0.25 ZIZI\n");
  EXPECT_EQ(PauliSum::parse("# comment\n0.25 ZIZI\n\n-1 IIXX\n"), s);
  EXPECT_THROW(PauliSum::parse("0.25 ZIZI\n1 XX\n"), DimensionError);
  EXPECT_THROW(PauliSum::parse("abc ZIZI\n"), ParameterError);
}

TEST(PauliSum, CommutatorOfCommutingSumsIsEmpty) {
  PauliSum a(2), b(2);
  a.add(PauliString("XX"), 1.0);
  a.add(PauliString("ZZ"), 2.0);
  b.add(PauliString("YY"), 0.7);
  EXPECT_TRUE(commutator(a, b).empty());
  EXPECT_FALSE(commutator(a, PauliSum(PauliString("XI"))).empty());
}
