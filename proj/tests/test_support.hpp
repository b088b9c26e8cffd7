#pragma once

#include <algorithm>
#include <bit>
#include <complex>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qdmft/pauli.hpp"

namespace qdmft::testing {

// Matrix of a Pauli sum from the bit-flip/sign rule
// <r|P|c> = i^{#Y} (-1)^{|c & z|} [r == c ^ x], independent of Kronecker assembly.
inline Eigen::MatrixXcd bitwise_matrix(const PauliSum& h) {
  const std::size_t n = h.n_qubits();
  const Eigen::Index dim = Eigen::Index{1} << n;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (auto& [axes, c] : h.terms()) {
    std::uint64_t x = 0, z = 0;
    int ny = 0;
    for (std::size_t q = 0; q < n; ++q) {
      const std::uint64_t b = std::uint64_t{1} << (n - 1 - q);
      if (axes[q] == 'X' || axes[q] == 'Y') x |= b;
      if (axes[q] == 'Z' || axes[q] == 'Y') z |= b;
      ny += axes[q] == 'Y';
    }
    const std::complex<double> ph = std::pow(std::complex<double>(0, 1), ny);
    for (Eigen::Index col = 0; col < dim; ++col) {
      const double sgn = (std::popcount(static_cast<std::uint64_t>(col) & z) & 1) ? -1.0 : 1.0;
      m(static_cast<Eigen::Index>(col ^ x), col) += c * ph * sgn;
    }
  }
  return m;
}

inline std::string random_axes(std::mt19937_64& rng, std::size_t n) {
  std::string s(n, 'I');
  for (auto& c : s) c = "IXYZ"[rng() % 4];
  return s;
}

inline std::vector<double> sorted_eigenvalues(const Eigen::MatrixXcd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
  std::vector<double> v(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(v.begin(), v.end());
  return v;
}

inline double max_abs_diff(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  if (a.size() != b.size()) return 1e300;
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

struct RandomTwoSite {
  double U, mu, eps2, V;
};

inline RandomTwoSite random_two_site(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 8.0), m(-3.0, 5.0), e(-2.0, 2.0), v(0.05, 2.0);
  return {u(rng), m(rng), e(rng), v(rng)};
}

}  // namespace qdmft::testing
