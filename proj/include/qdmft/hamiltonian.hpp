#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "qdmft/model.hpp"
#include "qdmft/pauli.hpp"

namespace qdmft {

enum class Ladder { create, annihilate };

// Jordan-Wigner ladder operator on qubit q of an n-qubit register:
// Z on every lower qubit, then (X - iY)/2 (create) or (X + iY)/2 (annihilate).
inline PauliSum ladder_on_qubit(std::size_t q, Ladder kind, std::size_t n) {
  if (q >= n) throw ParameterError("ladder qubit " + std::to_string(q) + " out of range");
  std::string base(n, 'I');
  for (std::size_t p = 0; p < q; ++p) base[p] = 'Z';
  std::string xs = base, ys = base;
  xs[q] = 'X';
  ys[q] = 'Y';
  double sign = kind == Ladder::create ? -1.0 : 1.0;
  PauliSum s(n);
  s.add(PauliString(xs), 0.5);
  s.add(PauliString(ys), cplx(0.0, 0.5 * sign));
  return s;
}

inline PauliSum ladder_operator(std::size_t orbital, Ladder kind, const QubitLayout& layout) {
  return ladder_on_qubit(layout.qubit(orbital), kind, layout.n_qubits());
}

// Injection point for alternative ladder constructions (used to mutation-test
// the verification suites).
using LadderFactory = std::function<PauliSum(std::size_t qubit, Ladder kind, std::size_t n)>;

// n_q = c+_q c_q = (1 - Z_q)/2
inline PauliSum occupation_on_qubit(std::size_t q, std::size_t n) {
  PauliSum s = PauliSum::constant(n, 0.5);
  s.add(PauliString::single(n, q, 'Z'), -0.5);
  return s;
}

inline PauliSum number_operator(std::size_t n) {
  PauliSum s(n);
  for (std::size_t q = 0; q < n; ++q) s += occupation_on_qubit(q, n);
  return s;
}

// Total S_z in units of hbar/2.
inline PauliSum spin_z_operator(const QubitLayout& layout) {
  std::size_t n = layout.n_qubits();
  PauliSum s(n);
  for (std::size_t q = 0; q < n; ++q) s += occupation_on_qubit(q, n) * cplx(layout.spin_of_qubit(q));
  return s;
}

inline PauliSum two_site_spin_z_operator() { return spin_z_operator(QubitLayout::spin_blocked(2, 2)); }

// H = sum_a (eps_a - mu) n_a + sum U_abcd c+_a c+_b c_c c_d
//   + sum_ai V_ai (c+_a c_i + c+_i c_a) + sum_i eps_i n_i
inline PauliSum build_impurity_hamiltonian(const ImpurityModel& m, const QubitLayout& layout) {
  if (layout.n_imp() != m.n_imp() || layout.n_bath() != m.n_bath())
    throw DimensionError("layout does not match model orbital counts");
  const std::size_t n = layout.n_qubits();
  auto cd = [&](std::size_t o) { return ladder_operator(o, Ladder::create, layout); };
  auto c = [&](std::size_t o) { return ladder_operator(o, Ladder::annihilate, layout); };

  PauliSum h(n);
  for (std::size_t a = 0; a < m.n_imp(); ++a)
    if (m.eps_imp()[a] - m.mu() != 0.0) h += (cd(a) * c(a)) * cplx(m.eps_imp()[a] - m.mu());
  for (auto& u : m.interactions())
    if (u.value != 0.0) h += (cd(u.a) * cd(u.b) * c(u.c) * c(u.d)) * cplx(u.value);
  for (std::size_t a = 0; a < m.n_imp(); ++a)
    for (std::size_t i = 0; i < m.n_bath(); ++i) {
      double v = m.hoppings()[a][i];
      if (v == 0.0) continue;
      std::size_t b = m.n_imp() + i;
      h += (cd(a) * c(b) + cd(b) * c(a)) * cplx(v);
    }
  for (std::size_t i = 0; i < m.n_bath(); ++i)
    if (m.eps_bath()[i] != 0.0) h += (cd(m.n_imp() + i) * c(m.n_imp() + i)) * cplx(m.eps_bath()[i]);
  return h;
}

inline PauliSum build_impurity_hamiltonian(const ImpurityModel& m) {
  return build_impurity_hamiltonian(m, QubitLayout::for_model(m));
}

// Qubits 1..4 = impurity up, bath up, impurity down, bath down.
inline PauliSum build_two_site_hamiltonian(double U, double mu, double eps2, double V) {
  PauliSum h(4);
  h.add(PauliString("ZIZI"), U / 4);
  h.add(PauliString("ZIII"), mu / 2 - U / 4);
  h.add(PauliString("IIZI"), mu / 2 - U / 4);
  h.add(PauliString("IZII"), -eps2 / 2);
  h.add(PauliString("IIIZ"), -eps2 / 2);
  for (auto s : {"XXII", "YYII", "IIXX", "IIYY"}) h.add(PauliString(s), V / 2);
  return h;
}

inline PauliSum build_two_site_hamiltonian(const TwoSiteParams& p) {
  return build_two_site_hamiltonian(p.U, p.mu, p.eps2, p.V);
}

inline double default_penalty_weight(const PauliSum& h) { return 10.0 * h.one_norm(); }

// h + beta (N - n_target)^2
inline PauliSum add_number_penalty(const PauliSum& h, double beta, int n_target) {
  if (!(beta > 0.0)) throw ParameterError("penalty weight must be positive");
  PauliSum d = number_operator(h.n_qubits()) - PauliSum::constant(h.n_qubits(), n_target);
  return h + (d * d) * cplx(beta);
}

// h + beta (N - N_t)^2 + beta (S_z - S_t)^2
inline PauliSum add_sector_penalty(const PauliSum& h, double beta, const Sector& target, const QubitLayout& layout) {
  if (!(beta > 0.0)) throw ParameterError("penalty weight must be positive");
  if (layout.n_qubits() != h.n_qubits()) throw DimensionError("layout does not match Hamiltonian");
  PauliSum d = spin_z_operator(layout) - PauliSum::constant(h.n_qubits(), target.sz);
  return add_number_penalty(h, beta, target.n_electrons) + (d * d) * cplx(beta);
}

// Sectors of the 2-site model that have a closed-form reduced Hamiltonian.
inline const std::array<Sector, 9>& two_site_sectors() {
  static const std::array<Sector, 9> s = {Sector{0, 0}, Sector{1, -1}, Sector{1, 1}, Sector{2, -2}, Sector{2, 0},
                                          Sector{2, 2},  Sector{3, -1}, Sector{3, 1}, Sector{4, 0}};
  return s;
}

inline bool is_constant_sector(const Sector& s) {
  return s.n_electrons == 0 || s.n_electrons == 4 || std::abs(s.sz) == 2;
}

// Sector-projected 2-site Hamiltonian on a 2-qubit register. Reduced qubit 1
// carries -S_z for N=1,3 and the up-spin pair for N=2; constant sectors are
// returned as identity-only sums.
inline PauliSum build_reduced_hamiltonian(const Sector& sector, double U, double mu, double eps2, double V) {
  PauliSum h(2);
  const int n = sector.n_electrons, sz = sector.sz;
  if (n == 0 && sz == 0) {
    h.add(PauliString("II"), mu - U / 4 - eps2);
  } else if (n == 4 && sz == 0) {
    h.add(PauliString("II"), -mu + 3 * U / 4 + eps2);
  } else if (n == 2 && std::abs(sz) == 2) {
    h.add(PauliString("II"), -U / 4);
  } else if (n == 2 && sz == 0) {
    h.add(PauliString("ZZ"), U / 4);
    h.add(PauliString("ZI"), mu / 2 - U / 4 + eps2 / 2);
    h.add(PauliString("IZ"), mu / 2 - U / 4 + eps2 / 2);
    h.add(PauliString("XI"), V);
    h.add(PauliString("IX"), V);
  } else if (n == 1 && std::abs(sz) == 1) {
    h.add(PauliString("IZ"), mu / 2 + eps2 / 2);
    h.add(PauliString("IX"), V);
    h.add(PauliString("II"), mu / 2 - U / 4 - eps2 / 2);
  } else if (n == 3 && std::abs(sz) == 1) {
    h.add(PauliString("IZ"), mu / 2 + eps2 / 2 - U / 2);
    h.add(PauliString("IX"), V);
    h.add(PauliString("II"), -(mu / 2 - U / 4 - eps2 / 2));
  } else {
    throw ParameterError("no reduced Hamiltonian for sector " + to_string(sector));
  }
  return h;
}

inline PauliSum build_reduced_hamiltonian(const Sector& s, const TwoSiteParams& p) {
  return build_reduced_hamiltonian(s, p.U, p.mu, p.eps2, p.V);
}

// 4-qubit operators acting as the reduced Paulis {Z1, Z2, X1, X2, Y1, Y2} on
// the N=1,3 or N=2 (S_z=0) subspace.
struct ReducedPaulis {
  PauliSum z1{4}, z2{4}, x1{4}, x2{4}, y1{4}, y2{4};
};

inline ReducedPaulis reduced_pauli_operators(int n_electrons) {
  auto sum = [](std::initializer_list<std::pair<const char*, double>> terms) {
    PauliSum s(4);
    for (auto& [a, c] : terms) s.add(PauliString(a), c);
    return s;
  };
  ReducedPaulis r;
  if (n_electrons == 1 || n_electrons == 3) {
    r.z1 = sum({{"ZIII", 0.5}, {"IZII", 0.5}, {"IIZI", -0.5}, {"IIIZ", -0.5}});
    r.z2 = sum({{"ZIII", 0.5}, {"IZII", -0.5}, {"IIZI", 0.5}, {"IIIZ", -0.5}});
    r.x1 = sum({{"XIXI", 0.5}, {"YIYI", 0.5}, {"IXIX", 0.5}, {"IYIY", 0.5}});
    r.x2 = sum({{"XXII", 0.5}, {"YYII", 0.5}, {"IIXX", 0.5}, {"IIYY", 0.5}});
    r.y1 = sum({{"XIYI", -0.5}, {"YIXI", 0.5}, {"IXIY", -0.5}, {"IYIX", 0.5}});
    r.y2 = sum({{"XYII", -0.5}, {"YXII", 0.5}, {"IIXY", -0.5}, {"IIYX", 0.5}});
  } else if (n_electrons == 2) {
    r.z1 = sum({{"ZIII", 1.0}});
    r.z2 = sum({{"IIZI", 1.0}});
    r.x1 = sum({{"XXII", 1.0}});
    r.x2 = sum({{"IIXX", 1.0}});
    r.y1 = sum({{"YXII", 1.0}});
    r.y2 = sum({{"IIYX", 1.0}});
  } else {
    throw ParameterError("reduced Paulis exist only for N = 1, 2, 3");
  }
  return r;
}

// 4-qubit basis index (qubit 1 most significant) of reduced basis state b
// (reduced qubit 1 most significant) for the 2-qubit sectors. Every embedding
// carries a + sign.
inline std::uint64_t reduced_basis_embedding(const Sector& s, std::uint64_t b) {
  if (b > 3) throw ParameterError("reduced basis index out of range");
  const std::uint64_t b1 = b >> 1, b2 = b & 1;
  if (s.n_electrons == 2 && s.sz == 0) return (b1 << 3) | ((1 - b1) << 2) | (b2 << 1) | (1 - b2);
  if (s.n_electrons == 3 && std::abs(s.sz) == 1) {
    // b = 00,01,10,11 leaves qubit 1,2,3,4 empty
    static const std::uint64_t map[4] = {0b0111, 0b1011, 0b1101, 0b1110};
    return map[b];
  }
  if (s.n_electrons == 1 && std::abs(s.sz) == 1) {
    // b = 00,01,10,11 puts the electron on qubit 4,3,2,1
    static const std::uint64_t map[4] = {0b0001, 0b0010, 0b0100, 0b1000};
    return map[b];
  }
  throw ParameterError("no reduced register for sector " + to_string(s));
}

}  // namespace qdmft
