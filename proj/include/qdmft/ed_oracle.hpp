#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <vector>

#include <Eigen/Dense>

#include "qdmft/hamiltonian.hpp"
#include "qdmft/spectral_data.hpp"
#include "qdmft/statevector.hpp"

namespace qdmft {

// Dense 2^n matrix by Kronecker products of the single-qubit factors.
inline Eigen::MatrixXcd dense_matrix(const PauliSum& h) {
  const std::size_t n = h.n_qubits();
  if (n > 12) throw DimensionError("dense_matrix: at most 12 qubits");
  const Eigen::Index dim = Eigen::Index{1} << n;
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(dim, dim);
  auto factor = [](char a) {
    Eigen::Matrix2cd m;
    const cplx i(0, 1);
    switch (a) {
      case 'X': m << 0, 1, 1, 0; break;
      case 'Y': m << 0, -i, i, 0; break;
      case 'Z': m << 1, 0, 0, -1; break;
      default: m << 1, 0, 0, 1;
    }
    return m;
  };
  for (auto& [axes, c] : h.terms()) {
    Eigen::MatrixXcd k = Eigen::MatrixXcd::Ones(1, 1);
    for (char a : axes) {
      Eigen::MatrixXcd next(k.rows() * 2, k.cols() * 2);
      const Eigen::Matrix2cd f = factor(a);
      for (Eigen::Index r = 0; r < k.rows(); ++r)
        for (Eigen::Index s = 0; s < k.cols(); ++s) next.block(2 * r, 2 * s, 2, 2) = k(r, s) * f;
      k = std::move(next);
    }
    out += c * k;
  }
  return out;
}

struct Eigenpair {
  double energy;
  Eigen::VectorXcd vector;
  Sector sector;
  int index;  // position among states with the same N
};

// Eigenpairs ordered by N, then energy; degenerate states by descending S_z.
struct LabeledSpectrum {
  std::vector<Eigenpair> states;

  std::vector<const Eigenpair*> with_n(int n) const {
    std::vector<const Eigenpair*> out;
    for (auto& s : states)
      if (s.sector.n_electrons == n) out.push_back(&s);
    return out;
  }

  std::vector<double> sector_energies(const Sector& sec) const {
    std::vector<double> out;
    for (auto& s : states)
      if (s.sector == sec) out.push_back(s.energy);
    return out;
  }

  const Eigenpair& ground() const {
    if (states.empty()) throw EvaluationError("empty spectrum");
    return *std::min_element(states.begin(), states.end(),
                             [](const Eigenpair& a, const Eigenpair& b) { return a.energy < b.energy; });
  }
};

inline constexpr double kDegeneracyTol = 1e-8;

// Orders degenerate runs (within kDegeneracyTol) by descending S_z and
// assigns the per-N index.
inline void order_within_n(std::vector<Eigenpair>& v) {
  std::stable_sort(v.begin(), v.end(), [](const Eigenpair& a, const Eigenpair& b) {
    if (a.sector.n_electrons != b.sector.n_electrons) return a.sector.n_electrons < b.sector.n_electrons;
    return a.energy < b.energy;
  });
  std::size_t i = 0;
  while (i < v.size()) {
    std::size_t j = i + 1;
    while (j < v.size() && v[j].sector.n_electrons == v[i].sector.n_electrons &&
           v[j].energy - v[j - 1].energy < kDegeneracyTol)
      ++j;
    std::stable_sort(v.begin() + i, v.begin() + j,
                     [](const Eigenpair& a, const Eigenpair& b) { return a.sector.sz > b.sector.sz; });
    i = j;
  }
  int count = 0, current = -1;
  for (auto& e : v) {
    if (e.sector.n_electrons != current) {
      current = e.sector.n_electrons;
      count = 0;
    }
    e.index = count++;
  }
}

// Diagonalizes h within each (N, S_z) block of the computational basis.
// Requires h to conserve both quantum numbers.
inline LabeledSpectrum full_spectrum(const PauliSum& h, const QubitLayout& layout) {
  if (!h.is_hermitian()) throw ParameterError("full_spectrum: Hamiltonian is not Hermitian");
  if (layout.n_qubits() != h.n_qubits()) throw DimensionError("full_spectrum: layout size mismatch");
  const std::size_t n = h.n_qubits();
  const Eigen::MatrixXcd m = dense_matrix(h);
  const Eigen::Index dim = m.rows();

  std::vector<Sector> label(dim);
  for (Eigen::Index b = 0; b < dim; ++b) {
    int ne = 0, sz = 0;
    for (std::size_t q = 0; q < n; ++q)
      if ((b >> (n - 1 - q)) & 1) {
        ++ne;
        sz += layout.spin_of_qubit(q);
      }
    label[b] = Sector(ne, sz);
  }
  for (Eigen::Index r = 0; r < dim; ++r)
    for (Eigen::Index c = 0; c < dim; ++c)
      if (!(label[r] == label[c]) && std::abs(m(r, c)) > 1e-12)
        throw ParameterError("full_spectrum: Hamiltonian does not conserve N and S_z");

  std::map<Sector, std::vector<Eigen::Index>> blocks;
  for (Eigen::Index b = 0; b < dim; ++b) blocks[label[b]].push_back(b);

  LabeledSpectrum out;
  for (auto& [sec, idx] : blocks) {
    const Eigen::Index k = static_cast<Eigen::Index>(idx.size());
    Eigen::MatrixXcd sub(k, k);
    for (Eigen::Index r = 0; r < k; ++r)
      for (Eigen::Index c = 0; c < k; ++c) sub(r, c) = m(idx[r], idx[c]);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(sub);
    for (Eigen::Index e = 0; e < k; ++e) {
      Eigen::VectorXcd full = Eigen::VectorXcd::Zero(dim);
      for (Eigen::Index r = 0; r < k; ++r) full(idx[r]) = es.eigenvectors()(r, e);
      out.states.push_back({es.eigenvalues()(e), std::move(full), sec, 0});
    }
  }
  order_within_n(out.states);
  return out;
}

// 2-site Hamiltonians use the spin-blocked layout.
inline LabeledSpectrum full_spectrum(const PauliSum& h) {
  if (h.n_qubits() != 4) throw DimensionError("full_spectrum without a layout expects the 4-qubit 2-site register");
  return full_spectrum(h, QubitLayout::spin_blocked(2, 2));
}

// (prod_{p<q} Z_p) X_q
inline PauliString jw_x(std::size_t q, std::size_t n) {
  std::string s(n, 'I');
  for (std::size_t p = 0; p < q; ++p) s[p] = 'Z';
  s[q] = 'X';
  return PauliString(s);
}

inline PauliString jw_y(std::size_t q, std::size_t n) {
  std::string s(n, 'I');
  for (std::size_t p = 0; p < q; ++p) s[p] = 'Z';
  s[q] = 'Y';
  return PauliString(s);
}

// Hamiltonian and layout used by the oracle for a model.
inline std::pair<PauliSum, QubitLayout> oracle_hamiltonian(const ImpurityModel& m) {
  if (m.two_site_params())
    return {build_two_site_hamiltonian(*m.two_site_params()), QubitLayout::spin_blocked(2, 2)};
  auto layout = QubitLayout::for_model(m);
  return {build_impurity_hamiltonian(m, layout), layout};
}

// Lehmann poles and weights from dense eigenpairs, one weight per orbital in
// `orbitals` (impurity spin-orbital indices).
inline SpectralData exact_spectral_data(const ImpurityModel& model, const std::vector<std::size_t>& orbitals = {0}) {
  auto [h, layout] = oracle_hamiltonian(model);
  const LabeledSpectrum spec = full_spectrum(h, layout);
  const Eigenpair& g = spec.ground();
  for (auto& s : spec.states)
    if (s.sector.n_electrons != g.sector.n_electrons && std::abs(s.energy - g.energy) < 1e-9)
      throw EvaluationError("ground state degenerate across electron numbers " +
                            std::to_string(g.sector.n_electrons) + " and " + std::to_string(s.sector.n_electrons));

  const std::size_t n = h.n_qubits();
  std::vector<Eigen::VectorXcd> xg;
  for (auto a : orbitals) {
    if (a >= model.n_imp()) throw ParameterError("orbital is not an impurity orbital");
    Statevector tmp(n, std::vector<cplx>(g.vector.data(), g.vector.data() + g.vector.size()));
    const Statevector r = tmp.apply_pauli(jw_x(layout.qubit(a), n));
    xg.push_back(Eigen::Map<const Eigen::VectorXcd>(r.amplitudes().data(), r.dim()));
  }

  SpectralData out;
  out.n0 = g.sector.n_electrons;
  out.e0 = g.energy;
  for (auto& s : spec.states) {
    const int dn = s.sector.n_electrons - out.n0;
    if (std::abs(dn) != 1) continue;
    Pole p;
    p.sector = s.sector;
    p.index = s.index;
    p.omega = dn > 0 ? s.energy - out.e0 : out.e0 - s.energy;
    for (auto& v : xg) p.lambda.push_back(std::norm(s.vector.dot(v)));
    (dn > 0 ? out.particle : out.hole).push_back(std::move(p));
  }
  out.sort_poles();
  return out;
}

struct LadderReport {
  double max_x_deviation = 0.0;     // |<a|c_q|b> - <a|Zs X_q|b>| over N_a = N_b - 1
  double max_y_deviation = 0.0;     // |<a|c_q|b> - i<a|Zs Y_q|b>| over N_a = N_b - 1
  double max_selection = 0.0;       // |<a|c_q|b>| over N_a != N_b - 1
  double max_create_deviation = 0.0;  // creation-operator analogue of the first two
  std::size_t pairs = 0;

  double max_deviation() const {
    return std::max({max_x_deviation, max_y_deviation, max_selection, max_create_deviation});
  }
  bool passed(double tol = 1e-12) const { return max_deviation() < tol; }
};

// Checks that the ladder operators built by `factory` reproduce the
// Z-string/X and Z-string/Y matrix elements between eigenstates, and that
// they only connect states whose electron numbers differ by one.
inline LadderReport verify_ladder_identities(const ImpurityModel& model, const LadderFactory& factory = ladder_on_qubit) {
  auto [h, layout] = oracle_hamiltonian(model);
  const LabeledSpectrum spec = full_spectrum(h, layout);
  const std::size_t n = h.n_qubits();
  const cplx i(0, 1);
  LadderReport rep;
  for (std::size_t q = 0; q < n; ++q) {
    const Eigen::MatrixXcd ann = dense_matrix(factory(q, Ladder::annihilate, n));
    const Eigen::MatrixXcd cre = dense_matrix(factory(q, Ladder::create, n));
    const Eigen::MatrixXcd zx = dense_matrix(PauliSum(jw_x(q, n)));
    const Eigen::MatrixXcd zy = dense_matrix(PauliSum(jw_y(q, n)));
    for (auto& b : spec.states) {
      const Eigen::VectorXcd ab = ann * b.vector, cb = cre * b.vector, xb = zx * b.vector, yb = zy * b.vector;
      for (auto& a : spec.states) {
        ++rep.pairs;
        const cplx m_ann = a.vector.dot(ab), m_cre = a.vector.dot(cb);
        const cplx m_x = a.vector.dot(xb), m_y = a.vector.dot(yb);
        const int dn = a.sector.n_electrons - b.sector.n_electrons;
        if (dn == -1) {
          rep.max_x_deviation = std::max(rep.max_x_deviation, std::abs(m_ann - m_x));
          rep.max_y_deviation = std::max(rep.max_y_deviation, std::abs(m_ann - i * m_y));
        } else {
          rep.max_selection = std::max(rep.max_selection, std::abs(m_ann));
        }
        if (dn == 1) {
          rep.max_create_deviation = std::max(rep.max_create_deviation, std::abs(m_cre - m_x));
          rep.max_create_deviation = std::max(rep.max_create_deviation, std::abs(m_cre + i * m_y));
        } else {
          rep.max_selection = std::max(rep.max_selection, std::abs(m_cre));
        }
      }
    }
  }
  return rep;
}

}  // namespace qdmft
