#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "qdmft/errors.hpp"

namespace qdmft {

// Electron number and S_z (units of hbar/2) labelling a symmetry sector.
struct Sector {
  int n_electrons = 0;
  int sz = 0;

  Sector() = default;
  Sector(int n, int s) : n_electrons(n), sz(s) {
    if (n < 0 || std::abs(s) > n || (n + s) % 2 != 0)
      throw ParameterError("invalid sector (N=" + std::to_string(n) + ", Sz=" + std::to_string(s) + ")");
  }

  bool operator==(const Sector&) const = default;
  auto operator<=>(const Sector&) const = default;
};

inline std::string to_string(const Sector& s) {
  return "(" + std::to_string(s.n_electrons) + "," + std::to_string(s.sz) + ")";
}

// Density-density and general two-body entries: value * c+_a c+_b c_c c_d.
struct Interaction {
  std::size_t a, b, c, d;
  double value;
};

struct TwoSiteParams {
  double U = 0.0;
  double mu = 0.0;
  double eps2 = 0.0;
  double V = 0.0;

  bool particle_hole_symmetric(double tol = 1e-12) const {
    return std::abs(mu - U / 2) < tol && std::abs(eps2) < tol;
  }
};

// Spin orbitals are interleaved: index 2k is site k spin up, 2k+1 spin down.
class ImpurityModel {
 public:
  ImpurityModel(std::size_t n_imp, std::size_t n_bath, double mu, std::vector<double> eps_imp,
                std::vector<Interaction> interactions, std::vector<double> eps_bath,
                std::vector<std::vector<double>> hoppings)
      : n_imp_(n_imp),
        n_bath_(n_bath),
        mu_(mu),
        eps_imp_(std::move(eps_imp)),
        interactions_(std::move(interactions)),
        eps_bath_(std::move(eps_bath)),
        hoppings_(std::move(hoppings)) {
    validate();
  }

  static ImpurityModel two_site(const TwoSiteParams& p) {
    ImpurityModel m(2, 2, p.mu, {0.0, 0.0}, {{0, 1, 1, 0, p.U}}, {p.eps2, p.eps2}, {{p.V, 0.0}, {0.0, p.V}});
    m.two_site_ = p;
    return m;
  }
  static ImpurityModel two_site(double U, double mu, double eps2, double V) {
    return two_site(TwoSiteParams{U, mu, eps2, V});
  }

  std::size_t n_imp() const { return n_imp_; }
  std::size_t n_bath() const { return n_bath_; }
  std::size_t n_orbitals() const { return n_imp_ + n_bath_; }
  double mu() const { return mu_; }
  const std::vector<double>& eps_imp() const { return eps_imp_; }
  const std::vector<Interaction>& interactions() const { return interactions_; }
  const std::vector<double>& eps_bath() const { return eps_bath_; }
  // hoppings()[alpha][i]
  const std::vector<std::vector<double>>& hoppings() const { return hoppings_; }

  const std::optional<TwoSiteParams>& two_site_params() const { return two_site_; }
  const TwoSiteParams& require_two_site() const {
    if (!two_site_) throw ParameterError("operation supports only the 2-site model");
    return *two_site_;
  }

 private:
  void validate() const {
    auto finite = [](double x) { return std::isfinite(x); };
    if (n_imp_ == 0) throw ParameterError("model needs at least one impurity orbital");
    if (n_imp_ + n_bath_ > 12) throw ParameterError("model exceeds 12 spin orbitals");
    if (!finite(mu_)) throw ParameterError("mu must be finite");
    if (eps_imp_.size() != n_imp_) throw DimensionError("eps_imp size must equal n_imp");
    if (eps_bath_.size() != n_bath_) throw DimensionError("eps_bath size must equal n_bath");
    if (hoppings_.size() != n_imp_) throw DimensionError("hoppings must have n_imp rows");
    for (auto& row : hoppings_) {
      if (row.size() != n_bath_) throw DimensionError("hoppings rows must have n_bath entries");
      for (double v : row)
        if (!finite(v)) throw ParameterError("hoppings must be finite");
    }
    for (double e : eps_imp_)
      if (!finite(e)) throw ParameterError("eps_imp must be finite");
    for (double e : eps_bath_)
      if (!finite(e)) throw ParameterError("eps_bath must be finite");
    for (auto& u : interactions_) {
      if (u.a >= n_imp_ || u.b >= n_imp_ || u.c >= n_imp_ || u.d >= n_imp_)
        throw ParameterError("interaction index outside impurity orbitals");
      if (!finite(u.value)) throw ParameterError("interaction must be finite");
    }
  }

  std::size_t n_imp_, n_bath_;
  double mu_;
  std::vector<double> eps_imp_;
  std::vector<Interaction> interactions_;
  std::vector<double> eps_bath_;
  std::vector<std::vector<double>> hoppings_;
  std::optional<TwoSiteParams> two_site_;
};

// Assignment of spin orbitals to qubits. Orbital index o < n_imp is impurity
// orbital o; o >= n_imp is bath orbital o - n_imp. Jordan-Wigner strings run
// over lower qubit indices.
class QubitLayout {
 public:
  QubitLayout(std::size_t n_imp, std::size_t n_bath, std::vector<std::size_t> qubit_of)
      : n_imp_(n_imp), n_bath_(n_bath), qubit_of_(std::move(qubit_of)) {
    if (qubit_of_.size() != n_imp_ + n_bath_) throw DimensionError("layout size mismatch");
    std::vector<bool> seen(qubit_of_.size(), false);
    for (auto q : qubit_of_) {
      if (q >= qubit_of_.size() || seen[q]) throw ParameterError("layout is not a permutation");
      seen[q] = true;
    }
  }

  // Impurity orbitals first, then bath orbitals.
  static QubitLayout impurity_first(std::size_t n_imp, std::size_t n_bath) {
    std::vector<std::size_t> q(n_imp + n_bath);
    for (std::size_t o = 0; o < q.size(); ++o) q[o] = o;
    return QubitLayout(n_imp, n_bath, std::move(q));
  }

  // All spin-up orbitals (impurity then bath), then all spin-down orbitals.
  // For one impurity and one bath site: qubits 1..4 = imp up, bath up, imp down, bath down.
  static QubitLayout spin_blocked(std::size_t n_imp, std::size_t n_bath) {
    std::vector<std::size_t> q(n_imp + n_bath);
    std::size_t next = 0;
    for (int spin = 0; spin < 2; ++spin) {
      for (std::size_t a = spin; a < n_imp; a += 2) q[a] = next++;
      for (std::size_t i = spin; i < n_bath; i += 2) q[n_imp + i] = next++;
    }
    return QubitLayout(n_imp, n_bath, std::move(q));
  }

  static QubitLayout for_model(const ImpurityModel& m) { return impurity_first(m.n_imp(), m.n_bath()); }

  std::size_t n_qubits() const { return qubit_of_.size(); }
  std::size_t n_imp() const { return n_imp_; }
  std::size_t n_bath() const { return n_bath_; }
  std::size_t qubit(std::size_t orbital) const {
    if (orbital >= qubit_of_.size()) throw ParameterError("orbital " + std::to_string(orbital) + " out of range");
    return qubit_of_[orbital];
  }
  std::size_t impurity_qubit(std::size_t a) const { return qubit(a); }
  std::size_t bath_qubit(std::size_t i) const { return qubit(n_imp_ + i); }

  // +1 for spin up, -1 for spin down.
  int spin_of_qubit(std::size_t q) const {
    for (std::size_t o = 0; o < qubit_of_.size(); ++o)
      if (qubit_of_[o] == q) {
        std::size_t local = o < n_imp_ ? o : o - n_imp_;
        return local % 2 == 0 ? 1 : -1;
      }
    throw ParameterError("qubit out of range");
  }

 private:
  std::size_t n_imp_, n_bath_;
  std::vector<std::size_t> qubit_of_;
};

}  // namespace qdmft
