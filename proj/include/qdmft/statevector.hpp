#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "qdmft/circuit.hpp"
#include "qdmft/pauli.hpp"
#include "qdmft/rng.hpp"

namespace qdmft {

// Basis index b has qubit 1 as its most significant bit; bit value 0 is an
// empty orbital (Z = +1).
class Statevector {
 public:
  explicit Statevector(std::size_t n_qubits) : n_(n_qubits), amp_(std::size_t{1} << n_qubits) {
    if (n_ == 0 || n_ > 24) throw DimensionError("statevector qubit count out of range");
    amp_[0] = 1.0;
  }

  Statevector(std::size_t n_qubits, std::vector<cplx> amplitudes) : n_(n_qubits), amp_(std::move(amplitudes)) {
    if (amp_.size() != (std::size_t{1} << n_)) throw DimensionError("amplitude count must be 2^n");
    if (std::abs(norm() - 1.0) > 1e-10) throw ParameterError("statevector is not normalized");
  }

  static Statevector basis_state(std::size_t n, std::uint64_t index) {
    Statevector s(n);
    s.amp_[0] = 0.0;
    s.amp_.at(index) = 1.0;
    return s;
  }

  std::size_t n_qubits() const { return n_; }
  std::size_t dim() const { return amp_.size(); }
  const std::vector<cplx>& amplitudes() const { return amp_; }
  cplx operator[](std::size_t i) const { return amp_[i]; }

  double norm() const {
    double s = 0.0;
    for (auto& a : amp_) s += std::norm(a);
    return std::sqrt(s);
  }

  std::vector<double> probabilities() const {
    std::vector<double> p(amp_.size());
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = std::norm(amp_[i]);
    return p;
  }

  void apply(const Gate& g) {
    if (g.param) throw EvaluationError("gate has an unbound parameter slot");
    if (g.q0 >= n_ || (g.kind == GateKind::CX && g.q1 >= n_)) throw DimensionError("gate qubit out of range");
    if (g.kind == GateKind::CX) {
      const std::size_t cb = bit(g.q0), tb = bit(g.q1);
      for (std::size_t i = 0; i < amp_.size(); ++i)
        if ((i & cb) && !(i & tb)) std::swap(amp_[i], amp_[i | tb]);
      return;
    }
    const Mat2 m = single_qubit_matrix(g);
    const std::size_t b = bit(g.q0);
    for (std::size_t i = 0; i < amp_.size(); ++i) {
      if (i & b) continue;
      const cplx a0 = amp_[i], a1 = amp_[i | b];
      amp_[i] = m[0] * a0 + m[1] * a1;
      amp_[i | b] = m[2] * a0 + m[3] * a1;
    }
  }

  // P|psi> for a single Pauli string (phase included).
  Statevector apply_pauli(const PauliString& p) const {
    if (p.n_qubits() != n_) throw DimensionError("Pauli string size does not match state");
    const std::uint64_t xm = p.x_mask(), zm = p.z_mask();
    const cplx ph = p.phase() * phase_value(p.y_count());
    Statevector out(n_);
    for (std::size_t b = 0; b < amp_.size(); ++b) {
      const double sgn = (std::popcount(b & zm) & 1) ? -1.0 : 1.0;
      out.amp_[b ^ xm] = ph * sgn * amp_[b];
    }
    return out;
  }

  cplx inner(const Statevector& o) const {
    if (o.n_ != n_) throw DimensionError("inner: qubit counts differ");
    cplx s = 0.0;
    for (std::size_t i = 0; i < amp_.size(); ++i) s += std::conj(amp_[i]) * o.amp_[i];
    return s;
  }

 private:
  std::size_t bit(std::size_t q) const { return std::size_t{1} << (n_ - 1 - q); }

  std::size_t n_;
  std::vector<cplx> amp_;
};

inline Statevector run_circuit(const Circuit& c, std::optional<Statevector> initial = std::nullopt) {
  if (!c.is_bound()) throw EvaluationError("run_circuit: circuit has unbound parameters");
  Statevector s = initial ? std::move(*initial) : Statevector(c.n_qubits());
  if (s.n_qubits() != c.n_qubits()) throw DimensionError("run_circuit: initial state size mismatch");
  for (auto& g : c.gates()) s.apply(g);
  return s;
}

// <s|P|s> for one term; P acts as Z^z then X^x with phase i^(#Y).
inline cplx pauli_expectation(const Statevector& s, const std::string& axes) {
  PauliString p(axes);
  const std::uint64_t xm = p.x_mask(), zm = p.z_mask();
  const cplx ph = phase_value(p.y_count());
  cplx acc = 0.0;
  const auto& a = s.amplitudes();
  for (std::size_t b = 0; b < a.size(); ++b) {
    const double sgn = (std::popcount(b & zm) & 1) ? -1.0 : 1.0;
    acc += std::conj(a[b ^ xm]) * sgn * a[b];
  }
  return ph * acc;
}

inline double expectation_exact(const Statevector& s, const PauliSum& h) {
  if (s.n_qubits() != h.n_qubits()) throw DimensionError("expectation: operator and state sizes differ");
  cplx e = 0.0;
  for (auto& [axes, c] : h.terms()) e += c * pauli_expectation(s, axes);
  if (std::abs(e.imag()) >= 1e-8)
    throw EvaluationError("expectation has imaginary part " + format_double(e.imag()) + "; operator not Hermitian");
  return e.real();
}

// Readout confusion model M[observed, true]; factorized per qubit or dense.
class SpamModel {
 public:
  // Per-qubit (p0->1, p1->0) readout flip probabilities.
  static SpamModel factorized(std::vector<std::array<double, 2>> flips) {
    SpamModel m;
    m.n_ = flips.size();
    if (m.n_ == 0) throw DimensionError("SPAM model needs at least one qubit");
    for (auto& f : flips)
      for (double p : f)
        if (!(p >= 0.0 && p <= 1.0)) throw ParameterError("readout flip probability outside [0,1]");
    m.flips_ = std::move(flips);
    return m;
  }

  static SpamModel uniform(std::size_t n, double p01, double p10) {
    return factorized(std::vector<std::array<double, 2>>(n, {p01, p10}));
  }

  static SpamModel dense(const Eigen::MatrixXd& m) {
    if (m.rows() != m.cols()) throw DimensionError("confusion matrix must be square");
    std::size_t n = 0;
    while ((Eigen::Index{1} << n) < m.rows()) ++n;
    if ((Eigen::Index{1} << n) != m.rows() || n == 0) throw DimensionError("confusion matrix size must be 2^n");
    if (n > 6) throw DimensionError("dense confusion matrices are limited to 6 qubits");
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (std::abs(m.col(j).sum() - 1.0) > 1e-12) throw ParameterError("confusion matrix is not column-stochastic");
      for (Eigen::Index i = 0; i < m.rows(); ++i)
        if (m(i, j) < 0.0 || m(i, j) > 1.0) throw ParameterError("confusion matrix entry outside [0,1]");
    }
    SpamModel s;
    s.n_ = n;
    s.dense_ = m;
    return s;
  }

  std::size_t n_qubits() const { return n_; }
  bool is_factorized() const { return !dense_.has_value(); }

  Eigen::MatrixXd matrix() const {
    if (dense_) return *dense_;
    Eigen::MatrixXd m = Eigen::MatrixXd::Ones(1, 1);
    for (auto& f : flips_) {
      Eigen::Matrix2d q;
      q << 1 - f[0], f[1], f[0], 1 - f[1];
      Eigen::MatrixXd k(m.rows() * 2, m.cols() * 2);
      for (Eigen::Index i = 0; i < m.rows(); ++i)
        for (Eigen::Index j = 0; j < m.cols(); ++j) k.block(2 * i, 2 * j, 2, 2) = m(i, j) * q;
      m = k;
    }
    return m;
  }

  std::vector<double> apply(const std::vector<double>& dist) const {
    check(dist);
    double total = 0.0;
    for (double p : dist) total += p;
    if (std::abs(total - 1.0) > 1e-9) throw ParameterError("distribution does not sum to 1");
    if (dense_) return to_vec(*dense_ * Eigen::Map<const Eigen::VectorXd>(dist.data(), dist.size()));
    std::vector<Eigen::Matrix2d> ms;
    for (auto& f : flips_) {
      Eigen::Matrix2d q;
      q << 1 - f[0], f[1], f[0], 1 - f[1];
      ms.push_back(q);
    }
    return per_qubit(dist, ms);
  }

  // M^-1 dist, negative entries clipped, renormalized.
  std::vector<double> correct(const std::vector<double>& dist, bool allow_pseudo_inverse = true) const {
    check(dist);
    std::vector<double> out;
    if (dense_) {
      Eigen::Map<const Eigen::VectorXd> d(dist.data(), dist.size());
      Eigen::FullPivLU<Eigen::MatrixXd> lu(*dense_);
      if (lu.isInvertible()) {
        out = to_vec(lu.solve(d));
      } else {
        if (!allow_pseudo_inverse) throw NumericalError("confusion matrix is singular");
        out = to_vec(dense_->completeOrthogonalDecomposition().solve(d));
      }
    } else {
      std::vector<Eigen::Matrix2d> inv;
      for (auto& f : flips_) {
        Eigen::Matrix2d q;
        q << 1 - f[0], f[1], f[0], 1 - f[1];
        if (std::abs(q.determinant()) > 1e-12) {
          inv.push_back(q.inverse());
        } else {
          if (!allow_pseudo_inverse) throw NumericalError("per-qubit confusion matrix is singular");
          inv.push_back(q.completeOrthogonalDecomposition().pseudoInverse());
        }
      }
      out = per_qubit(dist, inv);
    }
    double total = 0.0;
    for (double& p : out) {
      p = std::max(p, 0.0);
      total += p;
    }
    if (!(total > 0.0)) throw NumericalError("corrected distribution vanished");
    for (double& p : out) p /= total;
    return out;
  }

 private:
  void check(const std::vector<double>& dist) const {
    if (dist.size() != (std::size_t{1} << n_)) throw DimensionError("distribution size does not match SPAM model");
  }

  static std::vector<double> to_vec(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

  std::vector<double> per_qubit(std::vector<double> d, const std::vector<Eigen::Matrix2d>& ms) const {
    for (std::size_t q = 0; q < n_; ++q) {
      const std::size_t b = std::size_t{1} << (n_ - 1 - q);
      const auto& m = ms[q];
      for (std::size_t i = 0; i < d.size(); ++i) {
        if (i & b) continue;
        const double d0 = d[i], d1 = d[i | b];
        d[i] = m(0, 0) * d0 + m(0, 1) * d1;
        d[i | b] = m(1, 0) * d0 + m(1, 1) * d1;
      }
    }
    return d;
  }

  std::size_t n_ = 0;
  std::vector<std::array<double, 2>> flips_;
  std::optional<Eigen::MatrixXd> dense_;
};

inline std::vector<double> apply_spam(const std::vector<double>& dist, const SpamModel& m) { return m.apply(dist); }
inline std::vector<double> spam_correct(const std::vector<double>& dist, const SpamModel& m,
                                        bool allow_pseudo_inverse = true) {
  return m.correct(dist, allow_pseudo_inverse);
}

// How expectation values and |0> probabilities are evaluated.
struct EvalMode {
  std::size_t shots = 0;  // 0 selects exact statevector evaluation
  std::uint64_t seed = 0;
  std::optional<SpamModel> readout;  // forward readout noise when sampling
  bool correct_readout = false;      // invert `readout` on the sampled histogram
  bool group_commuting = false;      // share shots among qubit-wise commuting terms

  static EvalMode exact() { return {}; }
  static EvalMode sampled(std::size_t shots, std::uint64_t seed) {
    if (shots < 1) throw ParameterError("shots must be at least 1");
    EvalMode m;
    m.shots = shots;
    m.seed = seed;
    return m;
  }
  bool is_exact() const { return shots == 0; }

  EvalMode with_seed(std::uint64_t s) const {
    EvalMode m = *this;
    m.seed = s;
    return m;
  }
};

// Histogram of `shots` draws from `probs`, drawn as a chain of conditional
// binomials (cost independent of the shot count).
inline std::vector<double> sample_frequencies(const std::vector<double>& probs, std::size_t shots, CounterRng& rng) {
  double rest = 0.0;
  for (double p : probs) rest += std::max(p, 0.0);
  std::vector<double> freq(probs.size(), 0.0);
  std::uint64_t left = shots;
  for (std::size_t i = 0; i < probs.size() && left > 0; ++i) {
    const double p = std::max(probs[i], 0.0);
    std::uint64_t k = left;
    if (i + 1 < probs.size() && p < rest) {
      std::binomial_distribution<std::uint64_t> bin(left, std::clamp(p / rest, 0.0, 1.0));
      k = bin(rng);
    }
    freq[i] = static_cast<double>(k) / static_cast<double>(shots);
    left -= k;
    rest -= p;
  }
  return freq;
}

namespace detail {

// Measured distribution of `s` in computational basis under `mode`
// (noisy readout applied and optionally corrected).
inline std::vector<double> measured_distribution(const Statevector& s, const EvalMode& mode, std::uint64_t stream) {
  std::vector<double> p = s.probabilities();
  if (mode.is_exact()) return p;
  if (mode.readout) p = mode.readout->apply(p);
  CounterRng rng(mode.seed, stream);
  std::vector<double> f = sample_frequencies(p, mode.shots, rng);
  if (mode.readout && mode.correct_readout) f = mode.readout->correct(f);
  return f;
}

// Rotates X/Y axes of `axes` onto Z: H for X, S-dagger then H for Y.
inline void rotate_to_z(Statevector& s, const std::string& axes) {
  for (std::size_t q = 0; q < axes.size(); ++q) {
    if (axes[q] == 'X') {
      s.apply({GateKind::H, q});
    } else if (axes[q] == 'Y') {
      s.apply({GateKind::Sdg, q});
      s.apply({GateKind::H, q});
    }
  }
}

inline std::uint64_t support_mask(const std::string& axes) {
  std::uint64_t m = 0;
  for (std::size_t q = 0; q < axes.size(); ++q)
    if (axes[q] != 'I') m |= std::uint64_t{1} << (axes.size() - 1 - q);
  return m;
}

inline double parity_mean(const std::vector<double>& dist, std::uint64_t mask) {
  double e = 0.0;
  for (std::size_t b = 0; b < dist.size(); ++b) e += ((std::popcount(b & mask) & 1) ? -dist[b] : dist[b]);
  return e;
}

inline bool qubitwise_compatible(const std::string& a, const std::string& b) {
  for (std::size_t q = 0; q < a.size(); ++q)
    if (a[q] != 'I' && b[q] != 'I' && a[q] != b[q]) return false;
  return true;
}

}  // namespace detail

// Shot-sampled <H>: each non-identity term (or qubit-wise commuting group)
// gets its own basis rotation, `shots` samples and RNG stream = its index in
// canonical order.
inline double expectation_sampled(const Circuit& c, const PauliSum& h, const EvalMode& mode) {
  if (mode.is_exact()) return expectation_exact(run_circuit(c), h);
  if (c.n_qubits() != h.n_qubits()) throw DimensionError("expectation: operator and circuit sizes differ");
  if (mode.readout && mode.readout->n_qubits() != c.n_qubits()) throw DimensionError("SPAM model size mismatch");
  const Statevector base = run_circuit(c);

  std::vector<std::pair<std::string, double>> terms;
  double value = 0.0;
  for (auto& [axes, coeff] : h.terms()) {
    if (std::abs(coeff.imag()) >= 1e-8) throw EvaluationError("sampled expectation needs real coefficients");
    if (axes.find_first_not_of('I') == std::string::npos)
      value += coeff.real();
    else
      terms.emplace_back(axes, coeff.real());
  }

  // Measurement groups: basis string plus member terms.
  std::vector<std::pair<std::string, std::vector<std::size_t>>> groups;
  for (std::size_t k = 0; k < terms.size(); ++k) {
    bool placed = false;
    if (mode.group_commuting) {
      for (auto& [basis, members] : groups) {
        if (detail::qubitwise_compatible(basis, terms[k].first)) {
          for (std::size_t q = 0; q < basis.size(); ++q)
            if (basis[q] == 'I') basis[q] = terms[k].first[q];
          members.push_back(k);
          placed = true;
          break;
        }
      }
    }
    if (!placed) groups.push_back({terms[k].first, {k}});
  }

  for (std::size_t g = 0; g < groups.size(); ++g) {
    Statevector s = base;
    detail::rotate_to_z(s, groups[g].first);
    const auto dist = detail::measured_distribution(s, mode, g);
    for (auto k : groups[g].second)
      value += terms[k].second * detail::parity_mean(dist, detail::support_mask(terms[k].first));
  }
  return value;
}

inline double expectation_sampled(const Circuit& c, const PauliSum& h, std::size_t shots, std::uint64_t seed) {
  return expectation_sampled(c, h, EvalMode::sampled(shots, seed));
}

// Expectation under either mode.
inline double expectation(const Circuit& c, const PauliSum& h, const EvalMode& mode) {
  return mode.is_exact() ? expectation_exact(run_circuit(c), h) : expectation_sampled(c, h, mode);
}

inline double zero_state_probability(const Circuit& c, const EvalMode& mode = EvalMode::exact()) {
  const Statevector s = run_circuit(c);
  if (mode.is_exact()) return std::norm(s[0]);
  if (mode.readout && mode.readout->n_qubits() != c.n_qubits()) throw DimensionError("SPAM model size mismatch");
  return detail::measured_distribution(s, mode, 0)[0];
}

}  // namespace qdmft
