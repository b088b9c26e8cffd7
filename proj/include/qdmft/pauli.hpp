#pragma once

#include <complex>
#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "qdmft/errors.hpp"
#include "qdmft/format.hpp"

namespace qdmft {

using cplx = std::complex<double>;

inline constexpr double kPruneThreshold = 1e-14;

// Phase i^k, k in {0,1,2,3}.
inline cplx phase_value(int k) {
  switch (((k % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

inline bool is_pauli_axis(char c) { return c == 'I' || c == 'X' || c == 'Y' || c == 'Z'; }

// Tensor product of single-qubit Paulis with a unit phase.
// axes[0] is qubit 1 (most significant in basis indices and in ordering).
class PauliString {
 public:
  PauliString() = default;

  explicit PauliString(std::string axes, int phase = 0) : axes_(std::move(axes)), phase_(((phase % 4) + 4) % 4) {
    if (axes_.empty()) throw DimensionError("PauliString needs at least one qubit");
    for (char c : axes_)
      if (!is_pauli_axis(c)) throw ParameterError(std::string("invalid Pauli axis '") + c + "'");
  }

  static PauliString identity(std::size_t n) { return PauliString(std::string(n, 'I')); }

  // Single axis on qubit q, identity elsewhere.
  static PauliString single(std::size_t n, std::size_t q, char axis) {
    if (q >= n) throw DimensionError("qubit index out of range");
    std::string s(n, 'I');
    s[q] = axis;
    return PauliString(std::move(s));
  }

  std::size_t n_qubits() const { return axes_.size(); }
  const std::string& axes() const { return axes_; }
  char axis(std::size_t q) const { return axes_.at(q); }
  int phase_power() const { return phase_; }
  cplx phase() const { return phase_value(phase_); }

  bool is_identity() const { return axes_.find_first_not_of('I') == std::string::npos; }

  // Bit masks over basis indices: qubit q maps to bit (n-1-q).
  std::uint64_t x_mask() const {
    std::uint64_t m = 0;
    for (std::size_t q = 0; q < axes_.size(); ++q)
      if (axes_[q] == 'X' || axes_[q] == 'Y') m |= bit(q);
    return m;
  }
  std::uint64_t z_mask() const {
    std::uint64_t m = 0;
    for (std::size_t q = 0; q < axes_.size(); ++q)
      if (axes_[q] == 'Z' || axes_[q] == 'Y') m |= bit(q);
    return m;
  }
  int y_count() const {
    int c = 0;
    for (char a : axes_) c += (a == 'Y');
    return c;
  }

  bool operator==(const PauliString& o) const { return axes_ == o.axes_ && phase_ == o.phase_; }

 private:
  std::uint64_t bit(std::size_t q) const { return std::uint64_t{1} << (axes_.size() - 1 - q); }

  std::string axes_;
  int phase_ = 0;
};

namespace detail {

// Single-qubit product a*b = i^k c.
inline std::pair<char, int> multiply_axis(char a, char b) {
  if (a == 'I') return {b, 0};
  if (b == 'I') return {a, 0};
  if (a == b) return {'I', 0};
  auto idx = [](char c) { return c == 'X' ? 0 : (c == 'Y' ? 1 : 2); };
  int ia = idx(a), ib = idx(b);
  char c = "XYZ"[3 - ia - ib];
  // cyclic XY, YZ, ZX give +i
  int k = ((ib - ia + 3) % 3 == 1) ? 1 : 3;
  return {c, k};
}

}  // namespace detail

inline PauliString multiply(const PauliString& a, const PauliString& b) {
  if (a.n_qubits() != b.n_qubits())
    throw DimensionError("multiply: qubit counts differ (" + std::to_string(a.n_qubits()) + " vs " +
                         std::to_string(b.n_qubits()) + ")");
  std::string out(a.n_qubits(), 'I');
  int k = a.phase_power() + b.phase_power();
  for (std::size_t q = 0; q < out.size(); ++q) {
    auto [c, kk] = detail::multiply_axis(a.axes()[q], b.axes()[q]);
    out[q] = c;
    k += kk;
  }
  return PauliString(std::move(out), k);
}

inline PauliString operator*(const PauliString& a, const PauliString& b) { return multiply(a, b); }

inline bool commutes(const PauliString& a, const PauliString& b) {
  if (a.n_qubits() != b.n_qubits()) throw DimensionError("commutes: qubit counts differ");
  int anti = 0;
  for (std::size_t q = 0; q < a.n_qubits(); ++q) {
    char x = a.axes()[q], y = b.axes()[q];
    if (x != 'I' && y != 'I' && x != y) ++anti;
  }
  return anti % 2 == 0;
}

// Linear combination of Pauli strings, phases folded into coefficients.
// Terms are kept in lexicographic axis order (I < X < Y < Z, qubit 1 first).
class PauliSum {
 public:
  using Terms = std::map<std::string, cplx>;

  explicit PauliSum(std::size_t n_qubits = 1) : n_(n_qubits) {
    if (n_ == 0) throw DimensionError("PauliSum needs at least one qubit");
  }

  PauliSum(const PauliString& p, cplx coeff = 1.0) : n_(p.n_qubits()) { add(p, coeff); }

  static PauliSum constant(std::size_t n, double c) {
    PauliSum s(n);
    s.add(PauliString::identity(n), c);
    return s;
  }

  // Parses "0.25 ZIZI" per line; blank lines and '#' comments are skipped.
  static PauliSum parse(std::istream& in) {
    std::string line;
    std::size_t n = 0;
    std::vector<std::pair<double, std::string>> rows;
    while (std::getline(in, line)) {
      auto hash = line.find('#');
      if (hash != std::string::npos) line.erase(hash);
      std::istringstream ls(line);
      std::string c, axes, extra;
      if (!(ls >> c)) continue;
      if (!(ls >> axes) || (ls >> extra)) throw ParameterError("malformed Pauli term line: '" + line + "'");
      if (n == 0) n = axes.size();
      if (axes.size() != n) throw DimensionError("inconsistent Pauli string lengths");
      rows.emplace_back(parse_double(c), axes);
    }
    if (n == 0) throw ParameterError("empty Pauli sum text");
    PauliSum s(n);
    for (auto& [c, axes] : rows) s.add(PauliString(axes), c);
    return s;
  }

  static PauliSum parse(const std::string& text) {
    std::istringstream in(text);
    return parse(in);
  }

  std::size_t n_qubits() const { return n_; }
  const Terms& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  cplx coefficient(const std::string& axes) const {
    auto it = terms_.find(axes);
    return it == terms_.end() ? cplx{} : it->second;
  }

  double identity_coefficient() const { return coefficient(std::string(n_, 'I')).real(); }

  PauliSum& add(const PauliString& p, cplx coeff) {
    if (p.n_qubits() != n_) throw DimensionError("PauliSum::add: qubit count mismatch");
    cplx c = coeff * p.phase();
    auto [it, inserted] = terms_.try_emplace(p.axes(), c);
    if (!inserted) it->second += c;
    if (std::abs(it->second) < kPruneThreshold) terms_.erase(it);
    return *this;
  }

  PauliSum& operator+=(const PauliSum& o) {
    check(o);
    for (auto& [axes, c] : o.terms_) add(PauliString(axes), c);
    return *this;
  }
  PauliSum& operator-=(const PauliSum& o) {
    check(o);
    for (auto& [axes, c] : o.terms_) add(PauliString(axes), -c);
    return *this;
  }
  PauliSum& operator*=(cplx s) {
    for (auto it = terms_.begin(); it != terms_.end();) {
      it->second *= s;
      if (std::abs(it->second) < kPruneThreshold)
        it = terms_.erase(it);
      else
        ++it;
    }
    return *this;
  }

  friend PauliSum operator+(PauliSum a, const PauliSum& b) { return a += b; }
  friend PauliSum operator-(PauliSum a, const PauliSum& b) { return a -= b; }
  friend PauliSum operator*(PauliSum a, cplx s) { return a *= s; }
  friend PauliSum operator*(cplx s, PauliSum a) { return a *= s; }

  friend PauliSum operator*(const PauliSum& a, const PauliSum& b) {
    a.check(b);
    PauliSum out(a.n_);
    for (auto& [xa, ca] : a.terms_)
      for (auto& [xb, cb] : b.terms_) out.add(multiply(PauliString(xa), PauliString(xb)), ca * cb);
    return out;
  }

  PauliSum adjoint() const {
    PauliSum out(n_);
    for (auto& [axes, c] : terms_) out.terms_.emplace(axes, std::conj(c));
    return out;
  }

  bool is_hermitian(double tol = 1e-12) const {
    for (auto& [axes, c] : terms_)
      if (std::abs(c.imag()) > tol) return false;
    return true;
  }

  // Sum of |c| over all terms.
  double one_norm(bool include_identity = true) const {
    double s = 0.0;
    for (auto& [axes, c] : terms_)
      if (include_identity || axes.find_first_not_of('I') != std::string::npos) s += std::abs(c);
    return s;
  }

  // Text form, one "coeff axes" line per term; requires real coefficients.
  std::string to_text() const {
    std::string out;
    for (auto& [axes, c] : terms_) {
      if (c.imag() != 0.0) throw ParameterError("to_text: complex coefficient on " + axes);
      out += format_double(c.real());
      out += ' ';
      out += axes;
      out += '\n';
    }
    return out;
  }

  bool operator==(const PauliSum& o) const { return n_ == o.n_ && terms_ == o.terms_; }

 private:
  void check(const PauliSum& o) const {
    if (o.n_ != n_)
      throw DimensionError("PauliSum qubit counts differ (" + std::to_string(n_) + " vs " + std::to_string(o.n_) + ")");
  }

  std::size_t n_;
  Terms terms_;
};

inline PauliSum commutator(const PauliSum& a, const PauliSum& b) { return a * b - b * a; }
inline PauliSum anticommutator(const PauliSum& a, const PauliSum& b) { return a * b + b * a; }

inline std::ostream& operator<<(std::ostream& os, const PauliSum& s) { return os << s.to_text(); }

}  // namespace qdmft
