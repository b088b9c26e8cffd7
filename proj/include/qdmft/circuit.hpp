#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "qdmft/errors.hpp"

namespace qdmft {

enum class GateKind { RY, RX, RZ, CX, X, Y, Z, H, S, Sdg };

inline bool is_rotation(GateKind k) { return k == GateKind::RY || k == GateKind::RX || k == GateKind::RZ; }

inline const char* gate_name(GateKind k) {
  switch (k) {
    case GateKind::RY: return "RY";
    case GateKind::RX: return "RX";
    case GateKind::RZ: return "RZ";
    case GateKind::CX: return "CX";
    case GateKind::X: return "X";
    case GateKind::Y: return "Y";
    case GateKind::Z: return "Z";
    case GateKind::H: return "H";
    case GateKind::S: return "S";
    case GateKind::Sdg: return "Sdg";
  }
  return "?";
}

struct Gate {
  GateKind kind;
  std::size_t q0;
  std::size_t q1 = 0;  // target for CX; q0 is the control
  double angle = 0.0;
  std::optional<std::size_t> param;  // unbound parameter slot
};

using Mat2 = std::array<std::complex<double>, 4>;  // row major

// 2x2 unitary of a single-qubit gate (angle taken from the gate).
inline Mat2 single_qubit_matrix(const Gate& g) {
  using C = std::complex<double>;
  const double c = std::cos(g.angle / 2), s = std::sin(g.angle / 2);
  const double r = 1.0 / std::sqrt(2.0);
  switch (g.kind) {
    case GateKind::RY: return {C(c), C(-s), C(s), C(c)};
    case GateKind::RX: return {C(c), C(0, -s), C(0, -s), C(c)};
    case GateKind::RZ: return {C(c, -s), C(0), C(0), C(c, s)};
    case GateKind::X: return {C(0), C(1), C(1), C(0)};
    case GateKind::Y: return {C(0), C(0, -1), C(0, 1), C(0)};
    case GateKind::Z: return {C(1), C(0), C(0), C(-1)};
    case GateKind::H: return {C(r), C(r), C(r), C(-r)};
    case GateKind::S: return {C(1), C(0), C(0), C(0, 1)};
    case GateKind::Sdg: return {C(1), C(0), C(0), C(0, -1)};
    case GateKind::CX: break;
  }
  throw ParameterError("CX is not a single-qubit gate");
}

class Circuit {
 public:
  explicit Circuit(std::size_t n_qubits = 1) : n_(n_qubits) {
    if (n_ == 0 || n_ > 24) throw DimensionError("circuit qubit count out of range");
  }

  std::size_t n_qubits() const { return n_; }
  const std::vector<Gate>& gates() const { return gates_; }
  std::size_t n_params() const { return n_params_; }
  bool is_bound() const { return n_params_ == 0; }

  Circuit& add(Gate g) {
    if (g.q0 >= n_ || (g.kind == GateKind::CX && (g.q1 >= n_ || g.q1 == g.q0)))
      throw DimensionError(std::string("gate ") + gate_name(g.kind) + " qubit out of range");
    if (!std::isfinite(g.angle)) throw ParameterError("gate angle must be finite");
    if (g.param) {
      if (!is_rotation(g.kind)) throw ParameterError("only rotations take parameters");
      n_params_ = std::max(n_params_, *g.param + 1);
    }
    gates_.push_back(g);
    return *this;
  }

  Circuit& ry(std::size_t q, double a) { return add({GateKind::RY, q, 0, a, std::nullopt}); }
  Circuit& rx(std::size_t q, double a) { return add({GateKind::RX, q, 0, a, std::nullopt}); }
  Circuit& rz(std::size_t q, double a) { return add({GateKind::RZ, q, 0, a, std::nullopt}); }
  Circuit& ry_param(std::size_t q, std::size_t slot) { return add({GateKind::RY, q, 0, 0.0, slot}); }
  Circuit& cx(std::size_t c, std::size_t t) { return add({GateKind::CX, c, t, 0.0, std::nullopt}); }
  Circuit& x(std::size_t q) { return add({GateKind::X, q}); }
  Circuit& y(std::size_t q) { return add({GateKind::Y, q}); }
  Circuit& z(std::size_t q) { return add({GateKind::Z, q}); }
  Circuit& h(std::size_t q) { return add({GateKind::H, q}); }
  Circuit& s(std::size_t q) { return add({GateKind::S, q}); }
  Circuit& sdg(std::size_t q) { return add({GateKind::Sdg, q}); }

  Circuit& append(const Circuit& o) {
    if (o.n_ != n_) throw DimensionError("append: qubit counts differ");
    if (!o.is_bound()) throw EvaluationError("append: circuit has unbound parameters");
    for (auto& g : o.gates_) gates_.push_back(g);
    return *this;
  }

  Circuit bind(std::span<const double> params) const {
    if (params.size() != n_params_)
      throw DimensionError("bind: expected " + std::to_string(n_params_) + " parameters, got " +
                           std::to_string(params.size()));
    Circuit out(n_);
    for (auto g : gates_) {
      if (g.param) {
        if (!std::isfinite(params[*g.param])) throw ParameterError("bind: non-finite parameter");
        g.angle = params[*g.param];
        g.param.reset();
      }
      out.gates_.push_back(g);
    }
    return out;
  }

  Circuit inverse() const {
    if (!is_bound()) throw EvaluationError("inverse: circuit has unbound parameters");
    Circuit out(n_);
    for (auto it = gates_.rbegin(); it != gates_.rend(); ++it) {
      Gate g = *it;
      if (is_rotation(g.kind)) g.angle = -g.angle;
      else if (g.kind == GateKind::S) g.kind = GateKind::Sdg;
      else if (g.kind == GateKind::Sdg) g.kind = GateKind::S;
      out.gates_.push_back(g);
    }
    return out;
  }

 private:
  std::size_t n_;
  std::vector<Gate> gates_;
  std::size_t n_params_ = 0;
};

}  // namespace qdmft
