#pragma once

#include <numbers>
#include <span>
#include <string>

#include "qdmft/circuit.hpp"
#include "qdmft/errors.hpp"

namespace qdmft {

// PT4: RY layer, CX chain 1->2->3->4, RY layer (8 angles).
// PT4X: PT4 with an extra RY on qubit 3 between CX(2->3) and CX(3->4) (9th angle).
// CR2_N2: RY x RY, CX(1->2), RY x RY (4 angles).
// CR2_N13: one RY on reduced qubit 2.
// `flip` prepends RY(pi) on qubit 1, selecting the degenerate S_z partner on
// the reduced N=1,3 registers.
enum class AnsatzKind { PT4, PT4X, CR2_N2, CR2_N13 };

inline const char* ansatz_name(AnsatzKind k) {
  switch (k) {
    case AnsatzKind::PT4: return "PT4";
    case AnsatzKind::PT4X: return "PT4X";
    case AnsatzKind::CR2_N2: return "CR2_N2";
    case AnsatzKind::CR2_N13: return "CR2_N13";
  }
  return "?";
}

inline AnsatzKind parse_ansatz(const std::string& s) {
  if (s == "PT4") return AnsatzKind::PT4;
  if (s == "PT4X") return AnsatzKind::PT4X;
  if (s == "CR2_N2") return AnsatzKind::CR2_N2;
  if (s == "CR2_N13") return AnsatzKind::CR2_N13;
  throw ParameterError("unknown ansatz '" + s + "'");
}

inline std::size_t parameter_count(AnsatzKind k) {
  switch (k) {
    case AnsatzKind::PT4: return 8;
    case AnsatzKind::PT4X: return 9;
    case AnsatzKind::CR2_N2: return 4;
    case AnsatzKind::CR2_N13: return 1;
  }
  return 0;
}

inline std::size_t ansatz_qubits(AnsatzKind k) {
  return (k == AnsatzKind::PT4 || k == AnsatzKind::PT4X) ? 4 : 2;
}

// Parametric circuit with one slot per angle.
inline Circuit ansatz_template(AnsatzKind k, bool flip = false) {
  Circuit c(ansatz_qubits(k));
  if (flip) c.ry(0, std::numbers::pi);
  switch (k) {
    case AnsatzKind::PT4:
    case AnsatzKind::PT4X:
      for (std::size_t q = 0; q < 4; ++q) c.ry_param(q, q);
      c.cx(0, 1).cx(1, 2);
      if (k == AnsatzKind::PT4X) c.ry_param(2, 8);
      c.cx(2, 3);
      for (std::size_t q = 0; q < 4; ++q) c.ry_param(q, 4 + q);
      break;
    case AnsatzKind::CR2_N2:
      c.ry_param(0, 0).ry_param(1, 1).cx(0, 1).ry_param(0, 2).ry_param(1, 3);
      break;
    case AnsatzKind::CR2_N13:
      c.ry_param(1, 0);
      break;
  }
  return c;
}

inline Circuit build_ansatz(AnsatzKind k, std::span<const double> params, bool flip = false) {
  if (params.size() != parameter_count(k))
    throw DimensionError(std::string(ansatz_name(k)) + " takes " + std::to_string(parameter_count(k)) +
                         " parameters, got " + std::to_string(params.size()));
  return ansatz_template(k, flip).bind(params);
}

}  // namespace qdmft
