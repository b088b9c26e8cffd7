#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "qdmft/ansatz.hpp"
#include "qdmft/ed_oracle.hpp"
#include "qdmft/hamiltonian.hpp"
#include "qdmft/rotosolve.hpp"
#include "qdmft/spectral_data.hpp"
#include "qdmft/statevector.hpp"

namespace qdmft {

struct VqeOptions {
  std::size_t restarts = 5;
  std::uint64_t seed = 0;  // initial angles and sampling streams
  RotosolveOptions rotosolve;
  EvalMode mode;
};

struct Eigenstate {
  Sector sector;
  int index = 0;
  double energy = 0.0;
  std::vector<double> params;
  Circuit circuit{1};
  AnsatzKind ansatz = AnsatzKind::PT4;
  bool flip = false;
  bool converged = true;
  double max_overlap = 0.0;
  std::string diagnostic;
};

// How an Eigenstate gets its (N, S_z) label: measured from operators on the
// full register, or fixed by the reduced register it lives on.
struct SectorLabeling {
  std::optional<Sector> fixed;
  std::optional<PauliSum> number;
  std::optional<PauliSum> spin;

  static SectorLabeling measured(PauliSum n, PauliSum sz) { return {std::nullopt, std::move(n), std::move(sz)}; }
  static SectorLabeling of(Sector s) { return {s, std::nullopt, std::nullopt}; }
  static SectorLabeling two_site() { return measured(number_operator(4), two_site_spin_z_operator()); }
};

namespace detail {

// Energy evaluations; every sampled call draws from its own derived stream.
class EnergyEvaluator {
 public:
  EnergyEvaluator(const PauliSum& h, const EvalMode& mode, std::uint64_t tag) : h_(h), mode_(mode), tag_(tag) {}

  double energy(const Circuit& c) {
    if (mode_.is_exact()) return expectation_exact(run_circuit(c), h_);
    return expectation_sampled(c, h_, mode_.with_seed(next_seed()));
  }

  double zero_probability(const Circuit& c) {
    if (mode_.is_exact()) return zero_state_probability(c);
    return zero_state_probability(c, mode_.with_seed(next_seed()));
  }

 private:
  std::uint64_t next_seed() { return derive_seed(mode_.seed, {tag_, counter_++}); }

  const PauliSum& h_;
  EvalMode mode_;
  std::uint64_t tag_;
  std::uint64_t counter_ = 0;
};

inline std::vector<double> random_angles(std::size_t n, std::uint64_t seed, std::uint64_t stream) {
  CounterRng rng(seed, stream);
  std::vector<double> t(n);
  for (auto& x : t) x = std::numbers::pi - 2 * std::numbers::pi * rng.uniform();  // (-pi, pi]
  return t;
}

inline void attach_label(Eigenstate& s, const SectorLabeling& lab) {
  if (lab.fixed) {
    s.sector = *lab.fixed;
    return;
  }
  if (!lab.number || !lab.spin) return;
  const Statevector psi = run_circuit(s.circuit);
  const double n = expectation_exact(psi, *lab.number), sz = expectation_exact(psi, *lab.spin);
  const double rn = std::round(n), rs = std::round(sz);
  if (std::abs(n - rn) > 0.1 || std::abs(sz - rs) > 0.1) {
    s.converged = false;
    s.diagnostic = "non-integral sector measurement <N>=" + format_double(n) + " <Sz>=" + format_double(sz);
    return;
  }
  try {
    s.sector = Sector(static_cast<int>(rn), static_cast<int>(rs));
  } catch (const ParameterError& e) {
    s.converged = false;
    s.diagnostic = e.what();
  }
}

inline Circuit overlap_circuit(const Circuit& candidate, const Circuit& prior) {
  Circuit c = candidate;
  c.append(prior.inverse());
  return c;
}

}  // namespace detail

// |<b|a>|^2 from the |0> probability of U_b^dagger U_a.
inline double overlap_probability(const Circuit& a, const Circuit& b, const EvalMode& mode = EvalMode::exact()) {
  return zero_state_probability(detail::overlap_circuit(a, b), mode);
}

// Overlap weight scale: twice the spectral span bound 2 * sum|c| (non-identity terms).
inline double default_overlap_weight(const PauliSum& h) { return 4.0 * h.one_norm(false); }

// Minimizes <H> + sum_k beta |<psi_k|psi>|^2 over the ansatz; with no prior
// states this is a ground-state search. Best of `restarts` Rotosolve runs.
inline Eigenstate find_excited_states(const PauliSum& h, AnsatzKind ansatz, bool flip,
                                      const std::vector<Eigenstate>& prior, double beta_overlap,
                                      const VqeOptions& opt, const SectorLabeling& labeling = {}) {
  if (ansatz_qubits(ansatz) != h.n_qubits()) throw DimensionError("ansatz and Hamiltonian sizes differ");
  if (beta_overlap < 0.0) throw ParameterError("overlap weight must be non-negative");
  for (auto& p : prior)
    if (p.circuit.n_qubits() != h.n_qubits()) throw DimensionError("prior state register size differs");
  if (opt.restarts == 0) throw ParameterError("restarts must be at least 1");

  const std::uint64_t tag = derive_seed(opt.seed, {prior.size()});
  detail::EnergyEvaluator ev(h, opt.mode, tag);
  const Circuit tmpl = ansatz_template(ansatz, flip);
  std::vector<Circuit> prior_inv;
  for (auto& p : prior) prior_inv.push_back(p.circuit.inverse());

  auto objective = [&](std::span<const double> t) {
    Circuit c = tmpl.bind(t);
    double f = ev.energy(c);
    if (beta_overlap > 0.0)
      for (auto& inv : prior_inv) {
        Circuit o = c;
        o.append(inv);
        f += beta_overlap * ev.zero_probability(o);
      }
    return f;
  };

  RotosolveResult best;
  bool have = false;
  for (std::size_t r = 0; r < opt.restarts; ++r) {
    auto res = rotosolve_minimize(objective, detail::random_angles(parameter_count(ansatz), tag, r), opt.rotosolve);
    if (!have || res.value < best.value) {
      best = std::move(res);
      have = true;
    }
  }

  Eigenstate s;
  s.ansatz = ansatz;
  s.flip = flip;
  s.params = best.theta;
  s.circuit = tmpl.bind(best.theta);
  s.energy = ev.energy(s.circuit);
  s.index = static_cast<int>(prior.size());
  for (auto& p : prior) s.max_overlap = std::max(s.max_overlap, overlap_probability(s.circuit, p.circuit));
  if (!prior.empty() && s.max_overlap > 0.01) {
    s.converged = false;
    s.diagnostic = "overlap with a lower state is " + format_double(s.max_overlap);
  }
  detail::attach_label(s, labeling);
  return s;
}

inline Eigenstate find_ground_state(const PauliSum& h, AnsatzKind ansatz, const VqeOptions& opt,
                                    const SectorLabeling& labeling = {}, bool flip = false) {
  return find_excited_states(h, ansatz, flip, {}, 0.0, opt, labeling);
}

enum class Representation { PT4, CR2 };

// |<excited| (prod_{p<alpha} Z_p) X_alpha |ground>|^2 as a |0> probability.
// On the reduced CR2 registers alpha must be the impurity spin-up orbital and
// spin-forbidden pairs return 0 without evaluation.
inline double transition_amplitude(const Eigenstate& ground, const Eigenstate& excited, std::size_t alpha,
                                   Representation rep, const EvalMode& mode = EvalMode::exact()) {
  const int dn = excited.sector.n_electrons - ground.sector.n_electrons;
  if (std::abs(dn) != 1)
    throw ParameterError("transition amplitude needs sectors differing by one electron, got " +
                         to_string(ground.sector) + " and " + to_string(excited.sector));
  double p = 0.0;
  if (rep == Representation::PT4) {
    const std::size_t n = ground.circuit.n_qubits();
    if (excited.circuit.n_qubits() != n || alpha >= n) throw DimensionError("PT4 transition: register mismatch");
    Circuit c = ground.circuit;
    for (std::size_t q = 0; q < alpha; ++q) c.z(q);
    c.x(alpha);
    c.append(excited.circuit.inverse());
    p = zero_state_probability(c, mode);
  } else {
    if (alpha != 0) throw ParameterError("CR2 transition amplitudes are defined for the impurity spin-up orbital");
    if (!(ground.sector == Sector(2, 0))) throw ParameterError("CR2 transition needs the (2,0) ground register");
    if (ground.circuit.n_qubits() != 2 || excited.circuit.n_qubits() != 2)
      throw DimensionError("CR2 transition: circuits must be 2-qubit");
    // adding a spin-up electron needs S_z=+1, removing one needs S_z=-1
    if (excited.sector.sz != dn) return 0.0;
    Circuit c = excited.circuit;
    c.x(0);
    c.append(ground.circuit.inverse());
    p = zero_state_probability(c, mode);
  }
  return std::clamp(p, 0.0, 1.0);
}

enum class Method { PT, CR };

inline const char* method_name(Method m) { return m == Method::PT ? "PT" : "CR"; }

struct SolveOptions {
  Method method = Method::CR;
  AnsatzKind pt_ansatz = AnsatzKind::PT4;
  EvalMode mode;
  std::size_t restarts = 5;
  std::uint64_t seed = 0;
  RotosolveOptions rotosolve;
  bool exploit_symmetry = true;  // mirror holes from particles at the ph point
  bool compute_weights = true;   // false: energies only, weights left at 0
  std::optional<double> penalty_weight;
  std::optional<double> overlap_weight;
};

struct SpectrumSolution {
  SpectralData spectral;
  Eigenstate ground;
  std::vector<Eigenstate> states;  // N0 +- 1 states in the order they were found
  bool converged = true;
  bool weights_computed = true;
  std::vector<std::string> diagnostics;
};

namespace detail {

inline VqeOptions sub_options(const SolveOptions& o, std::initializer_list<std::uint64_t> labels) {
  VqeOptions v;
  v.restarts = o.restarts;
  v.seed = derive_seed(o.seed, labels);
  v.rotosolve = o.rotosolve;
  v.mode = o.mode.is_exact() ? o.mode : o.mode.with_seed(derive_seed(o.mode.seed, labels));
  return v;
}

inline int sector_dimension(const Sector& s, int up_orbitals = 2, int down_orbitals = 2) {
  const int nu = (s.n_electrons + s.sz) / 2, nd = (s.n_electrons - s.sz) / 2;
  auto choose = [](int n, int k) {
    if (k < 0 || k > n) return 0;
    int r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
  };
  return choose(up_orbitals, nu) * choose(down_orbitals, nd);
}

inline void note(SpectrumSolution& sol, const Eigenstate& s, const std::string& what) {
  if (!s.converged) {
    sol.converged = false;
    sol.diagnostics.push_back(what + ": " + s.diagnostic);
  }
}

// Assigns per-N indices: energy order, degenerate states by descending S_z.
inline void index_states(std::vector<Eigenstate*>& v) {
  std::stable_sort(v.begin(), v.end(), [](const Eigenstate* a, const Eigenstate* b) { return a->energy < b->energy; });
  std::size_t i = 0;
  while (i < v.size()) {
    std::size_t j = i + 1;
    while (j < v.size() && v[j]->energy - v[j - 1]->energy < 1e-6) ++j;
    std::stable_sort(v.begin() + i, v.begin() + j,
                     [](const Eigenstate* a, const Eigenstate* b) { return a->sector.sz > b->sector.sz; });
    i = j;
  }
  for (std::size_t k = 0; k < v.size(); ++k) v[k]->index = static_cast<int>(k);
}

inline void mirror_holes(SpectralData& sd) {
  sd.hole.clear();
  for (auto& p : sd.particle) {
    Pole h = p;
    h.omega = -p.omega;
    h.sector = Sector(2 * sd.n0 - p.sector.n_electrons, -p.sector.sz);
    sd.hole.push_back(h);
  }
  // re-index the mirrored states: ascending E_{N0-1} = e0 - omega, ties by descending S_z
  std::stable_sort(sd.hole.begin(), sd.hole.end(), [](const Pole& a, const Pole& b) { return a.omega > b.omega; });
  std::size_t i = 0;
  while (i < sd.hole.size()) {
    std::size_t j = i + 1;
    while (j < sd.hole.size() && sd.hole[j - 1].omega - sd.hole[j].omega < 1e-6) ++j;
    std::stable_sort(sd.hole.begin() + i, sd.hole.begin() + j,
                     [](const Pole& a, const Pole& b) { return a.sector.sz > b.sector.sz; });
    i = j;
  }
  for (std::size_t k = 0; k < sd.hole.size(); ++k) sd.hole[k].index = static_cast<int>(k);
}

inline void fill_poles(SpectrumSolution& sol, bool mirrored) {
  SpectralData& sd = sol.spectral;
  sd.particle.clear();
  sd.hole.clear();
  std::vector<Eigenstate*> up, down;
  for (auto& s : sol.states) (s.sector.n_electrons > sd.n0 ? up : down).push_back(&s);
  index_states(up);
  index_states(down);
  for (auto* s : up) sd.particle.push_back({s->energy - sd.e0, {0.0}, s->sector, s->index});
  for (auto* s : down) sd.hole.push_back({sd.e0 - s->energy, {0.0}, s->sector, s->index});
  if (mirrored) mirror_holes(sd);
}

}  // namespace detail

// Penalty-term path on the 4-qubit register.
inline SpectrumSolution solve_spectrum_pt(const TwoSiteParams& p, const SolveOptions& o) {
  const PauliSum h = build_two_site_hamiltonian(p);
  const QubitLayout layout = QubitLayout::spin_blocked(2, 2);
  const SectorLabeling lab = SectorLabeling::two_site();
  const double beta = o.penalty_weight.value_or(default_penalty_weight(h));
  const bool mirror = o.exploit_symmetry && p.particle_hole_symmetric();

  SpectrumSolution sol;
  sol.ground = find_ground_state(h, o.pt_ansatz, detail::sub_options(o, {1}), lab);
  detail::note(sol, sol.ground, "ground state");
  sol.spectral.n0 = sol.ground.sector.n_electrons;
  sol.spectral.e0 = sol.ground.energy;

  const Sector g = sol.ground.sector;
  for (int dn : {+1, -1}) {
    if (dn < 0 && mirror) continue;
    const int nt = g.n_electrons + dn;
    if (nt < 0 || nt > 4) continue;
    for (int dsz : {+1, -1}) {
      const int szt = g.sz + dsz;
      if (std::abs(szt) > std::min(nt, 4 - nt)) continue;
      const Sector target(nt, szt);
      const PauliSum ht = add_sector_penalty(h, beta, target, layout);
      const double bo = o.overlap_weight.value_or(default_overlap_weight(ht));
      std::vector<Eigenstate> found;
      const int dim = detail::sector_dimension(target);
      for (int k = 0; k < dim; ++k) {
        const auto key = {std::uint64_t{2}, std::uint64_t(nt), std::uint64_t(szt + 4), std::uint64_t(k)};
        Eigenstate s = find_excited_states(ht, o.pt_ansatz, false, found, bo, detail::sub_options(o, key), lab);
        if (s.converged && !(s.sector == target)) {
          s.converged = false;
          s.diagnostic = "landed in sector " + to_string(s.sector) + " instead of " + to_string(target);
        }
        detail::note(sol, s, "sector " + to_string(target) + " state " + std::to_string(k));
        found.push_back(s);
      }
      for (auto& s : found) {
        // report <H> without the penalty terms
        auto vo = detail::sub_options(o, {4, std::uint64_t(nt), std::uint64_t(szt + 4), std::uint64_t(s.index)});
        s.energy = detail::EnergyEvaluator(h, vo.mode, 0).energy(s.circuit);
        sol.states.push_back(s);
      }
    }
  }
  detail::fill_poles(sol, false);
  sol.weights_computed = o.compute_weights;
  if (o.compute_weights) {
    auto weight = [&](Pole& pole) {
      for (auto& s : sol.states)
        if (s.sector == pole.sector && s.index == pole.index) {
          auto vo = detail::sub_options(o, {3, std::uint64_t(s.sector.n_electrons), std::uint64_t(s.index)});
          pole.lambda[0] = transition_amplitude(sol.ground, s, 0, Representation::PT4, vo.mode);
        }
    };
    for (auto& pole : sol.spectral.particle) weight(pole);
    for (auto& pole : sol.spectral.hole) weight(pole);
  }
  if (mirror) detail::mirror_holes(sol.spectral);
  sol.spectral.sort_poles();
  return sol;
}

// Circuit-reduction path: every sector on its own 2-qubit register.
inline SpectrumSolution solve_spectrum_cr(const TwoSiteParams& p, const SolveOptions& o) {
  const bool mirror = o.exploit_symmetry && p.particle_hole_symmetric();
  SpectrumSolution sol;

  // (2,0) ground on CR2_N2
  const PauliSum h20 = build_reduced_hamiltonian(Sector(2, 0), p);
  sol.ground = find_ground_state(h20, AnsatzKind::CR2_N2, detail::sub_options(o, {11}), SectorLabeling::of({2, 0}));
  detail::note(sol, sol.ground, "sector (2,0) ground state");

  // N = 1, 3: two levels per S_z; the S_z = +1 partner is the flipped circuit
  // at the same angles (the reduced Hamiltonian ignores reduced qubit 1).
  std::vector<Eigenstate> levels[2];
  for (int which = 0; which < 2; ++which) {
    const int n = which == 0 ? 3 : 1;
    if (n == 1 && mirror) continue;
    const PauliSum hr = build_reduced_hamiltonian(Sector(n, 1), p);
    const double bo = o.overlap_weight.value_or(default_overlap_weight(hr));
    for (int k = 0; k < 2; ++k) {
      auto vo = detail::sub_options(o, {12, std::uint64_t(n), std::uint64_t(k)});
      Eigenstate s = find_excited_states(hr, AnsatzKind::CR2_N13, true, levels[which], bo, vo, SectorLabeling::of({n, 1}));
      detail::note(sol, s, "sector (" + std::to_string(n) + ",+1) level " + std::to_string(k));
      levels[which].push_back(s);
    }
    for (auto& s : levels[which]) {
      sol.states.push_back(s);
      Eigenstate partner = s;
      partner.flip = false;
      partner.sector = Sector(n, -1);
      partner.circuit = build_ansatz(AnsatzKind::CR2_N13, partner.params, false);
      sol.states.push_back(partner);
    }
  }

  // The ground state must be the (2,0) singlet for the reduced weight circuits.
  double lowest = sol.ground.energy;
  Sector lowest_sector(2, 0);
  for (const Sector& s : two_site_sectors())
    if (is_constant_sector(s)) {
      const double e = build_reduced_hamiltonian(s, p).identity_coefficient();
      if (e < lowest) lowest = e, lowest_sector = s;
    }
  for (auto& s : sol.states)
    if (s.energy < lowest) lowest = s.energy, lowest_sector = s.sector;
  if (!(lowest_sector == Sector(2, 0)))
    throw EvaluationError("circuit-reduction path needs a (2,0) ground state; lowest is sector " +
                          to_string(lowest_sector));

  sol.spectral.n0 = 2;
  sol.spectral.e0 = sol.ground.energy;
  detail::fill_poles(sol, false);
  sol.weights_computed = o.compute_weights;
  if (o.compute_weights) {
    auto weight = [&](Pole& pole) {
      for (auto& s : sol.states)
        if (s.sector == pole.sector && s.index == pole.index) {
          auto vo = detail::sub_options(o, {13, std::uint64_t(s.sector.n_electrons), std::uint64_t(s.index)});
          pole.lambda[0] = transition_amplitude(sol.ground, s, 0, Representation::CR2, vo.mode);
        }
    };
    for (auto& pole : sol.spectral.particle) weight(pole);
    for (auto& pole : sol.spectral.hole) weight(pole);
  }
  if (mirror) detail::mirror_holes(sol.spectral);
  sol.spectral.sort_poles();
  return sol;
}

// Re-evaluates energies and weights of an existing solution at its optimal
// angles under `mode` (typically a finite shot count).
inline SpectralData evaluate_at_angles(const SpectrumSolution& sol, const TwoSiteParams& p, Method method,
                                       const EvalMode& mode) {
  const PauliSum full = build_two_site_hamiltonian(p);
  auto hamiltonian_of = [&](const Eigenstate& s) {
    return method == Method::CR ? build_reduced_hamiltonian(s.sector, p) : full;
  };
  auto sub = [&](std::initializer_list<std::uint64_t> labels) {
    return mode.is_exact() ? mode : mode.with_seed(derive_seed(mode.seed, labels));
  };
  const Representation rep = method == Method::CR ? Representation::CR2 : Representation::PT4;

  SpectralData out = sol.spectral;
  out.e0 = detail::EnergyEvaluator(hamiltonian_of(sol.ground), sub({21}), 0).energy(sol.ground.circuit);
  bool has_holes = false;
  for (auto& s : sol.states) has_holes = has_holes || s.sector.n_electrons < out.n0;
  for (auto* list : {&out.particle, &out.hole}) {
    for (auto& pole : *list) {
      const Eigenstate* st = nullptr;
      for (auto& s : sol.states)
        if (s.sector == pole.sector && s.index == pole.index) st = &s;
      if (!st) continue;
      const auto key = std::uint64_t(st->sector.n_electrons * 16 + st->sector.sz + 4) * 64 + std::uint64_t(st->index);
      const double e = detail::EnergyEvaluator(hamiltonian_of(*st), sub({22, key}), 0).energy(st->circuit);
      pole.omega = list == &out.particle ? e - out.e0 : out.e0 - e;
      if (sol.weights_computed) pole.lambda[0] = transition_amplitude(sol.ground, *st, 0, rep, sub({23, key}));
    }
  }
  if (!has_holes) {
    // keep the labels of the solve: each mirrored hole follows its particle partner
    for (std::size_t h = 0; h < out.hole.size(); ++h) {
      const Pole& orig = sol.spectral.hole[h];
      for (std::size_t k = 0; k < sol.spectral.particle.size(); ++k) {
        const Pole& pp = sol.spectral.particle[k];
        if (pp.sector.n_electrons == 2 * out.n0 - orig.sector.n_electrons && pp.sector.sz == -orig.sector.sz &&
            pp.omega == -orig.omega && pp.lambda == orig.lambda) {
          out.hole[h].omega = -out.particle[k].omega;
          out.hole[h].lambda = out.particle[k].lambda;
          break;
        }
      }
    }
  }
  out.sort_poles();
  return out;
}

// Ground state, N0 +- 1 spectra and weights of the impurity spin-up orbital
// for the 2-site model.
inline SpectrumSolution solve_spectrum(const ImpurityModel& model, const SolveOptions& o) {
  const TwoSiteParams& p = model.require_two_site();
  return o.method == Method::PT ? solve_spectrum_pt(p, o) : solve_spectrum_cr(p, o);
}

}  // namespace qdmft
