#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "qdmft/config.hpp"
#include "qdmft/ed_oracle.hpp"
#include "qdmft/greens.hpp"
#include "qdmft/hamiltonian.hpp"
#include "qdmft/rng.hpp"

namespace qdmft {

struct SuiteResult {
  std::string name;
  bool passed = true;
  double worst = 0.0;  // largest deviation seen
  double tolerance = 0.0;
  std::string failure;  // first failing draw
};

struct VerifyReport {
  std::vector<SuiteResult> suites;

  bool passed() const {
    return std::all_of(suites.begin(), suites.end(), [](const SuiteResult& s) { return s.passed; });
  }

  std::string to_text() const {
    std::string out;
    for (auto& s : suites) {
      out += s.passed ? "PASS " : "FAIL ";
      out += s.name + " max_dev=" + format_double(s.worst) + " tol=" + format_double(s.tolerance);
      if (!s.passed) out += " (" + s.failure + ")";
      out += '\n';
    }
    out += passed() ? "all suites passed\n" : "verification failed\n";
    return out;
  }
};

// Z-string with the qubit-0 factor dropped for q >= 1.
inline PauliSum faulty_ladder_on_qubit(std::size_t q, Ladder kind, std::size_t n) {
  PauliSum s = ladder_on_qubit(q, kind, n);
  if (q == 0) return s;
  std::string z0(n, 'I');
  z0[0] = 'Z';
  return PauliSum(PauliString(z0)) * s;
}

inline std::vector<TwoSiteParams> random_draws(std::size_t count, std::uint64_t seed) {
  CounterRng rng(seed, 0x76726679);
  std::vector<TwoSiteParams> out;
  auto in = [&](double lo, double hi) { return lo + (hi - lo) * rng.uniform(); };
  for (std::size_t k = 0; k < count; ++k) {
    TwoSiteParams p;
    p.U = in(0.0, 8.0);
    p.mu = in(-3.0, 5.0);
    p.eps2 = in(-2.0, 2.0);
    p.V = in(0.05, 2.0);
    out.push_back(p);
  }
  return out;
}

inline std::string describe(const TwoSiteParams& p) {
  return "U=" + format_double(p.U) + " mu=" + format_double(p.mu) + " eps2=" + format_double(p.eps2) +
         " V=" + format_double(p.V);
}

namespace detail {

inline void observe(SuiteResult& s, double dev, const std::string& where) {
  s.worst = std::max(s.worst, dev);
  if (!(dev <= s.tolerance) && s.passed) {
    s.passed = false;
    s.failure = where;
  }
}

inline std::vector<double> sorted_eigs(const Eigen::MatrixXcd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(m, Eigen::EigenvaluesOnly);
  std::vector<double> v(es.eigenvalues().data(), es.eigenvalues().data() + es.eigenvalues().size());
  std::sort(v.begin(), v.end());
  return v;
}

// Reduced-register levels belonging to `s`: the N=1,3 registers carry both
// S_z partners (doubly degenerate levels), constant sectors one level.
inline std::vector<double> reduced_levels(const Sector& s, const TwoSiteParams& p, std::size_t block_dim) {
  const PauliSum red = build_reduced_hamiltonian(s, p);
  if (is_constant_sector(s)) return std::vector<double>(block_dim, red.identity_coefficient());
  std::vector<double> e = sorted_eigs(dense_matrix(red));
  if (s.n_electrons == 2) return e;
  return {e[0], e[2]};
}

}  // namespace detail

// Oracle property suites over random 2-site parameter draws.
inline VerifyReport run_verification(const VerifySpec& spec) {
  const auto draws = random_draws(spec.draws, spec.seed);
  const LadderFactory factory = spec.inject_fault == Fault::zstring_sign ? LadderFactory(faulty_ladder_on_qubit)
                                                                         : LadderFactory(ladder_on_qubit);
  SuiteResult ladder{"ladder_identities", true, 0.0, 1e-12, ""};
  SuiteResult sectors{"reduced_sector_spectra", true, 0.0, 1e-12, ""};
  SuiteResult conserve{"commutators_N_Sz", true, 0.0, 0.0, ""};
  SuiteResult sum_rule{"weight_sum_rule", true, 0.0, 1e-8, ""};
  SuiteResult residuals{"regularized_residuals", true, 0.0, 1e-12, ""};

  const PauliSum n_op = number_operator(4), sz_op = two_site_spin_z_operator();
  for (std::size_t k = 0; k < draws.size(); ++k) {
    const TwoSiteParams& p = draws[k];
    const std::string where = "draw " + std::to_string(k) + ": " + describe(p);
    const ImpurityModel model = ImpurityModel::two_site(p);

    detail::observe(ladder, verify_ladder_identities(model, factory).max_deviation(), where);

    const PauliSum h = build_two_site_hamiltonian(p);
    const LabeledSpectrum spec_full = full_spectrum(h);
    for (auto& s : two_site_sectors()) {
      std::vector<double> dense = spec_full.sector_energies(s);
      std::sort(dense.begin(), dense.end());
      const auto reduced = detail::reduced_levels(s, p, dense.size());
      double dev = reduced.size() == dense.size() ? 0.0 : 1e300;
      for (std::size_t i = 0; i < std::min(dense.size(), reduced.size()); ++i)
        dev = std::max(dev, std::abs(dense[i] - reduced[i]));
      detail::observe(sectors, dev, where + " sector " + to_string(s));
    }

    const double c_terms = static_cast<double>(commutator(h, n_op).size() + commutator(h, sz_op).size());
    detail::observe(conserve, c_terms, where);

    try {
      const SpectralData exact = exact_spectral_data(model);
      detail::observe(sum_rule, std::abs(exact.weight_sum(0) - 1.0), where);

      // weights scaled by up to +-5% before restoring the constraints
      SpectralData noisy = exact;
      CounterRng rng(spec.seed, 0x6e6f6973 + k);
      for (auto* list : {&noisy.particle, &noisy.hole})
        for (auto& pole : *list) pole.lambda[0] *= 1.0 + 0.1 * (rng.uniform() - 0.5);
      const SpectralData fixed = regularize(noisy, model);
      detail::observe(residuals, constraint_residuals(fixed, model).max_abs(), where);
    } catch (const Error& e) {
      detail::observe(residuals, 1e300, where + ": " + e.what());
    }
  }
  return VerifyReport{{ladder, sectors, conserve, sum_rule, residuals}};
}

}  // namespace qdmft
