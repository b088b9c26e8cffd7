#pragma once

#include <cmath>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "qdmft/greens.hpp"
#include "qdmft/vqe.hpp"

namespace qdmft {

struct DmftConfig {
  double U = 4.0;
  double mu = 2.0;            // ignored when ph_symmetric
  bool ph_symmetric = true;   // mu = U/2, eps2 = 0
  double V0 = 1.0;
  double eps2_0 = 0.0;
  double eta = 0.01;          // |V - sqrt z|
  double occ_tol = 1e-4;      // |n_imp - n_lat|, general loop only
  std::size_t max_iters = 50;
  double alpha = 1.0;         // V <- (1 - alpha) V + alpha sqrt z
  double eps2_damping = 1.0;  // scales each secant step on eps2
  bool regularize = true;
  std::size_t average_window = 3;  // residual moving average in shots mode
  double delta = 0.05;
  SolveOptions solver;

  double chemical_potential() const { return ph_symmetric ? U / 2 : mu; }

  void validate() const {
    if (!(eta > 0.0)) throw ParameterError("eta must be positive");
    if (!(occ_tol > 0.0)) throw ParameterError("occ_tol must be positive");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw ParameterError("alpha must lie in (0,1]");
    if (!(eps2_damping > 0.0 && eps2_damping <= 1.0)) throw ParameterError("eps2_damping must lie in (0,1]");
    if (!(V0 > 0.0) || !std::isfinite(V0)) throw ParameterError("initial V must be positive");
    if (!std::isfinite(U) || !std::isfinite(mu) || !std::isfinite(eps2_0)) throw ParameterError("model parameters must be finite");
    if (max_iters == 0) throw ParameterError("max_iters must be at least 1");
    if (average_window == 0) throw ParameterError("average_window must be at least 1");
    if (!(delta > 0.0)) throw ParameterError("delta must be positive");
  }
};

struct DmftIteration {
  std::size_t iter = 0;
  double V = 0.0;  // bath coupling used in this iteration
  double eps2 = 0.0;
  double z = 0.0;
  double n_imp = 0.0;
  double n_lat = 0.0;
  double e0 = 0.0;
  double e30 = 0.0;
  double e32 = 0.0;
  double lambda = 0.0;  // weight of the lowest N0+1 state
  double residual = 0.0;  // |V - sqrt z|
};

struct DmftResult {
  bool converged = false;
  std::vector<DmftIteration> iterations;
  double V = 0.0;  // after the last update
  double eps2 = 0.0;
  double z = 0.0;
  TwoSiteParams final_params;  // parameters of the last impurity solve
  SpectralData spectral;       // of the last impurity solve
  std::vector<std::string> diagnostics;
};

namespace detail {

struct PointEvaluation {
  TwoSiteParams params;
  SpectralData spectral;
  QuasiparticleWeight q;
  Occupations occ;
  std::vector<SigmaPole> bath_poles;
  std::vector<std::string> notes;
};

inline double pole_energy(const SpectralData& sd, int index) {
  for (auto& p : sd.particle)
    if (p.index == index) return sd.e0 + p.omega;
  return std::numeric_limits<double>::quiet_NaN();
}

inline double lowest_particle_weight(const SpectralData& sd) {
  for (auto& p : sd.particle)
    if (p.index == 0) return p.lambda.at(0);
  return 0.0;
}

// One impurity solve at (V, eps2) and all derived quantities. `label`
// selects the random streams.
inline PointEvaluation evaluate_point(const DmftConfig& cfg, double V, double eps2, std::uint64_t label,
                                      bool need_occupations, double occ_quad_tol = 1e-6) {
  PointEvaluation pe;
  pe.params = TwoSiteParams{cfg.U, cfg.chemical_potential(), eps2, V};
  const ImpurityModel model = ImpurityModel::two_site(pe.params);
  const bool closed_form = cfg.regularize && cfg.ph_symmetric;

  SolveOptions so = cfg.solver;
  so.seed = derive_seed(cfg.solver.seed, {label});
  if (!so.mode.is_exact()) so.mode.seed = derive_seed(cfg.solver.mode.seed, {label});
  so.compute_weights = !closed_form;
  SpectrumSolution sol = solve_spectrum(model, so);
  for (auto& d : sol.diagnostics) pe.notes.push_back(d);

  if (closed_form)
    pe.spectral = regularize_two_site_ph(sol.spectral, V);
  else if (cfg.regularize)
    pe.spectral = regularize(sol.spectral, model);
  else
    pe.spectral = sol.spectral;

  GreensEvaluator g(pe.spectral, model, cfg.delta);
  pe.bath_poles = g.sigma_rational().bath_poles;
  pe.q = quasiparticle_weight(g);
  if (need_occupations) pe.occ = occupations(g, occ_quad_tol);
  else pe.occ.n_imp = 2.0 * pe.spectral.hole_weight(0);
  return pe;
}

inline DmftIteration record(std::size_t iter, const PointEvaluation& pe) {
  DmftIteration it;
  it.iter = iter;
  it.V = pe.params.V;
  it.eps2 = pe.params.eps2;
  it.z = pe.q.z;
  it.n_imp = pe.occ.n_imp;
  it.n_lat = pe.occ.n_lat;
  it.e0 = pe.spectral.e0;
  it.e30 = pole_energy(pe.spectral, 0);
  it.e32 = pole_energy(pe.spectral, 2);
  it.lambda = lowest_particle_weight(pe.spectral);
  it.residual = std::abs(pe.params.V - std::sqrt(pe.q.z));
  return it;
}

// Stops the loop (unconverged) on an unphysical Sigma pole or undefined z.
inline bool fatal(const PointEvaluation& pe, DmftResult& r, std::size_t iter) {
  for (auto& p : pe.bath_poles) {
    r.diagnostics.push_back("iteration " + std::to_string(iter) + ": unphysical self-energy pole at bath energy " +
                            format_double(p.omega) + " (order " + std::to_string(p.order) + ", coefficient " +
                            format_double(p.coefficient) + ")");
  }
  if (!pe.bath_poles.empty()) return true;
  if (!pe.q.defined && pe.params.V > 0.0) {
    r.diagnostics.push_back("iteration " + std::to_string(iter) + ": " + pe.q.diagnostic);
    return true;
  }
  return false;
}

inline double stop_measure(const std::vector<DmftIteration>& its, const DmftConfig& cfg) {
  if (cfg.solver.mode.is_exact()) return its.back().residual;
  if (its.size() < cfg.average_window) return std::numeric_limits<double>::infinity();
  double s = 0.0;
  for (std::size_t k = its.size() - cfg.average_window; k < its.size(); ++k) s += its[k].residual;
  return s / static_cast<double>(cfg.average_window);
}

}  // namespace detail

// Particle-hole symmetric loop: per iteration the VQE energies fix the
// weights in closed form (or measured weights when regularization is off),
// then V <- (1 - alpha) V + alpha sqrt z.
inline DmftResult run_ph_symmetric(const DmftConfig& cfg) {
  cfg.validate();
  if (!cfg.ph_symmetric) throw ParameterError("run_ph_symmetric needs a ph-symmetric configuration");
  DmftResult r;
  double V = cfg.V0;
  for (std::size_t k = 0; k < cfg.max_iters; ++k) {
    detail::PointEvaluation pe;
    try {
      pe = detail::evaluate_point(cfg, V, 0.0, k, true);
    } catch (const RegularizationError& e) {
      r.diagnostics.push_back("iteration " + std::to_string(k) + ": " + e.what());
      break;
    }
    for (auto& n : pe.notes) r.diagnostics.push_back("iteration " + std::to_string(k) + ": " + n);
    r.iterations.push_back(detail::record(k, pe));
    r.final_params = pe.params;
    r.spectral = pe.spectral;
    r.z = pe.q.z;
    r.eps2 = 0.0;
    if (detail::fatal(pe, r, k)) {
      r.V = V;
      return r;
    }
    const double measure = detail::stop_measure(r.iterations, cfg);
    V = (1.0 - cfg.alpha) * V + cfg.alpha * std::sqrt(pe.q.z);
    r.V = V;
    if (measure < cfg.eta) {
      r.converged = true;
      return r;
    }
  }
  r.V = V;
  r.diagnostics.push_back("no convergence within " + std::to_string(cfg.max_iters) + " iterations");
  return r;
}

namespace detail {

struct Eps2Root {
  double eps2 = 0.0;
  PointEvaluation at;
  bool found = false;
  std::size_t evaluations = 0;
};

// Root of n_imp - n_lat in eps2 at fixed V: damped secant steps, bisection
// once a sign change is bracketed and the secant misbehaves.
inline Eps2Root solve_eps2(const DmftConfig& cfg, double V, double start, std::uint64_t label, double tol) {
  Eps2Root out;
  const double quad_tol = std::min(1e-6, tol / 10);
  std::uint64_t sub = 0;
  auto eval = [&](double e, PointEvaluation& pe) -> std::optional<double> {
    ++out.evaluations;
    try {
      pe = evaluate_point(cfg, V, e, derive_seed(label, {sub++}), true, quad_tol);
    } catch (const Error&) {
      return std::nullopt;
    }
    if (!pe.bath_poles.empty()) return std::nullopt;
    const double f = pe.occ.n_imp - pe.occ.n_lat;
    return std::isfinite(f) ? std::optional<double>(f) : std::nullopt;
  };

  // retries a failed point halfway back towards `from`
  auto eval_towards = [&](double from, double& x, PointEvaluation& pe) -> std::optional<double> {
    for (int t = 0; t < 6; ++t) {
      if (auto v = eval(x, pe)) return v;
      x = 0.5 * (from + x);
    }
    return std::nullopt;
  };

  PointEvaluation pa, pb;
  double a = start;
  auto fa = eval(a, pa);
  if (!fa) throw EvaluationError("impurity solve failed at eps2 = " + format_double(a));
  if (std::abs(*fa) < tol) {
    out.eps2 = a, out.at = pa, out.found = true;
    return out;
  }
  double b = start + 0.05;
  auto fb = eval_towards(a, b, pb);
  if (!fb) throw EvaluationError("impurity solve failed near eps2 = " + format_double(a));

  std::optional<double> neg, pos;  // points with f < 0 and f > 0
  auto note = [&](double x, double fx) {
    if (fx < 0) neg = x;
    else pos = x;
  };
  note(a, *fa);
  for (std::size_t it = 0; it < 60; ++it) {
    if (std::abs(*fb) < tol) {
      out.eps2 = b, out.at = pb, out.found = true;
      return out;
    }
    note(b, *fb);
    double c;
    if (std::abs(*fb - *fa) > 1e-14) {
      const double step = -*fb * (b - a) / (*fb - *fa) * cfg.eps2_damping;
      c = b + std::clamp(step, -0.5, 0.5);
    } else {
      c = b + 2.0 * (b - a);
    }
    if (neg && pos) {
      const double lo = std::min(*neg, *pos), hi = std::max(*neg, *pos);
      if (!(c > lo && c < hi)) c = 0.5 * (lo + hi);
    }
    PointEvaluation pc;
    auto fc = eval_towards(b, c, pc);
    if (!fc) break;
    a = b, fa = fb, pa = std::move(pb);
    b = c, fb = fc, pb = std::move(pc);
  }
  out.eps2 = b;
  out.at = pb;
  return out;
}

}  // namespace detail

// General 2-site loop: each outer iteration places eps2 on the occupation
// root n_imp = n_lat at the current V, then updates V from z.
inline DmftResult run_general(const DmftConfig& cfg) {
  cfg.validate();
  if (cfg.ph_symmetric) return run_ph_symmetric(cfg);
  DmftResult r;
  double V = cfg.V0, eps2 = cfg.eps2_0;
  for (std::size_t k = 0; k < cfg.max_iters; ++k) {
    detail::Eps2Root root;
    try {
      root = detail::solve_eps2(cfg, V, eps2, derive_seed(k, {0x65707332}), cfg.occ_tol / 10);
    } catch (const Error& e) {
      r.diagnostics.push_back("iteration " + std::to_string(k) + ": " + e.what());
      break;
    }
    const auto& pe = root.at;
    if (!root.found)
      r.diagnostics.push_back("iteration " + std::to_string(k) + ": occupation root not reached");
    for (auto& n : pe.notes) r.diagnostics.push_back("iteration " + std::to_string(k) + ": " + n);
    r.iterations.push_back(detail::record(k, pe));
    r.final_params = pe.params;
    r.spectral = pe.spectral;
    r.z = pe.q.z;
    eps2 = root.eps2;
    r.eps2 = eps2;
    if (detail::fatal(pe, r, k)) {
      r.V = V;
      return r;
    }
    const double measure = detail::stop_measure(r.iterations, cfg);
    const bool occ_ok = std::abs(pe.occ.n_imp - pe.occ.n_lat) < cfg.occ_tol;
    V = (1.0 - cfg.alpha) * V + cfg.alpha * std::sqrt(pe.q.z);
    r.V = V;
    if (measure < cfg.eta && occ_ok) {
      r.converged = true;
      return r;
    }
  }
  r.V = V;
  r.diagnostics.push_back("no convergence within " + std::to_string(cfg.max_iters) + " iterations");
  return r;
}

inline DmftResult run_dmft(const DmftConfig& cfg) { return cfg.ph_symmetric ? run_ph_symmetric(cfg) : run_general(cfg); }

inline void write_trace_csv(const std::string& path, const DmftResult& r) {
  std::ofstream f(path);
  if (!f) throw Error("cannot write " + path);
  f << "iter,V,eps2,z,n_imp,n_lat,E0,E30,E32,lambda\n";
  for (auto& it : r.iterations) {
    f << it.iter << ',' << format_double(it.V) << ',' << format_double(it.eps2) << ',' << format_double(it.z) << ','
      << format_double(it.n_imp) << ',' << format_double(it.n_lat) << ',' << format_double(it.e0) << ','
      << format_double(it.e30) << ',' << format_double(it.e32) << ',' << format_double(it.lambda) << '\n';
  }
}

struct ZSweepPoint {
  double U;
  double z;
  double V;
  bool converged;
};

// Self-consistent z over a list of U values (ph-symmetric loop).
inline std::vector<ZSweepPoint> z_sweep(DmftConfig cfg, const std::vector<double>& Us) {
  cfg.ph_symmetric = true;
  std::vector<ZSweepPoint> out;
  for (double u : Us) {
    cfg.U = u;
    auto r = run_ph_symmetric(cfg);
    out.push_back({u, r.z, r.V, r.converged});
  }
  return out;
}

inline void write_z_sweep_csv(const std::string& path, const std::vector<ZSweepPoint>& pts) {
  std::ofstream f(path);
  if (!f) throw Error("cannot write " + path);
  f << "U,z,V,converged\n";
  for (auto& p : pts)
    f << format_double(p.U) << ',' << format_double(p.z) << ',' << format_double(p.V) << ',' << (p.converged ? 1 : 0) << '\n';
}

}  // namespace qdmft
