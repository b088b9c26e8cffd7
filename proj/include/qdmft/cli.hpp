#pragma once

#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qdmft/config.hpp"
#include "qdmft/dmft.hpp"
#include "qdmft/ed_oracle.hpp"
#include "qdmft/greens.hpp"
#include "qdmft/verify.hpp"
#include "qdmft/vqe.hpp"

namespace qdmft {

enum ExitStatus : int { kExitOk = 0, kExitVerifyFailed = 1, kExitUnconverged = 2, kExitConfig = 3 };

namespace detail {

inline void write_text(const std::filesystem::path& p, const std::string& s) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw Error("cannot write " + p.string());
  f << s;
}

inline void write_json(const std::filesystem::path& p, const nlohmann::ordered_json& j) {
  write_text(p, j.dump(2) + "\n");
}

inline nlohmann::ordered_json state_json(const Eigenstate& s) {
  nlohmann::ordered_json j;
  j["n_electrons"] = s.sector.n_electrons;
  j["sz"] = s.sector.sz;
  j["index"] = s.index;
  j["ansatz"] = ansatz_name(s.ansatz);
  j["flip"] = s.flip;
  j["energy"] = s.energy;
  j["params"] = s.params;
  j["converged"] = s.converged;
  return j;
}

inline nlohmann::ordered_json params_json(const TwoSiteParams& p) {
  nlohmann::ordered_json j;
  j["U"] = p.U;
  j["mu"] = p.mu;
  j["eps2"] = p.eps2;
  j["V"] = p.V;
  return j;
}

inline const Pole* find_pole(const std::vector<Pole>& ps, const Sector& s, int index) {
  for (auto& p : ps)
    if (p.sector == s && p.index == index) return &p;
  return nullptr;
}

struct TableRow {
  std::string label;
  std::vector<std::optional<double>> cells;
};

// Rows E0, E[N,Sz,i] and lambda[p|h,N,Sz,i] keyed on the first column's poles;
// `shift` is subtracted from every energy.
inline std::vector<TableRow> comparison_rows(const std::vector<const SpectralData*>& cols, double shift) {
  std::vector<TableRow> rows;
  const SpectralData& ref = *cols.front();
  TableRow e0{"E0", {}};
  for (auto* c : cols) e0.cells.push_back(c ? std::optional<double>(c->e0 - shift) : std::nullopt);
  rows.push_back(e0);
  auto tag = [](const Pole& p) {
    return std::to_string(p.sector.n_electrons) + "," + std::to_string(p.sector.sz) + "," + std::to_string(p.index);
  };
  for (bool particle : {false, true}) {
    const auto& list = particle ? ref.particle : ref.hole;
    for (auto& p : list) {
      TableRow e{"E[" + tag(p) + "]", {}}, l{std::string("lambda[") + (particle ? "p," : "h,") + tag(p) + "]", {}};
      for (auto* c : cols) {
        const Pole* q = c ? find_pole(particle ? c->particle : c->hole, p.sector, p.index) : nullptr;
        if (!q) {
          e.cells.push_back(std::nullopt);
          l.cells.push_back(std::nullopt);
          continue;
        }
        e.cells.push_back((particle ? c->e0 + q->omega : c->e0 - q->omega) - shift);
        l.cells.push_back(q->lambda.at(0));
      }
      rows.push_back(e);
      rows.push_back(l);
    }
  }
  return rows;
}

inline std::string render_table(const std::vector<std::string>& header, const std::vector<TableRow>& rows) {
  std::vector<std::vector<std::string>> cells;
  cells.push_back(header);
  for (auto& r : rows) {
    std::vector<std::string> line{r.label};
    for (auto& c : r.cells) line.push_back(c ? format_double(*c) : "-");
    cells.push_back(line);
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (auto& line : cells)
    for (std::size_t k = 0; k < line.size(); ++k) width[k] = std::max(width[k], line[k].size());
  std::string out;
  for (auto& line : cells) {
    for (std::size_t k = 0; k < line.size(); ++k) {
      out += line[k];
      if (k + 1 < line.size()) out += std::string(width[k] - line[k].size() + 2, ' ');
    }
    out += '\n';
  }
  return out;
}

inline EvalMode report_mode(const RunConfig& cfg) {
  EvalMode m = EvalMode::sampled(cfg.report_shots, derive_seed(cfg.solver.seed, {0x72706f7274}));
  m.readout = cfg.solver.mode.readout;
  m.correct_readout = cfg.solver.mode.correct_readout;
  m.group_commuting = cfg.solver.mode.group_commuting;
  return m;
}

inline std::vector<double> dos_grid(const RunConfig& cfg) {
  return linear_grid(cfg.dos.omega_min, cfg.dos.omega_max, cfg.dos.points);
}

inline void write_dos_files(const std::filesystem::path& out, const GreensEvaluator& g, const RunConfig& cfg,
                            const std::string& suffix, bool with_sigma) {
  const auto grid = dos_grid(cfg);
  write_dos_csv((out / ("dos_imp" + suffix + ".csv")).string(), dos_impurity(g, grid, cfg.dos.delta));
  write_dos_csv((out / ("dos_lat" + suffix + ".csv")).string(), dos_lattice(g, grid));
  if (with_sigma) write_sigma_csv((out / ("sigma" + suffix + ".csv")).string(), g, grid);
}

}  // namespace detail

// VQE spectrum at the configured point: spectral.json, angles.json and a
// report comparing the oracle, the VQE result and a shot re-evaluation at the
// optimal angles.
inline int cmd_solve(const RunConfig& cfg, std::ostream& log) {
  const auto out = prepare_output_dir(cfg.out_dir);
  const ImpurityModel model = ImpurityModel::two_site(cfg.model);
  const SpectrumSolution sol = solve_spectrum(model, cfg.solver);
  const SpectralData exact = exact_spectral_data(model);

  std::optional<SpectralData> shots;
  if (cfg.report_shots > 0) shots = evaluate_at_angles(sol, cfg.model, cfg.solver.method, detail::report_mode(cfg));

  detail::write_json(out / "spectral.json", to_json(sol.spectral));
  nlohmann::ordered_json angles;
  angles["method"] = method_name(cfg.solver.method);
  angles["ground"] = detail::state_json(sol.ground);
  angles["states"] = nlohmann::ordered_json::array();
  for (auto& s : sol.states) angles["states"].push_back(detail::state_json(s));
  detail::write_json(out / "angles.json", angles);

  std::vector<std::string> header{"quantity", "exact", "vqe"};
  std::vector<const SpectralData*> cols{&exact, &sol.spectral};
  if (shots) {
    header.push_back("optimal_theta_" + std::to_string(cfg.report_shots) + "_shots");
    cols.push_back(&*shots);
  }
  const double vacuum = cfg.model.mu - cfg.model.U / 4 - cfg.model.eps2;
  std::string rep;
  rep += "model U=" + format_double(cfg.model.U) + " mu=" + format_double(cfg.model.mu) +
         " eps2=" + format_double(cfg.model.eps2) + " V=" + format_double(cfg.model.V) + "\n";
  rep += std::string("method ") + method_name(cfg.solver.method) +
         (cfg.solver.method == Method::PT ? std::string(" ansatz ") + ansatz_name(cfg.solver.pt_ansatz) : "") +
         " mode " + (cfg.solver.mode.is_exact() ? "exact" : "shots=" + std::to_string(cfg.solver.mode.shots)) + "\n\n";
  rep += "energies relative to the Hamiltonian without constant term\n";
  rep += detail::render_table(header, detail::comparison_rows(cols, 0.0));
  rep += "\nenergies relative to the empty (N=0) state\n";
  rep += detail::render_table(header, detail::comparison_rows(cols, vacuum));
  rep += "\nconverged " + std::string(sol.converged ? "yes" : "no") + "\n";
  for (auto& d : sol.diagnostics) rep += "diagnostic: " + d + "\n";
  detail::write_text(out / "report.txt", rep);
  log << rep;
  return sol.converged ? kExitOk : kExitUnconverged;
}

// Self-consistency loop: trace.csv, final.json, DOS and self-energy CSVs,
// the U=0 reference DOS and, if requested, the z(U) sweep.
inline int cmd_dmft(const RunConfig& cfg, std::ostream& log) {
  const auto out = prepare_output_dir(cfg.out_dir);
  const DmftResult r = run_dmft(cfg.dmft);
  write_trace_csv((out / "trace.csv").string(), r);

  nlohmann::ordered_json fin;
  fin["converged"] = r.converged;
  fin["iterations"] = r.iterations.size();
  fin["V"] = r.V;
  fin["eps2"] = r.eps2;
  fin["z"] = r.z;
  if (!r.iterations.empty()) {
    fin["n_imp"] = r.iterations.back().n_imp;
    fin["n_lat"] = r.iterations.back().n_lat;
  }
  fin["last_solve"] = detail::params_json(r.final_params);
  fin["spectral"] = to_json(r.spectral);
  fin["diagnostics"] = r.diagnostics;
  detail::write_json(out / "final.json", fin);

  if (!r.iterations.empty()) {
    const GreensEvaluator g(r.spectral, ImpurityModel::two_site(r.final_params), cfg.dmft.delta);
    detail::write_dos_files(out, g, cfg, "", true);
  }

  // U = 0 reference from an exact-mode loop at the same filling convention
  DmftConfig ref = cfg.dmft;
  ref.U = 0.0;
  ref.solver.mode = EvalMode::exact();
  ref.solver.rotosolve.max_sweeps = 400;
  ref.alpha = 1.0;
  const DmftResult r0 = run_dmft(ref);
  if (!r0.iterations.empty()) {
    const GreensEvaluator g0(r0.spectral, ImpurityModel::two_site(r0.final_params), cfg.dmft.delta);
    detail::write_dos_files(out, g0, cfg, "_u0", false);
  }

  if (!cfg.u_sweep.empty()) {
    DmftConfig sw = cfg.dmft;
    sw.eta = cfg.sweep_eta;
    write_z_sweep_csv((out / "z_sweep.csv").string(), z_sweep(sw, cfg.u_sweep));
  }

  log << "converged " << (r.converged ? "yes" : "no") << " after " << r.iterations.size() << " iterations\n";
  log << "V " << format_double(r.V) << " eps2 " << format_double(r.eps2) << " z " << format_double(r.z) << "\n";
  for (auto& d : r.diagnostics) log << "diagnostic: " << d << "\n";
  return r.converged ? kExitOk : kExitUnconverged;
}

// DOS at the configured point, from dos.spectral if given, else from a solve.
inline int cmd_dos(const RunConfig& cfg, std::ostream& log) {
  const auto out = prepare_output_dir(cfg.out_dir);
  const ImpurityModel model = ImpurityModel::two_site(cfg.model);
  SpectralData sd;
  if (!cfg.dos.spectral.empty()) {
    std::ifstream f(cfg.dos.spectral);
    if (!f) throw ConfigError("cannot read spectral data " + cfg.dos.spectral);
    try {
      sd = spectral_from_json(nlohmann::json::parse(f));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError("bad spectral data " + cfg.dos.spectral + ": " + e.what());
    }
  } else {
    sd = solve_spectrum(model, cfg.solver).spectral;
  }
  if (cfg.dmft.regularize) sd = regularize(sd, model);
  const GreensEvaluator g(sd, model, cfg.dos.delta);
  detail::write_dos_files(out, g, cfg, "", true);
  log << "wrote dos_imp.csv, dos_lat.csv, sigma.csv to " << out.string() << "\n";
  return kExitOk;
}

inline int cmd_verify(const RunConfig& cfg, std::ostream& log) {
  const auto out = prepare_output_dir(cfg.out_dir);
  const VerifyReport rep = run_verification(cfg.verify);
  detail::write_text(out / "report.txt", rep.to_text());
  log << rep.to_text();
  return rep.passed() ? kExitOk : kExitVerifyFailed;
}

}  // namespace qdmft
